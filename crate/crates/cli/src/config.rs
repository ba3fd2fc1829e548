//! Pipeline configuration files.
//!
//! ```text
//! seed = 0
//! [radar]
//! wavelength = 0.031
//! incidence_deg = 30
//! [simulate]
//! scene = scene.txt
//! rows = 64
//! cols = 256
//! [subap]
//! steps = 8
//! reserved = 0.5
//! [coreg]
//! window = 32
//! [tomo]
//! zmax = 12.5
//! [output]
//! dir = out
//! ```
//!
//! Every key is optional. Relative paths are resolved against the
//! directory holding the config file. Command-line flags override values
//! read here.

use std::path::{Path, PathBuf};

use mmtomo::coreg::{DEFAULT_OVERSAMPLE, DEFAULT_WINDOW};
use mmtomo::subaperture::Taper;
use mmtomo::text::{Document, Section};
use mmtomo::tomo::Inversion;
use mmtomo::RadarConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub scene: Option<PathBuf>,
    pub rows: usize,
    pub cols: usize,
    pub oversample: f64,
    /// Defaults to the pulse count spanning the acquisition.
    pub n_pulses: Option<usize>,
    /// Complex white noise relative to the mean image power; none when unset.
    pub noise_snr_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubapConfig {
    pub steps: usize,
    pub reserved: f64,
    pub taper: Taper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoregConfig {
    pub window: usize,
    pub oversample: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoConfig {
    pub zmin: f64,
    pub zmax: f64,
    pub zstep: f64,
    pub aperture: f64,
    pub sound_speed: f64,
    pub freq: f64,
    pub mode: Inversion,
    /// Defaults to the radar reference range.
    pub slant_range: Option<f64>,
    /// Radians; defaults to the radar incidence angle.
    pub incidence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillateConfig {
    pub spring_length: f64,
    pub rest_length: f64,
    pub elastic_constant: f64,
    pub mass: f64,
    pub damping: f64,
    pub a: f64,
    pub b: f64,
    pub t_span: f64,
    pub dt: f64,
    pub nonlinear: bool,
    pub forcing_amplitude: f64,
    pub forcing_frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub radar: RadarConfig,
    pub simulate: SimulateConfig,
    pub subap: SubapConfig,
    pub coreg: CoregConfig,
    pub tomo: TomoConfig,
    pub oscillate: OscillateConfig,
    pub insar_window: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            radar: RadarConfig::default(),
            simulate: SimulateConfig {
                scene: None,
                rows: 64,
                cols: 256,
                oversample: 2.0,
                n_pulses: None,
                noise_snr_db: None,
            },
            subap: SubapConfig {
                steps: 8,
                reserved: 0.5,
                taper: Taper::Rectangular,
            },
            coreg: CoregConfig {
                window: DEFAULT_WINDOW,
                oversample: DEFAULT_OVERSAMPLE,
            },
            tomo: TomoConfig {
                zmin: 0.0,
                zmax: 12.5,
                zstep: 0.5,
                aperture: 42_000.0,
                sound_speed: 6000.0,
                freq: 12_500.0,
                mode: Inversion::Matched,
                slant_range: None,
                incidence: None,
            },
            oscillate: OscillateConfig {
                spring_length: 1.0,
                rest_length: 0.0,
                elastic_constant: 1.0,
                mass: 1.0,
                damping: 0.0,
                a: 1.0,
                b: 1.0,
                t_span: 10.0,
                dt: 1e-3,
                nonlinear: true,
                forcing_amplitude: 0.0,
                forcing_frequency: 0.0,
            },
            insar_window: mmtomo::insar::DEFAULT_WINDOW,
            output_dir: None,
        }
    }
}

pub fn parse_taper(s: &str) -> CliResult<Taper> {
    match s {
        "rect" | "rectangular" | "none" => Ok(Taper::Rectangular),
        "raised-cosine" | "hann" => Ok(Taper::RaisedCosine),
        _ => Err(CliError::config(format!("unknown taper {s:?}; use rectangular or raised-cosine"))),
    }
}

pub fn parse_mode(mode: &str, reg: f64) -> CliResult<Inversion> {
    match mode {
        "matched" => Ok(Inversion::Matched),
        "pinv" => Ok(Inversion::Pinv { reg }),
        _ => Err(CliError::config(format!("unknown inversion mode {mode:?}; use matched or pinv"))),
    }
}

pub fn parse_bool(s: &str) -> CliResult<bool> {
    match s {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(CliError::config(format!("expected a boolean, got {s:?}"))),
    }
}

fn check_keys(section: &Section, allowed: &[&str]) -> CliResult<()> {
    match section.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
        Some(e) => Err(CliError::config(format!("line {}: unknown key {}", e.line, e.key))),
        None => Ok(()),
    }
}

fn get<T: std::str::FromStr>(s: Option<&Section>, key: &str, default: T) -> CliResult<T> {
    match s {
        Some(s) => Ok(s.parse_or(key, default)?),
        None => Ok(default),
    }
}

fn opt<T: std::str::FromStr>(s: Option<&Section>, key: &str) -> CliResult<Option<T>> {
    match s {
        Some(s) => Ok(s.parse_opt(key)?),
        None => Ok(None),
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl PipelineConfig {
    /// Parses config text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> CliResult<Self> {
        let doc = Document::parse(text)?;
        let sections = ["radar", "simulate", "subap", "coreg", "tomo", "oscillate", "insar", "output"];
        doc.expect_sections(&sections)?;
        for name in sections {
            if doc.sections_named(name).count() > 1 {
                return Err(CliError::config(format!("section [{name}] appears more than once")));
            }
        }
        let root = doc.root();
        check_keys(root, &["seed"])?;
        let mut cfg = Self::default();
        cfg.seed = root.parse_or("seed", 0u64)?;

        let s = doc.section("radar");
        if let Some(s) = s {
            check_keys(
                s,
                &[
                    "wavelength",
                    "chirp_bandwidth",
                    "prf",
                    "platform_velocity",
                    "reference_range",
                    "antenna_length",
                    "incidence_deg",
                    "acquisition_duration",
                ],
            )?;
        }
        let r = &mut cfg.radar;
        r.wavelength = get(s, "wavelength", r.wavelength)?;
        r.chirp_bandwidth = get(s, "chirp_bandwidth", r.chirp_bandwidth)?;
        r.prf = get(s, "prf", r.prf)?;
        r.platform_velocity = get(s, "platform_velocity", r.platform_velocity)?;
        r.reference_range = get(s, "reference_range", r.reference_range)?;
        r.antenna_length = get(s, "antenna_length", r.antenna_length)?;
        r.incidence_angle = get(s, "incidence_deg", r.incidence_angle.to_degrees())?.to_radians();
        r.acquisition_duration = get(s, "acquisition_duration", r.acquisition_duration)?;
        r.validate()?;

        let s = doc.section("simulate");
        if let Some(s) = s {
            check_keys(s, &["scene", "rows", "cols", "oversample", "n_pulses", "noise_snr_db"])?;
        }
        let sim = &mut cfg.simulate;
        if let Some(p) = opt::<String>(s, "scene")? {
            let path = resolve(base_dir, &p);
            if !path.is_file() {
                return Err(CliError::io(format!("scene file {} does not exist", path.display())));
            }
            sim.scene = Some(path);
        }
        sim.rows = get(s, "rows", sim.rows)?;
        sim.cols = get(s, "cols", sim.cols)?;
        sim.oversample = get(s, "oversample", sim.oversample)?;
        sim.n_pulses = opt(s, "n_pulses")?;
        sim.noise_snr_db = opt(s, "noise_snr_db")?;

        let s = doc.section("subap");
        if let Some(s) = s {
            check_keys(s, &["steps", "reserved", "taper"])?;
        }
        cfg.subap.steps = get(s, "steps", cfg.subap.steps)?;
        cfg.subap.reserved = get(s, "reserved", cfg.subap.reserved)?;
        if let Some(t) = opt::<String>(s, "taper")? {
            cfg.subap.taper = parse_taper(&t)?;
        }

        let s = doc.section("coreg");
        if let Some(s) = s {
            check_keys(s, &["window", "oversample"])?;
        }
        cfg.coreg.window = get(s, "window", cfg.coreg.window)?;
        cfg.coreg.oversample = get(s, "oversample", cfg.coreg.oversample)?;

        let s = doc.section("tomo");
        if let Some(s) = s {
            check_keys(
                s,
                &["zmin", "zmax", "zstep", "aperture", "sound_speed", "freq", "mode", "reg", "slant_range", "incidence_deg"],
            )?;
        }
        let t = &mut cfg.tomo;
        t.zmin = get(s, "zmin", t.zmin)?;
        t.zmax = get(s, "zmax", t.zmax)?;
        t.zstep = get(s, "zstep", t.zstep)?;
        t.aperture = get(s, "aperture", t.aperture)?;
        t.sound_speed = get(s, "sound_speed", t.sound_speed)?;
        t.freq = get(s, "freq", t.freq)?;
        let reg = get(s, "reg", 0.0)?;
        t.mode = parse_mode(&get(s, "mode", "matched".to_string())?, reg)?;
        t.slant_range = opt(s, "slant_range")?;
        t.incidence = opt::<f64>(s, "incidence_deg")?.map(f64::to_radians);

        let s = doc.section("oscillate");
        if let Some(s) = s {
            check_keys(
                s,
                &[
                    "spring_length",
                    "rest_length",
                    "elastic_constant",
                    "mass",
                    "damping",
                    "a",
                    "b",
                    "t_span",
                    "dt",
                    "nonlinear",
                    "forcing_amplitude",
                    "forcing_frequency",
                ],
            )?;
        }
        let o = &mut cfg.oscillate;
        o.spring_length = get(s, "spring_length", o.spring_length)?;
        o.rest_length = get(s, "rest_length", o.rest_length)?;
        o.elastic_constant = get(s, "elastic_constant", o.elastic_constant)?;
        o.mass = get(s, "mass", o.mass)?;
        o.damping = get(s, "damping", o.damping)?;
        o.a = get(s, "a", o.a)?;
        o.b = get(s, "b", o.b)?;
        o.t_span = get(s, "t_span", o.t_span)?;
        o.dt = get(s, "dt", o.dt)?;
        if let Some(v) = opt::<String>(s, "nonlinear")? {
            o.nonlinear = parse_bool(&v)?;
        }
        o.forcing_amplitude = get(s, "forcing_amplitude", o.forcing_amplitude)?;
        o.forcing_frequency = get(s, "forcing_frequency", o.forcing_frequency)?;

        let s = doc.section("insar");
        if let Some(s) = s {
            check_keys(s, &["window"])?;
        }
        cfg.insar_window = get(s, "window", cfg.insar_window)?;

        let s = doc.section("output");
        if let Some(s) = s {
            check_keys(s, &["dir"])?;
        }
        cfg.output_dir = opt::<String>(s, "dir")?.map(|d| resolve(base_dir, &d));
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base).map_err(|e| e.context(path.display()))
    }
}
