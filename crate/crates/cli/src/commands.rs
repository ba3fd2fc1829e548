//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mmtomo::coreg::{parse_pixel_csv, track_pixels, tracks_to_csv, TrackParams};
use mmtomo::image::{Raster, SlcImage};
use mmtomo::insar::interferogram_with_coherence;
use mmtomo::oscillator::{integrate, Nonlinearity, OscillatorParams};
use mmtomo::scene::parse_scene;
use mmtomo::sim::{synthesize_slc, SampleGrid, Synthesizer};
use mmtomo::slc_io::{decode_slc, header_path};
use mmtomo::subaperture::{allocate_bands, build_bank, BankManifest, SubApertureBank};
use mmtomo::tomo::{build_tomogram, depth_grid, sound_wavelength, Inversion, TomoGeometry, TomoParams};
use mmtomo::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{parse_mode, parse_taper, PipelineConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{read_input, read_text_input, Manifest, Outputs};
use crate::pgm::encode_pgm;
use crate::Command;

pub fn run_subcommand(command: &Command, cfg: &PipelineConfig) -> CliResult<String> {
    match command {
        Command::Simulate(a) => simulate(a, cfg),
        Command::Oscillate(a) => oscillate(a, cfg),
        Command::Subap(a) => subap(a, cfg),
        Command::Coreg(a) => coreg(a, cfg),
        Command::Tomo(a) => tomo(a, cfg),
        Command::Insar(a) => insar(a, cfg),
        Command::Resolution(a) => resolution(a, cfg),
    }
}

fn out_dir(cfg: &PipelineConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Reads an SLC and records both of its files in `manifest`.
fn load_slc(path: &Path, role: &str, manifest: &mut Manifest) -> CliResult<SlcImage> {
    let hdr_path = header_path(path);
    let header = read_text_input(&hdr_path)?;
    let payload = read_input(path)?;
    manifest
        .input(role, path, &payload)
        .input(&format!("{role}_header"), &hdr_path, header.as_bytes());
    decode_slc(&header, &payload).map_err(|e| CliError::from(e).context(path.display()))
}

fn simulate(args: &crate::SimulateArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let s = &cfg.simulate;
    let scene_path = args
        .scene
        .clone()
        .or_else(|| s.scene.clone())
        .ok_or_else(|| CliError::config("simulate needs --scene or [simulate] scene"))?;
    let rows = args.rows.unwrap_or(s.rows);
    let cols = args.cols.unwrap_or(s.cols);
    let oversample = args.oversample.unwrap_or(s.oversample);
    let n_pulses = args.n_pulses.or(s.n_pulses);
    let snr_db = args.noise_snr_db.or(s.noise_snr_db);
    if let Some(snr) = snr_db {
        if !snr.is_finite() {
            return Err(CliError::config(format!("noise SNR must be finite, got {snr}")));
        }
    }

    let mut manifest = Manifest::new("simulate");
    let scene_text = read_text_input(&scene_path)?;
    manifest.input("scene", &scene_path, scene_text.as_bytes());
    let targets = parse_scene(&scene_text).map_err(|e| CliError::from(e).context(scene_path.display()))?;

    let synth = match n_pulses {
        Some(n) => Synthesizer::new(cfg.radar, SampleGrid::new(&cfg.radar, n, oversample)?)?,
        None => Synthesizer::for_acquisition(cfg.radar, oversample)?,
    };
    let mut img = synthesize_slc(&synth, &targets, rows, cols)?;
    if let Some(snr) = snr_db {
        add_noise(&mut img, snr, cfg.seed);
    }

    radar_params(&mut manifest, cfg);
    manifest
        .param("seed", cfg.seed)
        .param("rows", rows)
        .param("cols", cols)
        .param("oversample", oversample)
        .param("n_pulses", synth.grid.n_pulses)
        .param("noise_snr_db", snr_db.map_or("none".to_string(), |v| v.to_string()))
        .param("targets", targets.len());
    let dir = out_dir(cfg);
    let mut out = Outputs::new();
    out.slc(dir.join(&args.out), &img);
    out.commit(&manifest, &dir.join("simulate.manifest"))?;
    Ok(String::new())
}

/// Complex white noise whose power is the mean image power over the SNR.
fn add_noise(img: &mut SlcImage, snr_db: f64, seed: u64) {
    let n = img.data.len() as f64;
    let power = img.energy() / n;
    let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for z in img.data.as_mut_slice() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z += C64::new(re, im) * sigma;
    }
}

fn radar_params(m: &mut Manifest, cfg: &PipelineConfig) {
    let r = &cfg.radar;
    m.param("radar.wavelength", r.wavelength)
        .param("radar.chirp_bandwidth", r.chirp_bandwidth)
        .param("radar.prf", r.prf)
        .param("radar.platform_velocity", r.platform_velocity)
        .param("radar.reference_range", r.reference_range)
        .param("radar.antenna_length", r.antenna_length)
        .param("radar.incidence_deg", r.incidence_angle.to_degrees())
        .param("radar.acquisition_duration", r.acquisition_duration);
}

fn oscillate(args: &crate::OscillateArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let o = &cfg.oscillate;
    let params = OscillatorParams {
        spring_length: o.spring_length,
        rest_length: o.rest_length,
        elastic_constant: o.elastic_constant,
        mass: o.mass,
        damping: args.damping.unwrap_or(o.damping),
        shift_a: args.a.unwrap_or(o.a),
        shift_b: args.b.unwrap_or(o.b),
    };
    params.validate()?;
    let t_span = args.t_span.unwrap_or(o.t_span);
    let dt = args.dt.unwrap_or(o.dt);
    let nonlinear = o.nonlinear && !args.linear;
    let amp = args.forcing_amplitude.unwrap_or(o.forcing_amplitude);
    let freq = args.forcing_frequency.unwrap_or(o.forcing_frequency);
    if !(amp.is_finite() && freq.is_finite()) {
        return Err(CliError::config("forcing amplitude and frequency must be finite"));
    }
    let omega0 = params.natural_frequency()?;
    let traj = integrate(
        &params,
        params.closed_form_initial_state(omega0),
        |t| [amp * (freq * t).cos(), 0.0],
        t_span,
        dt,
        if nonlinear { Nonlinearity::Included } else { Nonlinearity::Neglected },
    )?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;

    let mut manifest = Manifest::new("oscillate");
    manifest
        .param("spring_length", params.spring_length)
        .param("rest_length", params.rest_length)
        .param("elastic_constant", params.elastic_constant)
        .param("mass", params.mass)
        .param("damping", params.damping)
        .param("a", params.shift_a)
        .param("b", params.shift_b)
        .param("t_span", t_span)
        .param("dt", dt)
        .param("nonlinear", nonlinear)
        .param("forcing_amplitude", amp)
        .param("forcing_frequency", freq);
    let dir = out_dir(cfg);
    let mut out = Outputs::new();
    out.file(dir.join(&args.out), csv);
    out.commit(&manifest, &dir.join("oscillate.manifest"))?;
    Ok(String::new())
}

fn subap(args: &crate::SubapArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let steps = args.steps.unwrap_or(cfg.subap.steps);
    let reserved = args.reserved.unwrap_or(cfg.subap.reserved);
    let taper = match &args.taper {
        Some(t) => parse_taper(t)?,
        None => cfg.subap.taper,
    };
    let mut manifest = Manifest::new("subap");
    let slc = load_slc(&args.slc, "slc", &mut manifest)?;
    let plan = allocate_bands(slc.meta.doppler_band, steps, reserved)?;
    let bank = build_bank(&slc, &plan, taper)?;
    let bank_manifest = BankManifest::new(plan);

    manifest
        .param("steps", steps)
        .param("reserved", reserved)
        .param("taper", format!("{taper:?}"));
    let dir = out_dir(cfg);
    let mut out = Outputs::new();
    for (i, (m, s)) in bank_manifest.files.iter().enumerate() {
        out.slc(dir.join(m), &bank.master[i]);
        out.slc(dir.join(s), &bank.slave[i]);
    }
    out.file(dir.join("bank.manifest"), bank_manifest.to_text().into_bytes());
    out.commit(&manifest, &dir.join("subap.manifest"))?;
    Ok(String::new())
}

fn track_params(window: Option<usize>, oversample: Option<usize>, cfg: &PipelineConfig) -> TrackParams {
    TrackParams {
        window: window.unwrap_or(cfg.coreg.window),
        oversample: oversample.unwrap_or(cfg.coreg.oversample),
    }
}

fn load_pixels(path: &Path, role: &str, manifest: &mut Manifest) -> CliResult<Vec<(usize, usize)>> {
    let text = read_text_input(path)?;
    manifest.input(role, path, text.as_bytes());
    parse_pixel_csv(&text).map_err(|e| CliError::from(e).context(path.display()))
}

/// The first error when there is at least one item and all of them failed.
fn all_failed(errors: impl Iterator<Item = Option<String>>) -> Option<String> {
    let mut first = None;
    for e in errors {
        match e {
            Some(e) => {
                first.get_or_insert(e);
            }
            None => return None,
        }
    }
    first
}

fn coreg(args: &crate::CoregArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let params = track_params(args.window, args.oversample, cfg);
    let mut manifest = Manifest::new("coreg");
    let bank_text = read_text_input(&args.bank)?;
    manifest.input("bank", &args.bank, bank_text.as_bytes());
    let bank_manifest = BankManifest::parse(&bank_text).map_err(|e| CliError::from(e).context(args.bank.display()))?;
    let pixels = load_pixels(&args.pixels, "pixels", &mut manifest)?;

    let base = args.bank.parent().unwrap_or_else(|| Path::new("."));
    let mut master = Vec::new();
    let mut slave = Vec::new();
    for (i, (m, s)) in bank_manifest.files.iter().enumerate() {
        master.push(load_slc(&base.join(m), &format!("master_{i}"), &mut manifest)?);
        slave.push(load_slc(&base.join(s), &format!("slave_{i}"), &mut manifest)?);
    }
    let n_bands = bank_manifest.plan.n_steps;
    let bank = SubApertureBank::from_parts(master, slave, bank_manifest.plan)?;
    let tracks = track_pixels(&bank, &pixels, params);
    for (p, t) in pixels.iter().zip(&tracks) {
        if let Err(e) = t {
            log::warn!("pixel ({}, {}): {e}", p.0, p.1);
        }
    }
    if let Some(e) = all_failed(tracks.iter().map(|t| t.as_ref().err().map(|e| e.to_string()))) {
        return Err(CliError::numeric(format!("every pixel failed; first: {e}")));
    }

    manifest
        .param("window", params.window)
        .param("oversample", params.oversample)
        .param("pixels", pixels.len())
        .param("failed_pixels", tracks.iter().filter(|t| t.is_err()).count());
    let dir = out_dir(cfg);
    let mut out = Outputs::new();
    out.file(dir.join(&args.out), tracks_to_csv(&pixels, &tracks, n_bands).into_bytes());
    out.commit(&manifest, &dir.join("coreg.manifest"))?;
    Ok(String::new())
}

fn tomo(args: &crate::TomoArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let t = &cfg.tomo;
    let zmin = args.zmin.unwrap_or(t.zmin);
    let zmax = args.zmax.unwrap_or(t.zmax);
    let zstep = args.zstep.unwrap_or(t.zstep);
    let speed = args.sound_speed.unwrap_or(t.sound_speed);
    let freq = args.freq.unwrap_or(t.freq);
    let mode = match (&args.mode, args.reg) {
        (Some(m), reg) => parse_mode(m, reg.unwrap_or(0.0))?,
        (None, Some(reg)) => match t.mode {
            Inversion::Pinv { .. } => Inversion::Pinv { reg },
            Inversion::Matched => return Err(CliError::config("--reg needs --mode pinv")),
        },
        (None, None) => t.mode,
    };
    let steps = args.steps.unwrap_or(cfg.subap.steps);
    let reserved = args.reserved.unwrap_or(cfg.subap.reserved);
    let track = track_params(args.window, args.oversample, cfg);
    let geometry = TomoGeometry {
        sound_wavelength: sound_wavelength(speed, freq)?,
        slant_range: args.slant_range.or(t.slant_range).unwrap_or(cfg.radar.reference_range),
        incidence: args
            .incidence_deg
            .map(f64::to_radians)
            .or(t.incidence)
            .unwrap_or(cfg.radar.incidence_angle),
        aperture: args.aperture.unwrap_or(t.aperture),
    };
    let z_grid = depth_grid(zmin, zmax, zstep)?;
    if args.out_prefix.is_empty() || args.out_prefix.contains(['/', '\\']) {
        return Err(CliError::config(format!("--out-prefix must be a bare name, got {:?}", args.out_prefix)));
    }

    let mut manifest = Manifest::new("tomo");
    let slc = load_slc(&args.slc, "slc", &mut manifest)?;
    let line = load_pixels(&args.line, "line", &mut manifest)?;
    let plan = allocate_bands(slc.meta.doppler_band, steps, reserved)?;
    let params = TomoParams {
        geometry,
        mode,
        track,
        taper: cfg.subap.taper,
    };
    let tomogram = build_tomogram(&slc, &line, &plan, &z_grid, &params)?;
    if let Some(e) = all_failed(tomogram.columns.iter().map(|c| c.error.clone())) {
        return Err(CliError::numeric(format!("every pixel failed; first: {e}")));
    }

    let depth = z_grid.len();
    let mut magnitude = Raster::filled(depth, line.len().max(1), 0.0);
    let mut csv = String::from("pixel,row,col,z,magnitude,flagged\n");
    for (p, col) in tomogram.columns.iter().enumerate() {
        for (d, z) in z_grid.iter().enumerate() {
            let m = tomogram.magnitude(p, d);
            *magnitude.get_mut(d, p) = m;
            let _ = writeln!(csv, "{p},{},{},{z},{m},{}", col.pixel.0, col.pixel.1, u8::from(col.error.is_some()));
        }
    }

    manifest
        .param("zmin", zmin)
        .param("zmax", zmax)
        .param("zstep", zstep)
        .param("depth_cells", depth)
        .param("aperture", geometry.aperture)
        .param("sound_speed", speed)
        .param("freq", freq)
        .param("sound_wavelength", geometry.sound_wavelength)
        .param("slant_range", geometry.slant_range)
        .param("incidence_deg", geometry.incidence.to_degrees())
        .param("resolution", geometry.resolution()?)
        .param(
            "mode",
            match mode {
                Inversion::Matched => "matched".to_string(),
                Inversion::Pinv { reg } => format!("pinv reg={reg}"),
            },
        )
        .param("steps", steps)
        .param("reserved", reserved)
        .param("taper", format!("{:?}", params.taper))
        .param("window", track.window)
        .param("oversample", track.oversample)
        .param("pixels", line.len())
        .param("flagged_pixels", tomogram.columns.iter().filter(|c| c.error.is_some()).count());
    let dir = out_dir(cfg);
    let mut out = Outputs::new();
    out.file(dir.join(format!("{}.pgm", args.out_prefix)), encode_pgm(&magnitude));
    out.file(dir.join(format!("{}.csv", args.out_prefix)), csv.into_bytes());
    out.commit(&manifest, &dir.join("tomo.manifest"))?;
    Ok(String::new())
}

fn insar(args: &crate::InsarArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let window = args.window.unwrap_or(cfg.insar_window);
    let mut manifest = Manifest::new("insar");
    let master = load_slc(&args.master, "master", &mut manifest)?;
    let slave = load_slc(&args.slave, "slave", &mut manifest)?;
    let ifg = interferogram_with_coherence(&master, &slave, window)?;
    let zero = ifg.coherence.zero_energy.as_slice().iter().filter(|&&z| z).count();
    if zero > 0 {
        log::warn!("{zero} pixels have a zero-energy coherence window");
    }

    manifest.param("window", window).param("zero_energy_pixels", zero);
    let dir = out_dir(cfg);
    let mut out = Outputs::new();
    out.real(dir.join(&args.out_phase), &ifg.phase, "phase");
    out.real(dir.join(&args.out_coh), &ifg.coherence.values, "coherence");
    out.commit(&manifest, &dir.join("insar.manifest"))?;
    Ok(String::new())
}

fn resolution(args: &crate::ResolutionArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let t = &cfg.tomo;
    let wavelength = match args.sound_wavelength {
        Some(w) => w,
        None => sound_wavelength(args.sound_speed.unwrap_or(t.sound_speed), args.freq.unwrap_or(t.freq))?,
    };
    let range = args.slant_range.or(t.slant_range).unwrap_or(cfg.radar.reference_range);
    let res = mmtomo::tomo::resolution(wavelength, range, args.aperture.unwrap_or(t.aperture))?;
    Ok(format!("{res:.3} m\n"))
}
