//! Command-line pipelines over the `mmtomo` library.
//!
//! Every subcommand reads an optional `--config` file (see [`config`]),
//! applies flag overrides, validates, computes in memory and only then
//! writes its artifacts plus a `<stage>.manifest` into the output
//! directory. Failures print one `error kind=... msg="..."` line and exit
//! with 2 (config), 3 (I/O) or 4 (numeric).

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod pgm;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "MMTOMO_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "mmtomo", version, about = "SAR sub-aperture micro-motion tomography pipelines")]
pub struct Cli {
    /// Pipeline config file (key = value lines with [sections]).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for the parallel stages; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for stochastic stages.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving artifacts and manifests.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a focused SLC from a scene file.
    Simulate(SimulateArgs),
    /// Integrate the oscillator and write its trajectory.
    Oscillate(OscillateArgs),
    /// Split an SLC into master/slave Doppler sub-apertures.
    Subap(SubapArgs),
    /// Track per-band shifts at listed pixels.
    Coreg(CoregArgs),
    /// Depth-focus a line of pixels.
    Tomo(TomoArgs),
    /// Interferometric phase and coherence of an SLC pair.
    Insar(InsarArgs),
    /// Print the depth resolution of the tomographic geometry.
    Resolution(ResolutionArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long)]
    pub oversample: Option<f64>,
    #[arg(long)]
    pub n_pulses: Option<usize>,
    /// Adds seeded complex white noise at this SNR.
    #[arg(long)]
    pub noise_snr_db: Option<f64>,
    /// Output SLC, relative to the output directory.
    #[arg(long, default_value = "scene.slc")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OscillateArgs {
    #[arg(long)]
    pub t_span: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Drop the cubic term.
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub damping: Option<f64>,
    /// Amplitude of a cosine force along the range axis.
    #[arg(long)]
    pub forcing_amplitude: Option<f64>,
    /// Angular frequency of the force, rad/s.
    #[arg(long)]
    pub forcing_frequency: Option<f64>,
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SubapArgs {
    #[arg(long)]
    pub slc: PathBuf,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub reserved: Option<f64>,
    /// rectangular or raised-cosine.
    #[arg(long)]
    pub taper: Option<String>,
}

#[derive(Debug, Args)]
pub struct CoregArgs {
    /// Bank manifest written by `subap`.
    #[arg(long)]
    pub bank: PathBuf,
    /// CSV of `row,col` pixels.
    #[arg(long)]
    pub pixels: PathBuf,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub oversample: Option<usize>,
    #[arg(long, default_value = "tracks.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TomoArgs {
    #[arg(long)]
    pub slc: PathBuf,
    /// CSV of `row,col` pixels forming the tomographic line.
    #[arg(long)]
    pub line: PathBuf,
    #[arg(long)]
    pub zmin: Option<f64>,
    #[arg(long)]
    pub zmax: Option<f64>,
    #[arg(long)]
    pub zstep: Option<f64>,
    #[arg(long)]
    pub aperture: Option<f64>,
    #[arg(long)]
    pub sound_speed: Option<f64>,
    #[arg(long)]
    pub freq: Option<f64>,
    /// matched or pinv.
    #[arg(long)]
    pub mode: Option<String>,
    /// Tikhonov weight for pinv.
    #[arg(long)]
    pub reg: Option<f64>,
    #[arg(long)]
    pub slant_range: Option<f64>,
    #[arg(long)]
    pub incidence_deg: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub reserved: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub oversample: Option<usize>,
    /// Prefix of the `.pgm` and `.csv` outputs.
    #[arg(long, default_value = "tomogram")]
    pub out_prefix: String,
}

#[derive(Debug, Args)]
pub struct InsarArgs {
    #[arg(long)]
    pub master: PathBuf,
    #[arg(long)]
    pub slave: PathBuf,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value = "phase.raw")]
    pub out_phase: PathBuf,
    #[arg(long, default_value = "coherence.raw")]
    pub out_coh: PathBuf,
}

#[derive(Debug, Args)]
pub struct ResolutionArgs {
    /// Sound wavelength, m; overrides speed / frequency.
    #[arg(long)]
    pub sound_wavelength: Option<f64>,
    #[arg(long)]
    pub sound_speed: Option<f64>,
    #[arg(long)]
    pub freq: Option<f64>,
    #[arg(long)]
    pub slant_range: Option<f64>,
    #[arg(long)]
    pub aperture: Option<f64>,
}

fn load_config(cli: &Cli) -> CliResult<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output_dir = Some(dir.clone());
    }
    Ok(cfg)
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs a parsed command line, returning what it printed to stdout.
pub fn execute(cli: &Cli) -> CliResult<String> {
    configure_threads(cli.threads)?;
    let cfg = load_config(cli)?;
    commands::run_subcommand(&cli.command, &cfg)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

/// Full entry point: parses `args`, runs, prints and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            emit(&e.to_string());
            return 0;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::config(first));
            return error::Kind::Config.exit_code();
        }
    };
    match execute(&cli) {
        Ok(stdout) => {
            emit(&stdout);
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.kind.exit_code()
        }
    }
}
