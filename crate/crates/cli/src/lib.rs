//! Batch experiments over the geometric-gate simulator: pulse synthesis,
//! process tomography, randomized benchmarking, and a self-test.

pub mod commands;
pub mod config;
pub mod selftest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use geomgate::tomography::MeasurementMode;

pub use config::ExperimentConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_FIT: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    /// A decay fit failed; `output` holds what was printed before the failure.
    #[error("fit failed: {message}")]
    Fit { message: String, output: String },
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("{0}")]
    Simulation(geomgate::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Fit { .. } => EXIT_FIT,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Simulation(_) | CliError::Io { .. } => EXIT_RUNTIME,
        }
    }
}

impl From<geomgate::Error> for CliError {
    fn from(e: geomgate::Error) -> Self {
        use geomgate::Error as E;
        match e {
            E::InvalidConfig(_)
            | E::InvalidDevice(_)
            | E::InvalidGateSpec(_)
            | E::UnknownGateName(_)
            | E::InvalidDuration(_)
            | E::StepTooLarge { .. } => CliError::Config(e.to_string()),
            E::FitDiverged { .. } => CliError::Fit { message: e.to_string(), output: String::new() },
            other => CliError::Simulation(other),
        }
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

#[derive(Debug, Parser)]
#[command(name = "geomgate", version, about = "Nonadiabatic geometric single-qubit gates: synthesis, QPT and RB")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON experiment configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "GEOMGATE_OUT", default_value = "geomgate-out")]
    pub out: PathBuf,

    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// `exact` or `shots:<n>`, overriding the config.
    #[arg(long, global = true, value_parser = parse_mode)]
    pub mode: Option<MeasurementMode>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize one gate, write its schedule and Bloch path, print its phases.
    Synth,
    /// Process tomography of the configured gates.
    Qpt,
    /// Reference and interleaved randomized benchmarking.
    Rb,
    /// Reduced-scale invariant checks of every module.
    Selftest {
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<selftest::Fault>,
    },
}

fn parse_mode(s: &str) -> Result<MeasurementMode, String> {
    s.parse().map_err(|e: geomgate::Error| e.to_string())
}

/// Loads the config and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a parsed command line; returns the text for standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    if let Command::Selftest { inject_fault } = &cli.command {
        let report = selftest::run_selftest(cli.seed.unwrap_or(0), *inject_fault);
        let text = report.render();
        return if report.passed() { Ok(text) } else { Err(CliError::Invariant(text)) };
    }
    let cfg = resolve_config(cli)?;
    std::fs::create_dir_all(&cli.out).map_err(|source| CliError::Io { path: cli.out.clone(), source })?;
    write_file(&cli.out, "config.json", &cfg.to_json())?;
    match cli.command {
        Command::Synth => commands::cmd_synth(&cfg, &cli.out),
        Command::Qpt => commands::cmd_qpt(&cfg, &cli.out),
        Command::Rb => commands::cmd_rb(&cfg, &cli.out),
        Command::Selftest { .. } => unreachable!("handled above"),
    }
}
