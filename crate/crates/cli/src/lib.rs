//! Config-driven experiments: parse a TOML config, run every trial, check
//! the requested certificates, and write CSV, JSON, and summary outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config, parse_config_str, parse_config_with, CertificateSpec, ExperimentConfig, Overrides};
pub use output::{emit_outputs, OutputPaths};
pub use run::{run_experiment, Report, RunOutput, TrialRecord, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, std::io::Error),
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error(transparent)]
    Core(#[from] lar_dynamics::Error),
    #[error("unknown preset {0:?}; available: {}", PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", "))]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Checked-in configs, one per acceptance scenario.
pub const PRESETS: &[(&str, &str)] = &[
    ("prop1-congestion", include_str!("../presets/prop1-congestion.toml")),
    ("high-probability-congestion", include_str!("../presets/high-probability-congestion.toml")),
    ("uniform-freeze", include_str!("../presets/uniform-freeze.toml")),
    ("dynamic-population", include_str!("../presets/dynamic-population.toml")),
];

pub fn preset(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|p| p.0 == name)
        .map(|p| p.1)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CERTIFICATE_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lar-sim", version, about = "Simulate learning dynamics in repeated games and certify the outcome")]
pub struct Args {
    /// Experiment config (TOML).
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of trials; overrides `trials`.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; overrides `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write every player's distribution per written round.
    #[arg(long)]
    pub dump_distributions: bool,
    /// Run a bundled config by name.
    #[arg(long)]
    pub preset: Option<String>,
}

/// Parses, runs, and writes outputs; returns the output report.
pub fn execute(args: &Args) -> Result<RunOutput> {
    let overrides = Overrides {
        trials: args.trials,
        seed: args.seed,
        out: args.out.clone(),
        dump_distributions: args.dump_distributions,
    };
    let config = match (&args.config, &args.preset) {
        (Some(path), _) => parse_config_with(path, &overrides)?,
        (None, Some(name)) => parse_config_str(preset(name)?, &overrides)?,
        (None, None) => return Err(CliError::Config(vec!["need --config or --preset".into()])),
    };
    let output = run_experiment(&config)?;
    emit_outputs(&output.trials, &output.report, &OutputPaths::in_dir(&config.output.dir))?;
    Ok(output)
}

/// Entry point shared by the binary and tests. Returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    match execute(&args) {
        Ok(output) => {
            print!("{}", output::summary_text(&output.report));
            if output.passed() {
                EXIT_PASS
            } else {
                EXIT_CERTIFICATE_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
