//! Command-line orchestration: one TOML config drives one subcommand.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{EnergyRange, ExperimentConfig, Format, ModelSection, OutputSection, RunSection};
pub use run::{
    badset_reports, execute, greens_report, lyapunov_sweep, msa_reports, spectrum_report, Command,
    GreensReport, RunManifest, StageTiming, MANIFEST,
};

#[derive(Debug, Parser)]
#[command(
    name = "quasiloc",
    version,
    about = "Numerical laboratory for quasi-periodic operators with degenerate weights"
)]
pub struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    pub command: Command,
    /// TOML experiment configuration.
    #[arg(short, long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Worker threads; overrides `run.workers`.
    #[arg(short, long)]
    pub workers: Option<usize>,
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(manifest) => {
            log::info!("wrote {} files", manifest.outputs.len() + 1);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_cli(cli: &Cli) -> crate::Result<RunManifest> {
    let config = ExperimentConfig::load(&cli.config)?;
    let out = cli
        .output
        .clone()
        .unwrap_or_else(|| config.output.directory.clone());
    let workers = cli
        .workers
        .or(config.run.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(crate::Error::config("workers", "must be at least 1"));
    }
    execute(cli.command, &config, &out, workers)
}
