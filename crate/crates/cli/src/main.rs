mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmeasure::analysis::SigmaConvention;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qmeasure",
    version,
    about = "Quantum measures of histories: compute, simulate, analyze"
)]
pub struct Cli {
    /// JSON file with default settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure of an event under a hopper model.
    Measure(MeasureArgs),
    /// Port powers of an optical netlist, optionally swept over a phase plate.
    Simulate(SimulateArgs),
    /// Full analysis of recorded power traces.
    Analyze(AnalyzeArgs),
    /// Synthetic power traces with a known measure.
    Synth(SynthArgs),
    /// Distance of a median from a reference in units of its spread.
    Significance(SignificanceArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Model JSON; the balanced two-step model when omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Comma-separated histories, e.g. `00,01,11`. An empty string is the empty event.
    #[arg(long)]
    pub event: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Netlist JSON; the ideal event filter when omitted.
    #[arg(long, conflicts_with = "filter_params")]
    pub netlist: Option<PathBuf>,
    /// Parameter JSON for the built-in event filter.
    #[arg(long)]
    pub filter_params: Option<PathBuf>,
    /// Comma-separated path labels to block.
    #[arg(long, default_value = "")]
    pub block: String,
    /// Number of phase points in [0, 2π).
    #[arg(long)]
    pub sweep: Option<usize>,
    /// Phase plate varied by `--sweep`.
    #[arg(long, default_value = "gp")]
    pub sweep_component: String,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub window_seconds: Option<f64>,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sigma_convention: Option<SigmaConvention>,
    /// `ideal`, `bench`, or a noise-model JSON file.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub theory_draws: Option<usize>,
    /// Histogram bins; Freedman–Diaconis when omitted.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub mu_star: Option<f64>,
    #[arg(long)]
    pub noise_rel: Option<f64>,
    #[arg(long)]
    pub drift_rel: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub phase_offset: Option<f64>,
    #[arg(long)]
    pub phase_jitter: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SignificanceArgs {
    /// Report JSON from `analyze` supplying the median and spreads.
    #[arg(long, conflicts_with = "median")]
    pub report: Option<PathBuf>,
    #[arg(long, requires = "sigma_source")]
    pub median: Option<f64>,
    /// Symmetric spread used by every convention.
    #[arg(long, group = "sigma_source")]
    pub sigma: Option<f64>,
    #[arg(long, group = "sigma_source")]
    pub sigma_plus: Option<f64>,
    #[arg(long, group = "sigma_source")]
    pub sigma_minus: Option<f64>,
    #[arg(long, group = "sigma_source")]
    pub std_dev: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub reference: f64,
    #[arg(long)]
    pub sigma_convention: Option<SigmaConvention>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::new("usage", e.render().to_string().trim());
            eprintln!("{}", err.envelope());
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.envelope());
            ExitCode::FAILURE
        }
    }
}
