//! The `mzk` command line: configuration parsing, presets and subcommand dispatch.

mod commands;
mod config;
mod presets;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{simulate_config, SimulationSummary};
pub use config::{parse_config, read_config, E2Mode, InitialData, NMode, RunConfig};
pub use presets::{preset, PRESETS, PRESET_A, PRESET_B, PRESET_SELFSIMILAR};

use crate::output::to_json_string;

#[derive(Debug, Parser)]
#[command(name = "mzk", version, about = "Numerical laboratory for the 2D magnetic Zakharov system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the ground state Q and write its profile and summary.
    GroundState(GroundStateArgs),
    /// Run one or more configurations (files or presets).
    Simulate(SimulateArgs),
    /// Tabulate the scaling of the explicit self-similar family.
    Selfsimilar(SelfsimilarArgs),
    /// Check the rescaling identities on a directory of checkpoints.
    RescaleCheck(RescaleCheckArgs),
    /// Fit c/(T-t)^p to a diagnostics column and judge the lower bound.
    FitRate(FitRateArgs),
    /// Test the sharp Gagliardo-Nirenberg inequality on random fields and on Q.
    GnCheck(GnCheckArgs),
    /// Classify the initial data of a configuration.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct GroundStateArgs {
    #[arg(long, default_value_t = 20.0)]
    pub rmax: f64,
    #[arg(long, default_value_t = 4001)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Configuration files.
    pub configs: Vec<PathBuf>,
    /// Built-in configurations (a, b, selfsimilar); repeatable.
    #[arg(long = "preset")]
    pub presets: Vec<String>,
    /// Output directory; with several runs each gets a subdirectory named after
    /// its configured output_dir.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProfileChoice {
    /// Use (Q, -Q^2).
    Limit,
    /// Solve the profile equations (needs omega above the radial domain).
    Solve,
}

#[derive(Debug, Args)]
pub struct SelfsimilarArgs {
    #[arg(long)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_blow: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Grid size, `N` or `NXxNY`.
    #[arg(long, default_value = "256")]
    pub grid: String,
    /// Box side; defaults to 24 profile widths at the earliest time.
    #[arg(long)]
    pub side: Option<f64>,
    /// Comma-separated sample times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ProfileChoice::Limit)]
    pub profile: ProfileChoice,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RescaleCheckArgs {
    /// Directory holding MZKV1 checkpoints.
    pub dir: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// CSV destination (default: DIR/rescale_check.csv).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelChoice {
    Fixed,
    Free,
}

#[derive(Debug, Args)]
pub struct FitRateArgs {
    /// Diagnostics CSV written by `simulate`.
    pub csv: PathBuf,
    /// Column to fit: grad_E, n_norm or lambda.
    #[arg(long, default_value = "n_norm")]
    pub column: String,
    #[arg(long, value_enum, default_value_t = ModelChoice::Free)]
    pub model: ModelChoice,
    #[arg(long, default_value_t = 0.5)]
    pub tail_fraction: f64,
    /// Coupling of the run; with it the empirical constant c·(M - ‖Q‖²/(1+η))^{1/2} is reported.
    #[arg(long)]
    pub eta: Option<f64>,
    /// JSON destination (also printed to stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GnCheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 20.0)]
    pub side: f64,
    #[arg(long, default_value_t = 6)]
    pub max_mode: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Configuration file (or use --preset).
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Size the global worker pool from `MZK_THREADS` (unset or invalid: rayon's default).
fn init_threads() {
    if let Some(n) = std::env::var("MZK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if the pool already exists, which is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_threads();
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{}", to_json_string(&body).unwrap_or_else(|_| body.to_string()));
            1
        }
    }
}
