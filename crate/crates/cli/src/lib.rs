//! Command-line front end for the distributed CNOT model: benchmark
//! reproduction, cooperativity sweeps to CSV, and herald truth tables.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod format;

pub use config::{Overrides, SweepConfig, Variant};

/// Exit status for a run whose numbers fall outside their tolerance.
pub const EXIT_TOLERANCE: u8 = 1;
/// Exit status for unreadable or invalid configuration.
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("model error: {0}")]
    Model(#[from] pdcnot_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => EXIT_TOLERANCE,
            _ => EXIT_CONFIG,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "pdcnot", version, about = "Parallel distributed CNOT gates between dual-species emitters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Averages at the benchmark point, checked against the published values.
    ReproduceBenchmark(CommonArgs),
    /// Average fidelity and efficiency over a parameter grid, as CSV.
    Sweep(CommonArgs),
    /// Corrected-output fidelity for every basis input and herald outcome.
    Truthtable(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Force ideal reflections r = (1, −1) at both nodes.
    #[arg(long)]
    pub ideal: bool,
    /// Gauss–Legendre nodes per amplitude dimension.
    #[arg(long, value_name = "N")]
    pub nodes: Option<usize>,
    /// Output file (CSV for sweep and truthtable, JSON for reproduce-benchmark).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Worker threads for grid evaluation; 0 or unset uses all cores.
    #[arg(long, value_name = "N", env = "SIM_THREADS")]
    pub threads: Option<usize>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<SweepConfig, CliError> {
        let over = Overrides {
            ideal: self.ideal,
            nodes: self.nodes,
            out: self.out.clone(),
            variant: self.variant,
        };
        SweepConfig::resolve(self.config.as_deref(), &over)
    }
}

/// Runs a parsed command, printing the report to stdout.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::ReproduceBenchmark(args) => {
            let cfg = args.resolve()?;
            commands::reproduce_benchmark(&cfg, &mut stdout)
        }
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            commands::sweep(&cfg, args.threads, &mut stdout)
        }
        Command::Truthtable(args) => {
            let cfg = args.resolve()?;
            commands::truthtable(&cfg, &mut stdout)
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdcnot: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
