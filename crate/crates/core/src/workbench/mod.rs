//! Batch command-line workbench.
//!
//! Every option has a flag; `--config <file.toml>` supplies defaults for any
//! of them, and flags win. Exit status: 0 success, 2 usage or configuration
//! error, 3 numerical failure, 4 data error.

mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
pub use commands::execute;
pub use config::{parse_gen, parse_measure, FileConfig, GenMethod, RunConfig};
pub use report::{format_float, Cell, Report, Table};

#[derive(Debug, Parser)]
#[command(
    name = "cohcapm",
    version,
    about = "Spectral risk, coherent CAPM and contact-measure pricing on scenario sets"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with defaults for any option below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Return CSV: `date,<asset>,...`.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Label of the index column.
    #[arg(long, global = true)]
    pub index: Option<String>,
    /// Per-period risk-free rate [default: 0].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rf: Option<f64>,
    /// tail:<λ> | alpha:<α> | beta:<α>,<β> | atomic:<λ1>=<w1>,... [default: tail:0.05]
    #[arg(long, global = true)]
    pub measure: Option<String>,
    /// hist | whist:<λ> | boot:<n>,<T>[,<λ>] | mc[:<T>] [default: hist]
    #[arg(long, global = true)]
    pub gen: Option<String>,
    /// Seed for every random draw [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Spot prices, comma-separated; one value is used for every asset [default: 1].
    #[arg(long, global = true)]
    pub spot: Option<String>,
    /// Comma-separated output.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral risk of each asset and of a portfolio.
    Risk(RiskArgs),
    /// Risk contributions against the index and reward estimates.
    Contrib(ContribArgs),
    /// Optimal strategy, reward/risk ratio, SML residuals, frontier.
    Optimize(OptimizeArgs),
    /// Betas, SML residuals and the contact-measure check at the optimum.
    Sml(SolveArgs),
    /// Equilibrium reward/risk ratio and agent allocations.
    Equilibrium(EquilibriumArgs),
    /// Contact-measure price, spot sensitivity and risk adjustment.
    Price(PriceArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RiskArgs {
    /// Portfolio weights on asset returns, comma-separated.
    #[arg(long, allow_negative_numbers = true)]
    pub portfolio: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ContribArgs {
    /// Monte Carlo groups for integer Alpha/Beta measures [default: 20000].
    #[arg(long)]
    pub groups: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolveArgs {
    /// Relative optimality gap [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration budget [default: 50000].
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Risk levels for the frontier table [default: 0.5,1,2].
    #[arg(long)]
    pub levels: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EquilibriumArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Agents CSV: `endowment,aversion`.
    #[arg(long)]
    pub economy: Option<PathBuf>,
    /// Market holdings in shares [default: the optimal strategy].
    #[arg(long, allow_negative_numbers = true)]
    pub market: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// call:<K> | put:<K> | const:<c> | linear | table:<csv>
    #[arg(long)]
    pub payoff: Option<String>,
    /// Underlier label [default: first asset].
    #[arg(long)]
    pub underlier: Option<String>,
    /// Reward/risk ratio; solved for when absent.
    #[arg(long)]
    pub rstar: Option<f64>,
    /// Monte Carlo groups for integer Alpha/Beta measures [default: 20000].
    #[arg(long)]
    pub groups: Option<usize>,
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Domain(_)
        | Error::InvalidInput(_)
        | Error::MissingIndex
        | Error::LengthMismatch { .. }
        | Error::ModeMismatch(_) => 2,
        Error::NonConvergence { .. } | Error::RiskNeutrality { .. } | Error::ZeroDenominator(_) => 3,
        Error::Parse { .. }
        | Error::EmptyData(_)
        | Error::NonFinite { .. }
        | Error::Io(_)
        | Error::Sampler { .. }
        | Error::Unbounded(_)
        | Error::DegenerateReward
        | Error::AbsoluteContinuity { .. } => 4,
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the process exit status.
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
    match execute(&cli).and_then(|(cfg, report)| emit(&cfg, &report)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(cfg: &RunConfig, report: &Report) -> Result<()> {
    let text = report.render(cfg.csv);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
