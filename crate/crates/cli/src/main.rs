//! `audience`: simulate data, mine frequent itemsets, build stores, forecast
//! targets and run the evaluation benchmark.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use audience_core::copula::{CorrelationLevel, MarginalShape, TimestampPlan};
use audience_core::mining::{Algorithm, Threshold};
use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values: exit code 2.
    Usage(String),
    /// Anything that went wrong while running: exit code 1.
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "audience", version, about = "Audience size forecasting from frequent itemsets")]
pub struct Cli {
    /// `key=value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic transaction log from a Gaussian copula scenario.
    Simulate(SimulateArgs),
    /// Mine frequent itemsets and report work counters and timing.
    Mine(MineArgs),
    /// Mine a training window and fit the univariate forecasters.
    BuildStore(BuildStoreArgs),
    /// Forecast one target from a saved store.
    Forecast(ForecastArgs),
    /// Train on six days, test on the seventh and write MAPE reports.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of attributes: 8, 16 or 32 unless --attrs-any.
    #[arg(long)]
    pub attrs: Option<usize>,
    /// Allow any positive attribute count.
    #[arg(long)]
    pub attrs_any: bool,
    /// high or low.
    #[arg(long)]
    pub corr: Option<CorrelationLevel>,
    /// steep or flat.
    #[arg(long)]
    pub marginals: Option<MarginalShape>,
    /// Values per attribute (default 8).
    #[arg(long)]
    pub values: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// uniform[:START:END] or daily-sine[:START:DAYS:AMPLITUDE].
    #[arg(long)]
    pub timestamps: Option<TimestampPlan>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// apriori, apriori-cc, eclat, eclat-cc or fp-growth; repeat to compare.
    #[arg(long = "algo")]
    pub algos: Vec<Algorithm>,
    /// `N%` of the row count (rounded up) or an absolute count.
    #[arg(long)]
    pub support: Option<Threshold>,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest itemset size to report.
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Time repeated runs and report the mean.
    #[arg(long)]
    pub bench: bool,
    #[arg(long)]
    pub runs: Option<usize>,
    /// One untimed run per algorithm before timing.
    #[arg(long)]
    pub warmup: bool,
}

#[derive(Debug, Args)]
pub struct BuildStoreArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Store threshold: `N%` of training rows or an absolute count.
    #[arg(long)]
    pub support: Option<Threshold>,
    /// Training window start (epoch seconds); defaults to the first event's hour.
    #[arg(long)]
    pub train_start: Option<i64>,
    /// Training window end; defaults to six days after the start.
    #[arg(long)]
    pub train_end: Option<i64>,
    #[arg(long)]
    pub fis_out: Option<PathBuf>,
    #[arg(long)]
    pub params_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[arg(long)]
    pub fis: Option<PathBuf>,
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// `attr=value,attr=value`; omitted attributes are wildcards, `*` is everyone.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub hours: Option<usize>,
    /// Horizon start (epoch seconds); defaults to the end of the training window.
    #[arg(long)]
    pub start: Option<i64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Store threshold (default 0.01%).
    #[arg(long)]
    pub support: Option<Threshold>,
    /// Absolute threshold for infrequent-itemset discovery (default a tenth of the store threshold).
    #[arg(long)]
    pub ifis_support: Option<u64>,
    #[arg(long)]
    pub fis_count: Option<usize>,
    #[arg(long)]
    pub ifis_count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Share threshold of the FB baseline (default 0.005).
    #[arg(long)]
    pub fb_threshold: Option<f64>,
    /// First second of day one.
    #[arg(long)]
    pub start: Option<i64>,
    /// Skip the per-target series baseline.
    #[arg(long)]
    pub no_ts: bool,
    /// Directory for mape.csv, detail.csv, summary.txt and estimates.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
