//! The `spfp` command-line driver.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
//! error.

mod commands;
mod config;

pub use commands::{
    cmd_diagnose, cmd_evaluate, cmd_partition, cmd_stats, IndependenceArtifact, MetricsArtifact,
    SplitArtifact, StatsConfig, VerdictsArtifact, ViewStatsArtifact, ViewsArtifact,
};
pub use config::RunConfig;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::dataset::{Discretizer, MissingPolicy};
use crate::spfp::RelevanceCorrelation;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spfp", version, about = "Semantic-preserving feature partitioning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split the data and build the views on the training rows.
    Partition(PartitionArgs),
    /// Train per-view models, build the ensembles and score them.
    Evaluate(EvaluateArgs),
    /// Pairwise conditional dependence of the views given the target.
    Diagnose(DiagnoseArgs),
    /// Friedman, Conover and Cliff's delta comparisons against a benchmark.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// JSON run configuration; flags given alongside override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Target column name or zero-based index.
    #[arg(long)]
    pub target: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Missing-cell policy: reject, drop_rows or median.
    #[arg(long)]
    pub missing: Option<MissingPolicy>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Number of views.
    #[arg(long)]
    pub views: Option<usize>,
    /// Minimum view size as a fraction of the feature count.
    #[arg(long, conflicts_with = "min_count")]
    pub min_frac: Option<f64>,
    /// Minimum view size as a feature count.
    #[arg(long)]
    pub min_count: Option<usize>,
    /// Fraction of each view removed from the feature space.
    #[arg(long)]
    pub remove_frac: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// equal_frequency, equal_width or passthrough_if_integral.
    #[arg(long)]
    pub discretizer: Option<Discretizer>,
    /// Relative tolerance of the entropy stopping criteria.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Target encoding for the correlation term: class_code or max_ovr.
    #[arg(long)]
    pub correlation: Option<RelevanceCorrelation>,
    /// Seed of the feature-removal draws.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of the train/test split and the validation hold-out.
    #[arg(long)]
    pub split_seed: Option<u64>,
    /// Share of rows held out for testing.
    #[arg(long)]
    pub test_frac: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Views file; defaults to `<out>/views.json`.
    #[arg(long)]
    pub views_file: Option<PathBuf>,
    /// Directory of `theta_<g>.csv` and `All.csv` test probabilities, with
    /// optional `theta_<g>.val.csv` validation probabilities for the weights.
    #[arg(long)]
    pub import_proba: Option<PathBuf>,
    /// L2 penalty of the builtin logistic regression.
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Share of training rows held out to measure member AUCs.
    #[arg(long)]
    pub validation_frac: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Views file; defaults to `<out>/views.json`.
    #[arg(long)]
    pub views_file: Option<PathBuf>,
    /// Conditional mutual information above this counts as dependence.
    #[arg(long, default_value_t = 1e-9)]
    pub cmi_tolerance: f64,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Directories holding one `<metric>.csv` run matrix per metric (runs as
    /// rows, models as columns). Repeat for several datasets.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value = "spfp-out")]
    pub out: PathBuf,
    /// Column every other model is compared against.
    #[arg(long, default_value = "All")]
    pub benchmark: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap replicates for the Cliff's delta interval.
    #[arg(long, default_value_t = 10_000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Metrics where smaller values are better.
    #[arg(long, value_delimiter = ',', default_value = "log_loss,mec,time")]
    pub lower_is_better: Vec<String>,
    /// Metrics left out of the Bonferroni family.
    #[arg(long, value_delimiter = ',', default_value = "time")]
    pub outside_family: Vec<String>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Partition(a) => cmd_partition(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Diagnose(a) => cmd_diagnose(&a),
        Command::Stats(a) => cmd_stats(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
