use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Robust linear regression with per-observation outlier probabilities.
#[derive(Debug, Parser)]
#[command(name = "nflp", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a linear model and report coefficients, intervals and outliers.
    Fit(FitArgs),
    /// One-way ANOVA on a response split by a group column.
    Anova(GroupArgs),
    /// Two-sample t-test on a response split by a two-level group column.
    Ttest(GroupArgs),
    /// Print the mixture shape constants for a normal-component weight.
    Dist(DistArgs),
    /// Run a Monte Carlo contamination experiment from a JSON spec file.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Estimator settings. Each one overrides the config file.
#[derive(Debug, Default, Args)]
pub struct FitFlags {
    #[arg(long, env = "NFLP_SEED")]
    pub seed: Option<u64>,
    /// Solutions with omega at or below this floor are never selected.
    #[arg(long, env = "NFLP_MIN_OMEGA")]
    pub min_omega: Option<f64>,
    /// Number of robust starts besides the least-squares start.
    #[arg(long, env = "NFLP_STARTS")]
    pub starts: Option<usize>,
    #[arg(long, env = "NFLP_INIT_OMEGA")]
    pub init_omega: Option<f64>,
    /// EM convergence tolerance.
    #[arg(long, env = "NFLP_TOL")]
    pub tol: Option<f64>,
    #[arg(long, env = "NFLP_MAX_ITERATIONS")]
    pub max_iterations: Option<usize>,
    #[arg(long, env = "NFLP_DEDUP_TOL")]
    pub dedup_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON file with defaults for any of these options.
    #[arg(long, env = "NFLP_CONFIG")]
    pub config: Option<PathBuf>,
    /// CSV file with a header row.
    #[arg(long, env = "NFLP_INPUT")]
    pub input: Option<PathBuf>,
    #[arg(long, env = "NFLP_RESPONSE")]
    pub response: Option<String>,
    #[arg(long, env = "NFLP_ALPHA")]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, env = "NFLP_FORMAT")]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, env = "NFLP_OUTPUT")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitFlags,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated covariate columns. Omitted means a location model.
    #[arg(long, env = "NFLP_COVARIATES", value_delimiter = ',')]
    pub covariates: Option<Vec<String>>,
    #[arg(long, env = "NFLP_NO_INTERCEPT")]
    pub no_intercept: bool,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Column whose values label the groups.
    #[arg(long, env = "NFLP_GROUP")]
    pub group: Option<String>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Weight of the normal component, in (0, 1].
    pub omega: f64,
    #[arg(long, value_enum, env = "NFLP_FORMAT", default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file: scenario fields plus an optional `grid` object.
    #[arg(long, env = "NFLP_SPEC")]
    pub spec: PathBuf,
    #[arg(long, env = "NFLP_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "NFLP_REPLICATIONS")]
    pub replications: Option<usize>,
    #[arg(long, value_enum, env = "NFLP_FORMAT", default_value = "json")]
    pub format: Format,
    /// Directory that receives `results.csv` and `summary.json`.
    #[arg(long, env = "NFLP_OUTPUT")]
    pub output: Option<PathBuf>,
}
