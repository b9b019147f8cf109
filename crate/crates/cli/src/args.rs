use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "seesaw", version, about = "Long-run performance and optimal hurdle rates for A/B tests with spillovers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form long-run performance at a hurdle.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        hurdle: HurdleArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Whether a zero hurdle falls in the seesaw region.
    Region {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal hurdle rate.
    Optimize {
        #[command(flatten)]
        model: ModelArgs,
        /// Also maximize numerically and report the distance to the formula.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo simulation of the adoption process.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        hurdle: HurdleArgs,
        /// Use the closed-form optimal hurdle instead of --z.
        #[arg(long, conflicts_with_all = ["z", "z_u", "z_v"])]
        optimal: bool,
        /// Periods per replication.
        #[arg(long)]
        horizon: Option<u64>,
        /// Independent replications.
        #[arg(long)]
        batch: Option<u32>,
        /// Comma-separated periods at which to report the running mean.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
        /// Write the first replication's trajectory as CSV.
        #[arg(long, value_name = "PATH")]
        trajectory: Option<PathBuf>,
        /// Write one historical record per period as CSV (two-dimensional regimes).
        #[arg(long, value_name = "PATH")]
        records: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seesaw correlation thresholds over a signal-to-noise grid, normal and t.
    Figure2 {
        #[arg(long, default_value_t = 0.05)]
        alpha_min: f64,
        #[arg(long, default_value_t = 3.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha_step: f64,
        /// Comma-separated t degrees of freedom, each > 2.
        #[arg(long, value_delimiter = ',', default_values_t = [2.5, 3.0, 5.0, 10.0, 30.0])]
        deltas: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recommend a hurdle from historical test records.
    Recommend {
        /// CSV with columns test_id,primary_dim,primary_effect[,secondary_effect[,adopted]].
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// sym pools both dimensions; asym estimates each separately.
        #[arg(long, value_enum, default_value_t = RecommendRegimeArg::Sym)]
        regime: RecommendRegimeArg,
        /// Require only a negative sum of mean effects.
        #[arg(long)]
        relaxed: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Sym,
    Asym,
    Multi,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecommendRegimeArg {
    Sym,
    Asym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    /// key = value file with a [regime] header; flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_v: Option<f64>,
    /// Probability that a test targets dimension u (default 0.5).
    #[arg(long, allow_negative_numbers = true)]
    pub p_u: Option<f64>,
    /// Number of dimensions (multi regime).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated priority probabilities (multi regime; default uniform).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub priority_probs: Option<Vec<f64>>,
    /// Degrees of freedom (t regime).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Require only a negative sum of mean effects (asym regime).
    #[arg(long)]
    pub relaxed: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct HurdleArgs {
    /// Common hurdle.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["z_u", "z_v"])]
    pub z: Option<f64>,
    /// Hurdle when u is the priority.
    #[arg(long, allow_negative_numbers = true, requires = "z_v")]
    pub z_u: Option<f64>,
    /// Hurdle when v is the priority.
    #[arg(long, allow_negative_numbers = true, requires = "z_u")]
    pub z_v: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
