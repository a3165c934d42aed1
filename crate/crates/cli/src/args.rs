//! Command-line arguments.
//!
//! Every option may also be given in a `--config` file as `key = value`
//! with the flag's long name as key. Flags win over the file, and the file
//! wins over the built-in defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "expexp",
    version,
    about = "Expected-exposure evaluation and training for stochastic rankers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-query EE-L/EE-D/EE-R of one policy (at each grid value for pl/rt).
    Eval(EvalArgs),
    /// Disparity-relevance curves and EE-AUC over a randomization grid.
    Sweep(EvalArgs),
    /// Synthetic runs, qrels, feature and group files.
    Synth(SynthArgs),
    /// Train scorers on a feature file and compare their EE-AUC.
    Train(TrainArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Key-value config file; keys are long flag names
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every random stream [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: out]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Browsing model: rbp or err [default: rbp]
    #[arg(long)]
    pub model: Option<String>,
    /// Patience γ [default: 0.5]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Evaluation depth δ; 0 disables the cutoff [default: 20]
    #[arg(long)]
    pub depth: Option<usize>,
    /// ERR stop probability per grade, comma-separated from grade 0
    /// [default: (2^g - 1) / 2^max_grade]
    #[arg(long, value_name = "LIST")]
    pub phi: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// TREC run file
    #[arg(long, value_name = "FILE")]
    pub run: Option<PathBuf>,
    /// TREC qrels file
    #[arg(long, value_name = "FILE")]
    pub qrels: Option<PathBuf>,
    /// Policy: det, pl, rt or oracle (sweep: pl, rt or a comma list)
    /// [default: det for eval, pl for sweep]
    #[arg(long)]
    pub policy: Option<String>,
    /// Comma-separated α (pl) or β (rt) values [default: per family]
    #[arg(long, value_name = "LIST")]
    pub grid: Option<String>,
    /// Sampled rankings per policy setting [default: 50]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Only the top documents of the run are randomized [default: 100]
    #[arg(long)]
    pub rerank_depth: Option<usize>,
    /// Also write expected static RBP/ERR to static.csv
    #[arg(long)]
    pub static_metrics: bool,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Queries in the synthetic run [default: 10]
    #[arg(long)]
    pub n_queries: Option<usize>,
    /// Documents per query in the synthetic run [default: 100]
    #[arg(long)]
    pub pool_size: Option<usize>,
    /// Documents per grade, comma-separated from grade 0 (grade 0 takes
    /// the rest of the pool) [default: 0,10]
    #[arg(long, value_name = "LIST", conflicts_with = "grade_dist")]
    pub grades: Option<String>,
    /// Grade probabilities, comma-separated from grade 0
    #[arg(long, value_name = "LIST")]
    pub grade_dist: Option<String>,
    /// Standard deviation of the noise added to score = grade [default: 0]
    #[arg(long)]
    pub noise: Option<f64>,
    /// Run tag [default: synth]
    #[arg(long)]
    pub tag: Option<String>,
    /// Learning-to-rank queries; 0 skips features.txt [default: 250]
    #[arg(long)]
    pub ltr_queries: Option<usize>,
    /// Documents per learning-to-rank query [default: 20]
    #[arg(long)]
    pub ltr_docs: Option<usize>,
    /// Feature dimension [default: 10]
    #[arg(long)]
    pub ltr_features: Option<usize>,
    /// Latent relevance noise [default: 0.1]
    #[arg(long)]
    pub ltr_noise: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// SVMlight feature file with graded labels
    #[arg(long, value_name = "FILE")]
    pub features: Option<PathBuf>,
    /// Group file: `query doc group` per line
    #[arg(long, value_name = "FILE")]
    pub groups: Option<PathBuf>,
    /// Comma list of ee, group, pointwise, pairwise [default: ee]
    #[arg(long, value_name = "LIST")]
    pub objective: Option<String>,
    /// λ values for ee/group; one model per value
    /// [default: 0,0.1,...,1]
    #[arg(long, value_name = "LIST")]
    pub lambda: Option<String>,
    /// Softmax temperatures for pointwise/pairwise; inf is uniform
    /// [default: 0.001,0.01,0.1,1,10,100,1000,inf]
    #[arg(long, value_name = "LIST")]
    pub grid: Option<String>,
    /// Sampled rankings per evaluation point (ñ_test) [default: 50]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Gumbel samples per query per step (ñ_train) [default: 20]
    #[arg(long)]
    pub train_samples: Option<usize>,
    /// Smooth-rank temperature τ [default: 0.1]
    #[arg(long)]
    pub tau: Option<f64>,
    /// [default: 0.001]
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// [default: 0.1]
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Hidden layer widths, comma-separated; empty for linear
    /// [default: 256,256]
    #[arg(long, value_name = "LIST")]
    pub hidden: Option<String>,
    /// Optimizer: sgd, momentum or adam [default: sgd]
    #[arg(long)]
    pub optimizer: Option<String>,
    /// [default: 100]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Epochs without validation improvement before stopping [default: 10]
    #[arg(long)]
    pub patience: Option<usize>,
    /// Train and validation fractions; the rest is the test split
    /// [default: 0.6,0.2]
    #[arg(long, value_name = "LIST")]
    pub split: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}
