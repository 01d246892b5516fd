use std::path::PathBuf;
use std::process::ExitCode;

use attnet::data::pipeline::{DEFAULT_MIN_CASES, DEFAULT_MISSING_THRESHOLD};
use attnet::simulation::gibbs::{DEFAULT_BURN_IN, DEFAULT_SEED, DEFAULT_THINNING};
use attnet::{EdgeRule, ErrorClass, EstimationConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "attnet", version, about = "Estimate and analyse Ising attitude networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate one network per group from survey responses.
    Estimate(EstimateArgs),
    /// Path-length connectivity of estimated networks.
    Metrics(MetricsArgs),
    /// ANCOVA, pairwise contrasts and strength correlations over a
    /// group-record table.
    Compare(CompareArgs),
    /// Draw binary data from a network; optionally run the perturbation
    /// experiment.
    Simulate(SimulateArgs),
    /// Run the whole chain over the cohorts listed in a manifest.
    Replicate(ReplicateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    And,
    Or,
}

#[derive(Debug, Args)]
struct EstimationArgs {
    /// EBIC hyperparameter.
    #[arg(long, default_value_t = 0.25)]
    gamma: f64,
    #[arg(long, value_enum, default_value = "and")]
    edge_rule: RuleArg,
    /// Number of penalty values on the path.
    #[arg(long, default_value_t = 100)]
    lambda_count: usize,
    /// Smallest penalty as a fraction of the largest.
    #[arg(long, default_value_t = 0.01)]
    lambda_ratio: f64,
}

impl EstimationArgs {
    fn config(&self) -> EstimationConfig {
        EstimationConfig {
            gamma: self.gamma,
            n_lambda: self.lambda_count,
            lambda_ratio: self.lambda_ratio,
            edge_rule: match self.edge_rule {
                RuleArg::And => EdgeRule::And,
                RuleArg::Or => EdgeRule::Or,
            },
            ..EstimationConfig::default()
        }
    }
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Minimum complete cases per group [default: 50].
    #[arg(long)]
    min_group_size: Option<usize>,
    /// Drop variables whose missing fraction exceeds this [default: 0.10].
    #[arg(long)]
    missing_threshold: Option<f64>,
    /// Decide variable exclusions on the whole sample before splitting
    /// into groups.
    #[arg(long)]
    global_exclusion: bool,
}

impl PipelineArgs {
    fn min_cases(&self) -> usize {
        self.min_group_size.unwrap_or(DEFAULT_MIN_CASES)
    }

    fn threshold(&self) -> f64 {
        self.missing_threshold.unwrap_or(DEFAULT_MISSING_THRESHOLD)
    }
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Survey responses (CSV).
    #[arg(long)]
    input: PathBuf,
    /// Column declarations (JSON).
    #[arg(long)]
    schema: PathBuf,
    /// Group variable and value-to-label mapping (JSON).
    #[arg(long)]
    grouping: Option<PathBuf>,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Network JSON files.
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Cohort to network-file mapping (JSON); adds per-cohort z-scores.
    #[arg(long)]
    cohorts: Option<PathBuf>,
    /// Also write each network's distance matrix.
    #[arg(long)]
    distances: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Group-record table (CSV).
    #[arg(long)]
    input: PathBuf,
    /// Group levels in factor order, comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<String>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Network JSON.
    #[arg(long)]
    input: PathBuf,
    /// Samples to draw.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long, default_value_t = DEFAULT_THINNING)]
    thinning: usize,
    /// Also run the perturbation experiment.
    #[arg(long)]
    perturb: bool,
    /// Clamp trials in the perturbation experiment.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReplicateArgs {
    /// Cohort manifest (JSON).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Group levels from lowest to highest interest, comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<String>>,
    /// Measure behavior impact by point-biserial instead of biserial
    /// correlation.
    #[arg(long)]
    point_biserial: bool,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 2,
        ErrorClass::DataContract => 3,
        ErrorClass::Numerical => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(e.class());
            let report = serde_json::json!({
                "error": e.kind(),
                "message": e.to_string(),
                "exit_code": code,
            });
            eprintln!("{report}");
            ExitCode::from(code)
        }
    }
}
