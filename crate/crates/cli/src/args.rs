use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use storage_robustness::{DemandModel, DesignKind};

#[derive(Debug, Parser)]
#[command(name = "srob", version, about = "Robustness of replicated storage allocations", args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo trials per point.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an allocation and report overlap statistics.
    Design(DesignArgs),
    /// Decide whether a demand vector can be served.
    Feasible(FeasibleArgs),
    /// Estimate robustness by Monte Carlo over a parameter grid.
    Simulate(SimulateArgs),
    /// Evaluate analytic bounds over a parameter grid.
    Bounds(BoundsArgs),
    /// Distribution of the scan statistic of an i.i.d. demand sequence.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DesignArgs {
    #[arg(long)]
    pub kind: DesignKind,
    /// Number of nodes (defaults to d^2 - d + 1 for block designs).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: usize,
    /// Number of consecutive seeds to build, starting at `--seed`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub seeds: u64,
    /// Also write the allocation built from the first seed.
    #[arg(long)]
    pub alloc_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeasibilityMethod {
    Flow,
    Subsets,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct FeasibleArgs {
    #[arg(long)]
    pub alloc: PathBuf,
    #[arg(long)]
    pub rho: PathBuf,
    #[arg(long)]
    pub m: f64,
    #[arg(long, value_enum, default_value_t = FeasibilityMethod::Flow)]
    pub method: FeasibilityMethod,
}

/// A model parameter swept over a list of values, written `name=v1,v2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub values: Vec<f64>,
}

impl std::str::FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, rest) = s.split_once('=').ok_or_else(|| format!("expected name=v1,v2,..., got {s:?}"))?;
        let values = rest
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad sweep value {v:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("sweep needs at least one value".into());
        }
        Ok(Self { name: name.trim().to_string(), values })
    }
}

#[derive(Debug, Args)]
pub struct Grid {
    /// Node counts.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub n: Vec<usize>,
    /// Replication factors.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub d: Vec<usize>,
    /// Per-node load thresholds.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub m: Vec<f64>,
    /// Demand model, e.g. `exp:mu=1`, `pareto:lambda=1,alpha=2.5`, `bern:lambda=2,p=0.3`.
    #[arg(long)]
    pub model: DemandModel,
    /// Sweep one model parameter, e.g. `p=0.2,0.3,0.4`.
    #[arg(long)]
    pub sweep: Option<Sweep>,
    /// Multiply every demand by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub designs: Vec<DesignKind>,
    #[command(flatten)]
    pub grid: Grid,
    /// Keep one allocation for every trial of a randomized design.
    #[arg(long)]
    pub fix_alloc: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum BoundName {
    /// Span-based upper bound for the designs in `--designs`.
    Span,
    /// Scan-statistic upper bound valid for every design.
    ScanAny,
    Cyclic,
    Block,
    Clustering,
    Rgap,
    ConstrainedRandom,
    Random,
    RandomLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Finite,
    Asymptotic,
    Subgaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Eval {
    Mc,
    Poisson,
    Naus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Occupancy {
    Exact,
    ExactMc,
    Mean,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct BoundsArgs {
    #[arg(long, value_enum, value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub bound: Vec<BoundName>,
    #[command(flatten)]
    pub grid: Grid,
    /// Designs for the span bound.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "cyclic")]
    pub designs: Vec<DesignKind>,
    #[arg(long, value_enum, default_value_t = Mode::Finite)]
    pub mode: Mode,
    /// How scan-statistic probabilities are evaluated.
    #[arg(long, value_enum, default_value_t = Eval::Mc)]
    pub eval: Eval,
    /// Window sizes for scan upper bounds (default `1, d, 2d, n/4`).
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub windows: Vec<usize>,
    /// Gap of the r-gap bound (default `d - 1`).
    #[arg(long)]
    pub r: Option<usize>,
    /// Window of the r-gap upper bound (default `d`).
    #[arg(long)]
    pub s: Option<usize>,
    /// Sibling limit of the constrained random design.
    #[arg(long, default_value_t = 1)]
    pub vmax: usize,
    /// Subset sizes for the span bound (default `1..=d`).
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub t: Vec<usize>,
    /// Group size for the random-design bound (default `d`).
    #[arg(long)]
    pub group: Option<usize>,
    #[arg(long, value_enum, default_value_t = Occupancy::Exact)]
    pub occupancy: Occupancy,
    #[arg(long)]
    pub sg_alpha: Option<f64>,
    #[arg(long)]
    pub sg_beta: Option<f64>,
    #[arg(long)]
    pub sg_gamma: Option<f64>,
    #[arg(long)]
    pub sg_mu: Option<f64>,
    /// Add Monte Carlo estimates of the matching design with the same seed.
    #[arg(long)]
    pub with_mc: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanMethod {
    Mc,
    Poisson,
    Naus,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ScanArgs {
    #[arg(long)]
    pub model: DemandModel,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: usize,
    /// Thresholds.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub x: Vec<f64>,
    #[arg(long)]
    pub circular: bool,
    #[arg(long, value_enum, default_value_t = ScanMethod::Mc)]
    pub method: ScanMethod,
}
