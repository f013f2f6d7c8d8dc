use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "segpath", version, about = "Delay-constrained least-cost path computation for Segment Routing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random flat topology or a multi-area YARGG topology.
    Generate(GenerateArgs),
    /// Compute fronts from one source (or every source) to every node.
    Solve(SolveArgs),
    /// Answer one delay/cost/segment query between two nodes.
    Query(QueryArgs),
    /// Compare the fronts of two engines or result files.
    Compare(CompareArgs),
    /// Time the solver over many sources and print one CSV row per source.
    Bench(BenchArgs),
    /// Run the full iteration space with one and with N threads.
    Stress(StressArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    Random,
    Yargg,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GeneratorKind,
    /// Node count of a random topology.
    #[arg(long, default_value_t = 100)]
    pub nodes: usize,
    /// Average degree of a random topology (default: ln |V|).
    #[arg(long)]
    pub degree: Option<f64>,
    /// City table (CSV with name,x_km,y_km,population).
    #[arg(long, conflicts_with = "synthetic_cities")]
    pub cities: Option<PathBuf>,
    /// Use this many synthetic cities instead of a city table.
    #[arg(long)]
    pub synthetic_cities: Option<usize>,
    /// Aggregation groups per YARGG area.
    #[arg(long, default_value_t = 10)]
    pub groups: usize,
    /// Access routers per aggregation group.
    #[arg(long, default_value_t = 30)]
    pub access: usize,
    #[arg(long, env = "DCLC_SR_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Topology and solver settings shared by the solving subcommands.
#[derive(Debug, Clone, Args)]
pub struct SolverOpts {
    #[arg(long)]
    pub topology: PathBuf,
    /// Treat the topology as multi-area and solve with BEST2COPE.
    #[arg(long)]
    pub multiarea: bool,
    /// Maximum segment depth.
    #[arg(long, default_value_t = 10)]
    pub msd: usize,
    /// Delay constraint in milliseconds.
    #[arg(long, default_value_t = 100)]
    pub c1_ms: u64,
    /// Delay units per millisecond.
    #[arg(long, default_value_t = 10)]
    pub gamma: u64,
    /// Cost constraint.
    #[arg(long)]
    pub c2: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Exact entries kept per delay cell.
    #[arg(long, default_value_t = 1)]
    pub k_per_cell: usize,
    /// Declared delay measurement trueness in microseconds.
    #[arg(long)]
    pub trueness_us: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub solver: SolverOpts,
    /// Source node name; every node when omitted.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Result file (default: stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Where to write the run report (default: stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the SR graph as JSON.
    #[arg(long)]
    pub dump_sr: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    /// Fewest segments.
    M0,
    /// Lowest delay.
    M1,
    /// Lowest cost.
    M2,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub solver: SolverOpts,
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub dest: String,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::M2)]
    pub objective: ObjectiveArg,
    /// Segment budget of the query (default: MSD).
    #[arg(long)]
    pub max_segments: Option<usize>,
    /// Delay bound in delay units (default: the whole array).
    #[arg(long)]
    pub max_delay_units: Option<u64>,
    #[arg(long)]
    pub max_cost: Option<u64>,
    /// Allow a final node segment to the destination that the router does
    /// not need to push.
    #[arg(long)]
    pub free_last_nodeseg: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub solver: SolverOpts,
    /// Engine (best2cop, best2cope, oracle, mc) or a result file.
    #[arg(long, default_value = "best2cop")]
    pub a: String,
    #[arg(long, default_value = "oracle")]
    pub b: String,
    /// Source node name; every node when omitted.
    #[arg(long)]
    pub source: Option<String>,
    /// Compare exact delays instead of delay units.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub solver: SolverOpts,
    /// Number of sources, spread evenly over the node ids (default: all).
    #[arg(long)]
    pub sources: Option<usize>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StressArgs {
    /// Node count of the generated random graph.
    #[arg(long, default_value_t = 200)]
    pub nodes: usize,
    /// Topology to use instead of a generated graph.
    #[arg(long)]
    pub topology: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub threads: usize,
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub msd: usize,
    #[arg(long, default_value_t = 100)]
    pub c1_ms: u64,
    #[arg(long, default_value_t = 10)]
    pub gamma: u64,
    #[arg(long, env = "DCLC_SR_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}
