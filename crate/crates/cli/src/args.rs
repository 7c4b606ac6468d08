use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::workload::{Distribution, OpMix};

const COLUMNS: &str = "\
Report columns (CSV header order, same keys in --json):
  structure         structure id (ef, sampled, dynset, append)
  n                 number of elements
  m                 universe bound; values lie in [0, m]
  op                measured operation (space, insert, delete, access, predecessor, append)
  count             operations timed
  total_ns          wall time of the timed operations
  ns_per_op         total_ns / count
  measured_bits     every bit the structure holds, indexes included
  ef_bits           n⌈log2(m/n)⌉ + n + ⌈m/2^⌈log2(m/n)⌉⌉, recomputed from (n, m)
  b_bits            ⌈log2 C(m+1, n)⌉, recomputed from (n, m)
  redundancy_per_n  (measured_bits - ef_bits) / n";

#[derive(Parser, Debug)]
#[command(name = "efset", version, about = "Elias-Fano integer sets: build, query, verify, space, bench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a structure from a value file and write its serialized form.
    Build(BuildArgs),
    /// Run queries against a serialized structure.
    Query(QueryArgs),
    /// Replay an operation tape against a structure and an oracle.
    Verify(VerifyArgs),
    /// Space report per size.
    #[command(after_help = COLUMNS)]
    Space(SpaceArgs),
    /// Timed operation classes.
    #[command(after_help = COLUMNS)]
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureKind {
    Ef,
    Sampled,
    Dynset,
    Append,
}

impl StructureKind {
    pub fn id(self) -> &'static str {
        match self {
            StructureKind::Ef => "ef",
            StructureKind::Sampled => "sampled",
            StructureKind::Dynset => "dynset",
            StructureKind::Append => "append",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    /// One decimal integer per line.
    #[default]
    Text,
    /// Little-endian 64-bit values, no header.
    Binary,
}

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub structure: StructureKind,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Serialized output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Universe bound m; defaults to the largest value.
    #[arg(long)]
    pub universe: Option<u64>,
    /// Block length (sampled: router stride, append: buffer length k).
    #[arg(long)]
    pub block: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryOp {
    Access,
    Predecessor,
    Successor,
    Rank,
    Contains,
}

#[derive(Args, Debug, Clone)]
pub struct QueryArgs {
    #[arg(long, value_enum)]
    pub structure: StructureKind,
    /// Serialized structure written by `build`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(value_enum)]
    pub op: QueryOp,
    /// Ranks (access) or values (other operations).
    #[arg(required = true)]
    pub args: Vec<u64>,
    #[arg(long)]
    pub block: Option<usize>,
    /// Emit one JSON object per query.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct WorkloadArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Target set size.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// Universe exponent: m = n^gamma unless --universe is given.
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long)]
    pub universe: Option<u64>,
    #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
    pub distribution: Distribution,
    /// Operation percentages insert:delete:access:predecessor.
    #[arg(long, default_value = "40:10:25:25")]
    pub mix: OpMix,
    /// Tape length; defaults to n.
    #[arg(long)]
    pub ops: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub structure: StructureKind,
    #[command(flatten)]
    pub workload: WorkloadArgs,
    /// Replay this tape file instead of generating one.
    #[arg(long)]
    pub tape: Option<PathBuf>,
    /// Write the generated tape here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long)]
    pub json: bool,
    /// Corrupt the structure just before this operation (negative control).
    #[arg(long, hide = true)]
    pub fault_at: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArgs {
    #[arg(long, value_enum)]
    pub structure: StructureKind,
    /// Set sizes, comma separated; defaults to --n.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<u64>,
    #[command(flatten)]
    pub workload: WorkloadArgs,
    /// Build dynset by single inserts instead of a bulk load.
    #[arg(long)]
    pub incremental: bool,
    #[arg(long)]
    pub block: Option<usize>,
    /// JSON lines instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub structure: StructureKind,
    /// Set sizes, comma separated; defaults to --n.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<u64>,
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
