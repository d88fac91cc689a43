use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "dynlab", version, about = "Entropy, envelope and solenoid experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; relative paths resolve against the output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for outputs written under a default file name.
    #[arg(long, global = true, env = "DYNLAB_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Separated-set counts and entropy rates.
    Entropy(EntropyArgs),
    #[command(subcommand)]
    Analyze(Analyze),
    #[command(subcommand)]
    Envelope(EnvelopeCmd),
    #[command(subcommand)]
    Slovak(SlovakCmd),
    #[command(subcommand)]
    Suspension(SuspensionCmd),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SystemArgs {
    /// odometer, fullshift, plusone, sturmian[:digits|golden], solenoid[:t0|golden]
    #[arg(long)]
    pub system: String,
    /// Word depth, or window half width for shifts.
    #[arg(long, default_value_t = 10)]
    pub depth: u32,
    /// Flow time for the solenoid; overrides the one in the system id.
    #[arg(long)]
    pub t0: Option<String>,
    /// Positions along the Sturmian word used as its points.
    #[arg(long, default_value_t = 4096)]
    pub span: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value = "0.4")]
    pub eps_ladder: String,
    /// Inclusive range `a..b` or a comma list.
    #[arg(long, default_value = "4..10")]
    pub n_ladder: String,
    /// Mesh of the net the sample is drawn from.
    #[arg(long, default_value_t = 0.05)]
    pub net: f64,
    /// Strided subsample size of the net; 0 keeps the whole net.
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
    #[arg(long, default_value_t = 4096)]
    pub exact_threshold: usize,
    #[arg(long, default_value_t = 5_000_000)]
    pub node_budget: u64,
}

#[derive(Subcommand, Debug)]
pub enum Analyze {
    /// Number of distinct names of each length.
    Complexity(ComplexityArgs),
    /// Periodic recurrence of a ball around a point.
    Recurrence(RecurrenceArgs),
    /// Name-count evidence for or against equicontinuity.
    Equicontinuity(EquicontinuityArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Largest name length.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Mesh of the partition.
    #[arg(long, default_value_t = 0.75)]
    pub mesh: f64,
    #[arg(long, default_value_t = 0.05)]
    pub net: f64,
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Point in the system's text form (`b:0010`, `w:0110`, `k:5`, `s:0010@0.5`, or a Sturmian position).
    #[arg(long)]
    pub point: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EquicontinuityArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value = "0.6,0.3,0.2")]
    pub mesh_ladder: String,
    #[arg(long, default_value_t = 16)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0.01)]
    pub net: f64,
    #[arg(long, default_value_t = 256)]
    pub sample: usize,
}

#[derive(Subcommand, Debug)]
pub enum EnvelopeCmd {
    /// Entropy lower bounds from permutation families.
    LowerBound(LowerBoundArgs),
    /// Uniform distances between powers of the lifted solenoid map.
    Discreteness(DiscretenessArgs),
    /// Separated constants under the envelope against separated points.
    Constants(ConstantsArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LowerBoundArgs {
    /// `doubling:<kmax>` or a comma list of `k:n:q`.
    #[arg(long, default_value = "doubling:4")]
    pub stages: String,
    /// Also build one family on this system (odometer, fullshift, plusone).
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub depth: u32,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 0.4)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub net: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiscretenessArgs {
    /// Largest |m|, |n| compared.
    #[arg(long, default_value_t = 5)]
    pub pairs: i64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value = "0.4,0.2")]
    pub eps_ladder: String,
    #[arg(long, default_value = "1..8")]
    pub n_ladder: String,
    #[arg(long, default_value_t = 0.05)]
    pub net: f64,
    /// Size of the net the constant maps are tabulated on.
    #[arg(long, default_value_t = 16)]
    pub domain: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Truncation N of the orbit sum.
    #[arg(long = "N", visible_alias = "truncation", default_value_t = 12)]
    pub truncation: u32,
    #[arg(long, default_value = "golden")]
    pub t0: String,
    /// Base b of the weights a_n proportional to b^-|n|.
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    /// Load a model written by `slovak build` instead of building one.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SlovakCmd {
    /// Build the truncated model and its fibers.
    Build(ModelArgs),
    /// The fiber intervals over the orbit of x0.
    Fibers(ModelArgs),
    /// Trace successors of the closed ends of path components.
    Successor(SuccessorArgs),
    /// Sampled check of the uniform-continuity modulus.
    UcCheck(UcArgs),
    /// Samples of the graph along the composant of x0, for plotting.
    Graph(GraphArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SuccessorArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    /// Index n of the first closed end z_n.
    #[arg(long, default_value_t = 0)]
    pub start: i64,
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct UcArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "0.5,0.25")]
    pub eps: String,
    /// Candidate pairs per eps.
    #[arg(long, default_value_t = 20_000)]
    pub pairs: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GraphArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
}

#[derive(Subcommand, Debug)]
pub enum SuspensionCmd {
    /// Orbit of a point under the time-t0 map.
    Trace(TraceArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TraceArgs {
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    /// Decimal, `golden`, or a fraction `p/q` for exact arithmetic.
    #[arg(long, default_value = "golden")]
    pub t0: String,
    /// Start point `s:<bits>@<s>`; defaults to the zero word at s = 0.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
    /// Also report when the orbit first comes within this distance of every net point.
    #[arg(long)]
    pub density_eps: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iter: usize,
}
