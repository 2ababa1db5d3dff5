use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coreshape::packing::{SolverId, DEFAULT_EPSILON};

/// Core shape selection for Tucker decompositions under a size budget.
#[derive(Parser, Debug)]
#[command(name = "coreshape", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a seeded synthetic low-rank tensor to an .npy file
    Gen(GenArgs),
    /// Print the squared singular values of every mode unfolding as JSON
    Singvals(SingvalsArgs),
    /// Pick a core shape for one budget
    Solve(SolveArgs),
    /// Run solvers over a list of budgets and emit one record per (budget, algo)
    Sweep(SweepArgs),
    /// Emit (compression rate, RRE) points for plotting a frontier
    Pareto(ParetoArgs),
    /// HOOI reconstruction error of a given core shape
    Rre(RreArgs),
    /// Pick edge ranks for a tree tensor network
    Tree(TreeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Output .npy path
    #[arg(short, long)]
    pub output: PathBuf,

    /// Named shape (cardiac, hyperspectral, vicroads, coil, or a -mini variant)
    #[arg(long, conflicts_with = "shape")]
    pub preset: Option<String>,

    /// Tensor shape, e.g. 32,32,32
    #[arg(long, value_delimiter = ',', required_unless_present = "preset")]
    pub shape: Option<Vec<usize>>,

    /// Multilinear rank of the signal part, e.g. 4,4,4
    #[arg(long, value_delimiter = ',')]
    pub core: Option<Vec<usize>>,

    /// Noise norm relative to the signal norm
    #[arg(long)]
    pub noise: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SingvalsArgs {
    /// Input tensor (.npy, float64, C order)
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Tensor (.npy) or packing instance (.json)
    pub input: PathBuf,

    /// Size budget; required for tensors, overrides the instance budget otherwise
    #[arg(long)]
    pub budget: Option<u64>,

    #[arg(long, default_value = "ip")]
    pub algo: SolverId,

    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    #[arg(long, default_value_t = 20)]
    pub hooi_iters: usize,

    /// Also report the HOOI reconstruction error of the chosen shape
    #[arg(long)]
    pub with_rre: bool,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

#[derive(Args, Debug)]
#[group(id = "budget_spec", required = true, multiple = false, args = ["budgets", "geometric"])]
pub struct BudgetArgs {
    /// Explicit ascending budgets, e.g. 500,1000,2000
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<u64>>,

    /// START:END:COUNT geometrically spaced budgets
    #[arg(long)]
    pub geometric: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Input tensor (.npy)
    pub input: PathBuf,

    #[command(flatten)]
    pub budgets: BudgetArgs,

    #[arg(long, value_delimiter = ',', default_value = "ip")]
    pub algos: Vec<SolverId>,

    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Fill the hooi_rre column
    #[arg(long)]
    pub with_rre: bool,

    #[arg(long, default_value_t = 20)]
    pub hooi_iters: usize,

    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output: OutputFormat,
}

#[derive(Args, Debug)]
pub struct ParetoArgs {
    /// Input tensor (.npy)
    pub input: PathBuf,

    #[command(flatten)]
    pub budgets: BudgetArgs,

    /// Rank cap per mode; a single value applies to every mode
    #[arg(long, value_delimiter = ',')]
    pub max_rank: Option<Vec<usize>>,

    #[arg(long, value_delimiter = ',', default_value = "ip")]
    pub algos: Vec<SolverId>,

    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    #[arg(long, default_value_t = 20)]
    pub hooi_iters: usize,
}

#[derive(Args, Debug)]
pub struct RreArgs {
    /// Input tensor (.npy)
    pub input: PathBuf,

    /// Core shape, e.g. 4,4,4
    #[arg(long, value_delimiter = ',', required = true)]
    pub shape: Vec<usize>,

    #[arg(long, default_value_t = 20)]
    pub hooi_iters: usize,
}

#[derive(Args, Debug)]
pub struct TreeArgs {
    /// Input tensor (.npy)
    pub input: PathBuf,

    /// Topology JSON file, or one of `depth-one`, `binary`
    #[arg(long, default_value = "binary")]
    pub topology: String,

    #[arg(long)]
    pub budget: u64,

    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
}
