use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "spps",
    version,
    about = "Eigenvalues of perturbed Bessel problems by spectral parameter power series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the spectral problem in a problem file.
    Solve(SolveArgs),
    /// Run a built-in benchmark (or `all`) against its reference values.
    Bench(BenchArgs),
    /// Write the formal powers at the first center as CSV.
    Powers(PowersArgs),
    /// Write transmutation images T[x^(2k+l+1)], k = 0..=kmax, as CSV.
    Transmute(TransmuteArgs),
    /// Check a problem file without solving.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Single,
    Linear,
    Adaptive,
}

/// Settings that override the problem file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Truncation order of the power series.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// Number of grid panels.
    #[arg(long = "M", value_name = "M")]
    pub m: Option<usize>,
    /// Use the exact lower-order law for the first J nodes of odd powers.
    #[arg(long = "J", value_name = "J")]
    pub j: Option<usize>,
    /// Turn bound violations into errors.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Linear schedule: centers offset + n (s + d i).
    #[arg(long, value_name = "s,d", allow_hyphen_values = true)]
    pub shift: Option<String>,
    /// Complex offset of the linear schedule.
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<String>,
    /// Adaptive chain: step from the last accepted eigenvalue.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Keep only real eigenvalues.
    #[arg(long)]
    pub real_mode: bool,
    /// Number of eigenvalues to compute.
    #[arg(long, short = 'k')]
    pub count: Option<usize>,
    /// Eigenfunction indices to write, e.g. `1..10` or `1,3,5`.
    #[arg(long, value_name = "LIST")]
    pub eigenfunctions: Option<String>,
    /// Also write the formal powers of the first center.
    #[arg(long)]
    pub dump_powers: bool,
    /// Directory for eigenvalues.txt, eigenvalues.json and CSV files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Case id, or `all`. `list` prints the available ids.
    pub id: String,
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    #[arg(long = "M", value_name = "M")]
    pub m: Option<usize>,
    /// Number of eigenvalues to compute.
    #[arg(long, short = 'k')]
    pub count: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct PowersArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Write every k-th node only.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Output file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TransmuteArgs {
    pub path: PathBuf,
    /// Largest k.
    #[arg(long)]
    pub kmax: usize,
    #[arg(long = "M", value_name = "M")]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    pub path: PathBuf,
}
