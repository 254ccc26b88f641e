use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "shiftsolve", version, about = "Benchmark harness for multi-shift Krylov solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one shifted family with one solver.
    Run(RunArgs),
    /// Run several solvers on the same problem and print a CSV table.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverId {
    /// Restarted CMRH, one solve per shift.
    Cmrh,
    /// Restarted GMRES, one solve per shift.
    Gmres,
    /// Restarted shifted CMRH.
    Scmrh,
    /// Restarted shifted GMRES.
    Sgmres,
    /// Flexible CMRH outer, msHessen inner.
    HessenFcmrh,
    /// Flexible GMRES outer, msHessen inner.
    HessenFgmres,
    /// Flexible CMRH outer, msFOM inner.
    FomFcmrh,
    /// Flexible GMRES outer, msFOM inner.
    FomFgmres,
}

impl SolverId {
    pub fn name(self) -> &'static str {
        match self {
            SolverId::Cmrh => "cmrh",
            SolverId::Gmres => "gmres",
            SolverId::Scmrh => "scmrh",
            SolverId::Sgmres => "sgmres",
            SolverId::HessenFcmrh => "hessen-fcmrh",
            SolverId::HessenFgmres => "hessen-fgmres",
            SolverId::FomFcmrh => "fom-fcmrh",
            SolverId::FomFgmres => "fom-fgmres",
        }
    }

    pub fn is_nested(self) -> bool {
        matches!(
            self,
            SolverId::HessenFcmrh | SolverId::HessenFgmres | SolverId::FomFcmrh | SolverId::FomFgmres
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedArg {
    /// The first listed shift is the seed.
    First,
    /// The unshifted matrix is the seed.
    Zero,
}

#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    /// Matrix Market coordinate file.
    #[arg(long, value_name = "PATH", conflicts_with = "gen_cdr3d", required_unless_present = "gen_cdr3d")]
    pub matrix: Option<PathBuf>,

    /// Generate the 3D convection-diffusion-reaction matrix.
    #[arg(long, value_name = "H,EPS,BX,BY,BZ,R", allow_hyphen_values = true)]
    pub gen_cdr3d: Option<String>,

    /// Use −A instead of A.
    #[arg(long)]
    pub negate: bool,

    /// Comma-separated shifts; complex values as `a+bi`.
    #[arg(
        long,
        value_name = "LIST",
        allow_hyphen_values = true,
        conflicts_with = "shifts_file",
        required_unless_present = "shifts_file"
    )]
    pub shifts: Option<String>,

    /// File of shifts separated by whitespace or commas; `#` starts a comment.
    #[arg(long, value_name = "PATH")]
    pub shifts_file: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = SeedArg::First)]
    pub seed: SeedArg,

    /// Restart length (outer step cap for nested solvers unless --outer-max is set).
    #[arg(long, default_value_t = 40)]
    pub restart: usize,

    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    #[arg(long, default_value_t = 6000)]
    pub max_mvps: u64,

    /// Inner steps for nested solvers.
    #[arg(long, default_value_t = 8)]
    pub inner_it: usize,

    /// Outer step cap for nested solvers.
    #[arg(long)]
    pub outer_max: Option<usize>,

    /// `ones` or a file of right-hand side values.
    #[arg(long, default_value = "ones")]
    pub rhs: String,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, value_enum)]
    pub solver: SolverId,

    /// Write the JSON report here.
    #[arg(long, value_name = "PATH.json")]
    pub report: Option<PathBuf>,

    /// Write the residual history CSV here.
    #[arg(long, value_name = "PATH.csv")]
    pub history: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Comma-separated solver ids.
    #[arg(long, value_enum, value_delimiter = ',', num_args = 0..)]
    pub solvers: Vec<SolverId>,

    /// Write the table here instead of stdout.
    #[arg(long, value_name = "PATH.csv")]
    pub output: Option<PathBuf>,
}
