//! Command-line front end.
//!
//! Every subcommand maps onto one library call. Output goes to the writer
//! passed to [`run`], so the whole surface is testable in-process; all
//! randomness derives from `--seed` (or `QUADIVP_SEED`).

mod commands;
pub mod repro;

use crate::cauchy::CauchyError;
use crate::equations::EquationError;
use crate::field::FieldIoError;
use crate::graph::GraphError;
use crate::lax::LaxError;
use crate::solitons::{KinkDefectError, SolitonError};
use crate::solver::SolveError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use thiserror::Error;

/// Exit status for a singular (non-generic) run.
pub const EXIT_SINGULAR: i32 = 5;
/// Exit status for usage and validation errors.
pub const EXIT_USAGE: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "quadivp", version, about = "Initial value problems on quad-graphs")]
pub struct Cli {
    /// Seed for random data and face order
    #[arg(long, env = "QUADIVP_SEED", default_value_t = 0, global = true)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a graph file
    Gen(GenArgs),
    /// List the strips of a graph
    Strips { graph: PathBuf },
    /// Vertex, face and boundary counts
    Balance { graph: PathBuf },
    /// Classify an initial value problem by its strip crossings
    Classify {
        graph: PathBuf,
        #[command(flatten)]
        path: PathArgs,
    },
    /// Remove faces where a strip crosses itself
    SplitStrips {
        graph: PathBuf,
        #[arg(long, default_value = "dkdv")]
        eq: String,
        /// Glue the other diagonal of each removed face
        #[arg(long)]
        other_diagonal: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Propagate initial data over the graph
    Solve(SolveArgs),
    /// Erase a strip from a solved graph by a Bäcklund transformation
    EraseStrip {
        graph: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        strip: usize,
        /// Vertex on the side left untouched
        #[arg(long)]
        keep: usize,
        #[arg(long, default_value = "dkdv")]
        eq: String,
        /// Where to write the reduced graph
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the reduced field
        #[arg(long)]
        field_out: Option<PathBuf>,
    },
    /// Bäcklund transform of a solved field
    Backlund {
        graph: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        seed_vertex: usize,
        #[arg(long)]
        seed_value: String,
        #[arg(long, default_value = "dkdv")]
        eq: String,
        #[arg(long, value_enum, default_value_t = Mode::Rational)]
        mode: Mode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the scalar identity of transition matrices around closed walks
    LaxCheck {
        graph: PathBuf,
        #[arg(long)]
        field: PathBuf,
        /// A closed walk as comma-separated vertex ids; repeatable
        #[arg(long)]
        walk: Vec<String>,
        /// Number of random closed walks to add
        #[arg(long, default_value_t = 0)]
        random_walks: usize,
    },
    /// Recover the field along one path from the transition matrix of another
    Refactor {
        graph: PathBuf,
        #[arg(long)]
        field: PathBuf,
        /// Source path, comma-separated vertex ids
        #[arg(long)]
        from: String,
        /// Target path with the same ends
        #[arg(long)]
        to: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample a kink or soliton field
    Soliton(SolitonArgs),
    /// Solve with and without a defect and compare outside it
    DefectRun(DefectArgs),
    /// Wave equation with delta data: where does the defect matter
    WaveDefect {
        #[command(flatten)]
        defect: DefectArgs,
        /// Path position carrying the unit value; all positions if omitted
        #[arg(long)]
        delta: Option<usize>,
    },
    /// Rebuild a named example and check its expected behaviour
    Repro {
        /// Example name, or `all`
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Rectangular lattice
    Square {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
        /// Column parameter, or comma-separated list of w parameters
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Row parameter, or comma-separated list of h parameters
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Square lattice with a named defect
    Defect(DefectArgs),
    /// Faces of ℤᵈ crossing a plane
    Section {
        /// Plane normal, comma-separated
        #[arg(long, allow_hyphen_values = true)]
        normal: String,
        #[arg(long, default_value_t = 3)]
        radius: i64,
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
    },
    /// Coordinate quadrants of ℤ³
    Quadrants {
        #[arg(long, value_enum)]
        kind: QuadrantKind,
        #[arg(long, default_value_t = 4)]
        radius: i64,
    },
    /// Hexagonal patch whose inner strips are all closed
    ClosedStrips {
        #[arg(long, default_value_t = 3)]
        n: i64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuadrantKind {
    /// The three quadrants with positive coordinates
    Positive,
    /// The six quadrants with coordinates of opposite signs
    Mixed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DefectName {
    Identity,
    Diagonal,
    Transparent,
    Swapping,
    Sheared,
}

#[derive(Args, Debug, Clone)]
pub struct DefectArgs {
    #[arg(long, value_enum)]
    pub defect: DefectName,
    /// Host width; defaults to one square of margin around the defect
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub beta: String,
}

/// An initial subgraph given as a vertex list or as lattice corners.
#[derive(Args, Debug, Clone)]
pub struct PathArgs {
    /// JSON file with an array of vertex ids
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Comma-separated vertex ids
    #[arg(long, conflicts_with = "path")]
    pub vertices: Option<String>,
    /// Lattice corners such as "3,0;0,0;0,3"
    #[arg(long, conflicts_with_all = ["path", "vertices"])]
    pub corners: Option<String>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub path: PathArgs,
    /// Comma-separated values along the path
    #[arg(long, allow_hyphen_values = true, conflicts_with = "random")]
    pub values: Option<String>,
    /// Random rationals with numerator and denominator up to this bound
    #[arg(long)]
    pub random: Option<i64>,
    #[arg(long, default_value = "dkdv")]
    pub eq: String,
    #[arg(long, value_enum, default_value_t = Mode::Rational)]
    pub mode: Mode,
    /// Visit faces in a seeded random order
    #[arg(long)]
    pub shuffle: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolitonKind {
    Kink,
    Bended,
    TwoKink,
    Multi,
}

#[derive(Args, Debug)]
pub struct SolitonArgs {
    #[arg(long, value_enum)]
    pub kind: SolitonKind,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Amplitudes per axis for the multidimensional kink
    #[arg(long, default_value = "0.5,2.5,3", allow_hyphen_values = true)]
    pub amplitudes: String,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub k: f64,
    /// Second wave number of the two-kink
    #[arg(long, default_value_t = 0.5)]
    pub k2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xi2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 20)]
    pub w: usize,
    #[arg(long, default_value_t = 20)]
    pub h: usize,
    /// Evaluate on this graph instead of a w×h lattice (or a section for `multi`)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cauchy(#[from] CauchyError),
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Lax(#[from] LaxError),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error(transparent)]
    FieldIo(#[from] FieldIoError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<KinkDefectError> for CliError {
    fn from(e: KinkDefectError) -> Self {
        match e {
            KinkDefectError::Soliton(e) => e.into(),
            KinkDefectError::Solve(e) => e.into(),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let singular = matches!(
            self,
            CliError::Solve(SolveError::Singular(_))
                | CliError::Equation(EquationError::Singular { .. })
                | CliError::Lax(LaxError::RankDrop { .. })
        );
        if singular {
            EXIT_SINGULAR
        } else {
            EXIT_USAGE
        }
    }
}

/// Runs a parsed command, writing its report to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    commands::dispatch(cli, out)
}

/// Parses `args` (program name first), runs, and reports errors on `err`.
pub fn run_from_args<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            // help and version requests
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
