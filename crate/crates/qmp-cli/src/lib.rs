//! Argument parsing, dispatch and exit codes for the `qmp` executable.
//!
//! Every subcommand prints one JSON document (or CSV with `--format csv`) that embeds a
//! [`manifest::RunManifest`]. Exit codes: 0 success, 2 validation error, 3 numerical
//! non-convergence, 64 usage error.

pub mod commands;
pub mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Fixed default seed for every randomized step.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qmp_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qmp_core::Error::NonConvergence { .. }) => EXIT_NONCONVERGENCE,
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "qmp", version, about = "Quantum marginal problem toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for parallel modules (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the main result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the manifest (output is then no longer byte-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kronecker coefficient g(α, β, γ).
    Kron(TripleArgs),
    /// Littlewood–Richardson coefficient c^λ_{α β}.
    Lr(LrArgs),
    /// Stretching sequence g(kα, kβ, kγ) for k = 1..kmax.
    Stretch(StretchArgs),
    /// Lattice-point counts.
    #[command(subcommand)]
    Count(CountCommand),
    /// One-body marginal polytope of a pure tensor product system.
    Polytope(PolytopeArgs),
    /// Duistermaat–Heckman densities of eigenvalue distributions.
    Dh(DhArgs),
    /// Stabilizer entropy tools.
    #[command(subcommand)]
    Stab(StabCommand),
    /// Moment-map gradient flow.
    Flow(FlowArgs),
}

#[derive(Args, Debug)]
pub struct TripleArgs {
    /// Partition, e.g. `[2,1]`.
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    #[arg(long)]
    pub gamma: String,
}

#[derive(Args, Debug)]
pub struct LrArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    /// Partition of |α| + |β|.
    #[arg(long)]
    pub lambda: String,
}

#[derive(Args, Debug)]
pub struct StretchArgs {
    #[command(flatten)]
    pub triple: TripleArgs,
    /// Last stretching factor.
    #[arg(long)]
    pub kmax: u32,
}

#[derive(Subcommand, Debug)]
pub enum CountCommand {
    /// Three-way contingency tables with the given margins.
    Tables {
        /// Table total.
        #[arg(long)]
        k: i64,
        /// Margins, comma-separated, e.g. `1,1`.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
    },
    /// Vector partitions of a target by columns given as `[[..],[..]]`.
    Vpp {
        #[arg(long)]
        columns: String,
        /// Target vector as a JSON array.
        #[arg(long)]
        target: String,
    },
}

#[derive(Args, Debug)]
pub struct PolytopeArgs {
    /// Local dimensions, e.g. `2,2,2`.
    #[arg(long)]
    pub dims: String,
    /// Random trials per candidate when searching for a witness.
    #[arg(long, default_value_t = 32)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct DhArgs {
    /// Local dimensions of a tensor product system, e.g. `2,2,2`.
    #[arg(long, conflicts_with = "sym")]
    pub dims: Option<String>,
    /// Bosonic qubits: Sym^N(C^2).
    #[arg(long)]
    pub sym: Option<usize>,
    /// Emit the abelian (torus) density instead of the eigenvalue density.
    #[arg(long)]
    pub abelian: bool,
    /// Write chamber H-representations and polynomials as JSON.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Write density samples on a grid as CSV.
    #[arg(long)]
    pub sample: Option<PathBuf>,
    /// Grid subdivisions per axis for `--sample`.
    #[arg(long, default_value_t = 20)]
    pub grid: u32,
}

#[derive(Subcommand, Debug)]
pub enum StabCommand {
    /// Check entropy inequalities on all isotropic subspaces of F_d^{2n}.
    Sweep {
        /// Number of parties.
        #[arg(long)]
        n: usize,
        /// Local dimension (prime for enumeration).
        #[arg(long)]
        d: i64,
        /// Comma-separated families: ssa, wm, mono, ingleton, zhang-yeung.
        #[arg(long, default_value = "ssa")]
        ineq: String,
        /// Write the distinct entropy vectors as CSV.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Entropy vector of the submodule spanned by generators in a CSV file.
    Entropy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
        /// CSV file, one generator of length 2n per row.
        #[arg(long)]
        gens: PathBuf,
    },
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
pub struct FlowArgs {
    #[command(subcommand)]
    pub refine: Option<FlowCommand>,
    #[command(flatten)]
    pub run: FlowRunArgs,
}

#[derive(Args, Debug)]
pub struct FlowRunArgs {
    /// JSON array of [re, im] amplitudes in row-major product-basis order.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Local dimensions (default: qubits).
    #[arg(long)]
    pub dims: Option<String>,
    /// Write the trace as CSV.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Step size.
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    /// Steps before giving up with exit code 3.
    #[arg(long, default_value_t = 20_000)]
    pub max_steps: usize,
}

#[derive(Subcommand, Debug)]
pub enum FlowCommand {
    /// Polytope of the orbit closure by alternating outer cuts and certified points.
    Refine {
        /// JSON array of [re, im] amplitudes.
        #[arg(long)]
        state: PathBuf,
        /// Local dimensions (default: qubits).
        #[arg(long)]
        dims: Option<String>,
        /// Cut/certify rounds before returning an incomplete result.
        #[arg(long, default_value_t = 40)]
        max_rounds: usize,
    },
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: thread pool already initialized: {e}");
        }
    }
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::execute(&cli, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
