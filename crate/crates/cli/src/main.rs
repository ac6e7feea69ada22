//! `holodet` command-line front end.

mod commands;
mod scalar;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "holodet", version, about = "Determinants of twisted quiver Laplacians by cycle expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Determinant of the twisted Laplacian by one method.
    Det {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Method::Oracle)]
        method: Method,
        /// Diagonal shift for `euler-truncated`, one value per vertex.
        #[arg(long, value_delimiter = ',')]
        kappa: Option<Vec<f64>>,
        /// Log-tail tolerance for `euler-truncated`.
        #[arg(long, default_value_t = holodet::euler::DEFAULT_TAIL_TOL)]
        tol: f64,
        /// Longest prime cycle `euler-truncated` may use.
        #[arg(long, default_value_t = holodet::euler::DEFAULT_MAX_LEN)]
        max_len: usize,
    },
    /// Multivariate characteristic polynomial det(diag(t_a I) + Δ).
    Charpoly {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Runs every applicable method and reports the largest discrepancy.
    Compare {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Prime cycles of the quiver.
    Primes {
        #[command(flatten)]
        input: InputArgs,
        /// Length cap when the quiver has infinitely many primes.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// k-th moment of the determinant under a random representation.
    Moments {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Model::Sign)]
        model: Model,
        /// Also estimate both sides with Haar unitaries.
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emits a random instance as JSON.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        max_edges: usize,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        #[arg(long)]
        max_total_rank: Option<usize>,
        /// Symbolic edge weights `x1, x2, …`.
        #[arg(long)]
        symbolic: bool,
    },
    /// Emits a built-in example family as JSON.
    Example {
        /// acyclic, unicyclic, figure5 or two_cycle.
        name: String,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        symbolic: bool,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Quiver JSON file.
    #[arg(short, long, required_unless_present = "example", conflicts_with = "example")]
    input: Option<PathBuf>,
    /// Built-in family instead of a file.
    #[arg(long)]
    example: Option<String>,
    /// Rank of every vertex in a built-in family.
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Symbolic weights in a built-in family.
    #[arg(long)]
    symbolic: bool,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Parallel folds where a method supports them.
    #[arg(long)]
    parallel: bool,
    /// Term budget for enumeration-heavy methods.
    #[arg(long, env = "HOLODET_BUDGET", default_value_t = holodet::DEFAULT_BUDGET)]
    budget: u128,
    /// Omit timings so that reports are byte-stable.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Oracle,
    Perm,
    BlockPerm,
    TraceFormal,
    Cycles,
    VectorFields,
    EulerFinite,
    EulerTruncated,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Perm => "perm",
            Method::BlockPerm => "block-perm",
            Method::TraceFormal => "trace-formal",
            Method::Cycles => "cycles",
            Method::VectorFields => "vector-fields",
            Method::EulerFinite => "euler-finite",
            Method::EulerTruncated => "euler-truncated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float,
    Exact,
    Symbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Matrix distributions for `moments`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// `U_e` or `−U_e` with equal odds.
    Sign,
    /// `I` or `diag(1, …, 1, −1)` with equal odds.
    Flip,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let (code, kind) = match err.downcast_ref::<holodet::Error>() {
                Some(e) if e.is_input_error() => (2, "invalid-input"),
                Some(e) if e.is_refusal() => (3, "refused"),
                Some(holodet::Error::Invariant(_)) => (1, "invariant"),
                _ => (1, "internal"),
            };
            eprintln!("{}", json!({ "error": { "kind": kind, "message": format!("{err:#}") } }));
            ExitCode::from(code)
        }
    }
}
