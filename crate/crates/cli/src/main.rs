//! `mutseq`: mutate, classify, transform, search, verify and persist
//! mutation sequences of exchange matrices.
//!
//! Exit codes: 0 success, 1 domain failure, 2 usage error, 3 budget exhausted.

mod commands;
mod input;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<mutseq::Error> for CliError {
    fn from(e: mutseq::Error) -> Self {
        use mutseq::Error as E;
        match e {
            E::IndexOutOfRange { .. }
            | E::DimensionMismatch { .. }
            | E::EmptyMatrix
            | E::EmptyIndexSet
            | E::InvalidPermutation { .. }
            | E::NotSignSkewSymmetric { .. }
            | E::Io(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    BudgetExhausted,
}

/// What a command prints: a JSON value for `--json`, text otherwise.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub status: Status,
}

impl Output {
    pub fn ok(json: Value, text: String) -> Output {
        Output {
            json,
            text,
            status: Status::Ok,
        }
    }

    pub fn with_status(mut self, status: Status) -> Output {
        self.status = status;
        self
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "mutseq",
    version,
    about = "Mutation sequences of totally sign-skew-symmetric exchange matrices"
)]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Increase log verbosity (-v, -vv).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct MatrixArg {
    /// Exchange matrix: a JSON file, or inline JSON such as '[[0,1],[-1,0]]'.
    #[arg(long, short = 'm', value_name = "FILE|JSON")]
    pub matrix: String,
}

#[derive(Args, Debug, Clone)]
pub struct SeqArg {
    /// Comma-separated 1-based directions, e.g. "3,2,1".
    #[arg(long, value_name = "DIRS", allow_hyphen_values = true)]
    pub seq: Option<String>,
    /// File holding the sequence; takes precedence over --seq.
    #[arg(long, value_name = "FILE")]
    pub seq_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Longest sequence (or deepest level) explored.
    #[arg(long, env = "MUTSEQ_MAX_DEPTH", default_value_t = 12)]
    pub max_depth: usize,
    /// Most states stored.
    #[arg(long, env = "MUTSEQ_MAX_NODES", default_value_t = 200_000)]
    pub max_nodes: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mutate the matrix along a sequence.
    Mutate {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        seq: SeqArg,
    },
    /// Print every step of a walk with its c-vector and color, and the final seed.
    SeedTrace {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        seq: SeqArg,
    },
    /// Classify a sequence as reddening, greening or neither.
    Classify {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        seq: SeqArg,
    },
    /// Conjugate a reddening or greening sequence in direction j and check the prediction.
    Conjugate {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        seq: SeqArg,
        /// Direction of the conjugation.
        #[arg(long, short = 'j')]
        dir: usize,
    },
    /// Rotate a reddening or greening sequence and check the prediction.
    Rotate {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        seq: SeqArg,
        /// Number of successive rotations.
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Conjugation difference of the vertex reached by a path.
    ConjDiff {
        #[command(flatten)]
        matrix: MatrixArg,
        /// Path from the initial vertex to the vertex t.
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        /// Reddening sequence of the initial matrix fixing t0⁻ (searched for if omitted).
        #[arg(long)]
        reddening: Option<String>,
        /// Reddening sequence of B_t whose red count in the initial pattern is checked.
        #[arg(long)]
        check: Option<String>,
    },
    /// Induce a sequence on a principal submatrix.
    Restrict {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        seq: SeqArg,
        /// Index set V, e.g. "1,3".
        #[arg(long)]
        indices: String,
    },
    /// Breadth-first search for a shortest maximal green sequence.
    SearchMgs {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Skip mutations at targets of heavy arrows.
        #[arg(long)]
        heavy_pruning: bool,
        /// Directions every result must start with.
        #[arg(long)]
        prefix: Option<String>,
        /// Warn once entries exceed this many bits.
        #[arg(long, default_value_t = 64)]
        magnitude_bits: u64,
        /// Drop states whose entries exceed --magnitude-bits.
        #[arg(long)]
        prune_on_magnitude: bool,
    },
    /// Breadth-first search for a shortest reddening sequence.
    SearchReddening {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Directions every result must start with.
        #[arg(long)]
        prefix: Option<String>,
        /// Warn once entries exceed this many bits.
        #[arg(long, default_value_t = 64)]
        magnitude_bits: u64,
        /// Drop states whose entries exceed --magnitude-bits.
        #[arg(long)]
        prune_on_magnitude: bool,
    },
    /// List every maximal green sequence up to a length.
    EnumerateMgs {
        #[command(flatten)]
        matrix: MatrixArg,
        /// Longest sequence listed.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Skip mutations at targets of heavy arrows.
        #[arg(long)]
        heavy_pruning: bool,
    },
    /// Build the exchange graph breadth-first.
    ExchangeGraph {
        #[command(flatten)]
        matrix: MatrixArg,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Worker threads for frontier expansion.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Save the store to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report a path to the all-red vertex with the fewest red arrows.
        #[arg(long)]
        reddening_path: bool,
    },
    /// Run property suites on a matrix.
    Verify {
        /// Exchange matrix (optional for the rank2 suite).
        #[arg(long, short = 'm', value_name = "FILE|JSON")]
        matrix: Option<String>,
        /// Comma-separated suites, or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        /// Random paths walked by the duality suite.
        #[arg(long, default_value_t = 200)]
        paths: usize,
        /// Longest sequence enumerated by the suites.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Perturb one C-matrix entry in the duality suite (negative control).
        #[arg(long)]
        corrupt: bool,
        /// Also check total mutability by bounded search to this depth.
        #[arg(long, value_name = "DEPTH")]
        total_mutability: Option<usize>,
    },
    /// Inspect, query, expand or check a saved exchange-graph store.
    Store {
        #[command(subcommand)]
        command: StoreCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum StoreCommand {
    /// Summary of a store.
    Info { file: PathBuf },
    /// Load a store, verifying version, checksum and canonical forms.
    Check { file: PathBuf },
    /// Path query: shortest path with fewest red arrows to a node.
    Path {
        file: PathBuf,
        /// Target node id.
        #[arg(
            long,
            conflicts_with = "reddening",
            required_unless_present = "reddening"
        )]
        to: Option<usize>,
        /// Target the all-red vertex.
        #[arg(long)]
        reddening: bool,
    },
    /// Resume exploration with a new budget.
    Expand {
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write here instead of overwriting the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let json = cli.json;
    match commands::run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = if json {
                writeln!(stdout, "{}", out.json)
            } else {
                write!(stdout, "{}", out.text)
            };
            ExitCode::from(match out.status {
                Status::Ok => 0,
                Status::Failed => 1,
                Status::BudgetExhausted => 3,
            })
        }
        Err(e) => {
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "exit_code": e.code() })
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
