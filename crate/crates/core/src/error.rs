use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must have dimension at least 1")]
    EmptyMatrix,

    #[error("matrix is not sign-skew-symmetric at ({i}, {j})")]
    NotSignSkewSymmetric { i: usize, j: usize },

    #[error("index set must be nonempty")]
    EmptyIndexSet,

    #[error("not a permutation of 1..={n}: {images:?}")]
    InvalidPermutation { images: Vec<usize>, n: usize },

    /// A zero or sign-incoherent c-vector / g-row. Unreachable from valid
    /// inputs, so callers should treat it as corrupted state.
    #[error("{what} {index} is not sign-coherent and nonzero")]
    SignIncoherent { what: &'static str, index: usize },

    #[error("mutation left the sign-skew-symmetric class after prefix {prefix:?}")]
    NotTotallyMutable { prefix: Vec<usize> },

    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("restriction failed at step {step}: {reason}")]
    Restriction { step: usize, reason: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("store format version {found} is not supported (expected {expected})")]
    StoreVersion { found: u32, expected: u32 },

    #[error("store checksum mismatch")]
    Checksum,

    #[error("malformed store: {0}")]
    StoreFormat(String),
}
