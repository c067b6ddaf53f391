use thiserror::Error;

/// Errors produced by graph construction, parsing and the analyses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid generating set: {0}")]
    InvalidGenSet(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    /// A structural invariant of a graph or action does not hold. The message
    /// names the first violation found.
    #[error("{0}")]
    Invariant(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("insufficient radius: need {required}, have {available}")]
    InsufficientRadius { required: u32, available: u32 },
    #[error("walk reached the truncation boundary")]
    BoundaryReached,
    #[error("enumeration guard exceeded: {count} tuples over limit {limit}; use count-only mode")]
    GuardExceeded { count: String, limit: u64 },
    #[error("cycle length {length} exceeds the configured maximum {max}")]
    CycleLengthGuard { length: usize, max: usize },
    #[error("dense eigensolve refused: {n} vertices exceeds threshold {limit}; use rho0 (iterative)")]
    TooLargeForDense { n: usize, limit: usize },
    #[error("input graph is not vertex-transitive")]
    NotVertexTransitive,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
