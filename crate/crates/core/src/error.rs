use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant signals a violated precondition or invariant. The CLI maps
/// all of them onto exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("invalid matrix entry at ({row}, {col}): {reason}")]
    InvalidEntry {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error("label {label} out of range 1..={k}")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
    #[error("too few objects: need at least {needed}, got {got}")]
    TooFewObjects { needed: usize, got: usize },
    #[error("invalid cluster count k={k} for {n} objects")]
    InvalidK { k: usize, n: usize },
    #[error("exhaustive search limited to {max} objects, got {got}")]
    TooLarge { max: usize, got: usize },
    #[error("column {0} has zero variance")]
    ConstantColumn(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("permutation matching limited to {max} clusters, got {got}")]
    TooManyClusters { max: usize, got: usize },
    #[error("degenerate partition: {0}")]
    DegeneratePartition(String),
    #[error("covariance block is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
