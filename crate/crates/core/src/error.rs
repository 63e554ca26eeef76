use thiserror::Error;

/// Errors raised by constructors, oracles and verifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),

    #[error("matrix is not bistochastic (row deviation {deviation:.3e})")]
    NotBistochastic { deviation: f64 },

    #[error("Kraus operators are not trace preserving (deviation {deviation:.3e})")]
    KrausIncomplete { deviation: f64 },

    #[error("max_k p_k = {max:.6} exceeds 1/{m}")]
    PermutohedronViolation { max: f64, m: usize },

    #[error("states are not mutually orthogonal (residual {residual:.3e})")]
    NotOrthogonal { residual: f64 },

    #[error("not a coarse-graining matrix: {0}")]
    NotCoarseGraining(String),

    #[error("not a correlation matrix: {0}")]
    NotCorrelation(String),

    #[error("triangle inequality fails for column {column}")]
    TriangleViolation { column: usize },

    #[error("family members do not share the classical action (deviation {deviation:.3e})")]
    ActionMismatch { deviation: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("oracle could not certify: {0}")]
    NotCertified(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// A property that holds by construction was violated numerically.
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
