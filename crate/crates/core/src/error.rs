use thiserror::Error;

/// Errors raised while configuring or running a solve.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index ({i}, {j}) is not an interior node of a {nx}x{ny} grid")]
    OutOfRange { i: usize, j: usize, nx: usize, ny: usize },

    #[error("singular basis: {0}")]
    SingularBasis(String),

    #[error("singular tridiagonal system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("repeated nodes {i} and {j} in derivative recursion")]
    RepeatedNodes { i: usize, j: usize },

    #[error("degenerate Neumann boundary: 2x2 determinant {det:e} is zero")]
    DegenerateBoundary { det: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("solution diverged at step {step} (t = {time})")]
    Divergence { step: usize, time: f64 },

    #[error("matrix dimension {dim} exceeds the dense eigenvalue cap {cap}; use a coarser grid")]
    DimensionCap { dim: usize, cap: usize },

    #[error("undefined convergence order: {0}")]
    UndefinedOrder(String),

    #[error("reference table integrity check failed: expected digest {expected}, got {actual}")]
    ReferenceDigest { expected: String, actual: String },

    #[error("eigenvalue decomposition failed: {0}")]
    Eigen(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
