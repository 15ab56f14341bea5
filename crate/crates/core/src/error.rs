use thiserror::Error;

/// Which diagonal block of `Q(S)` failed to factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Sampled,
    Complement,
    Full,
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Block::Sampled => write!(f, "M_SS"),
            Block::Complement => write!(f, "M_ScSc"),
            Block::Full => write!(f, "M"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid sampling set: {0}")]
    InvalidSamplingSet(String),

    #[error("block {0} is not positive definite; add a ridge (--ridge) to the variation operator")]
    SingularBlock(Block),

    #[error("symmetric eigensolver did not converge")]
    EigFailure,

    #[error("normal matrix U_SK^T Q_S U_SK is rank deficient for K = {k}")]
    SingularNormalMatrix { k: usize },

    #[error("invalid band size K = {k} for |S| = {set_size}")]
    InvalidBandSize { k: usize, set_size: usize },

    #[error("infeasible size: {0}")]
    InfeasibleSize(String),

    #[error("brute force over {count} subsets exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },

    #[error("partition has no subsets")]
    EmptyPartition,

    #[error("test signal {index} has zero energy")]
    ZeroSignal { index: usize },

    #[error("Cholesky factorization failed after jitter up to {jitter:.3e}")]
    CholeskyFailure { jitter: f64 },

    #[error("sample covariance is singular even with regularization {epsilon:.3e}")]
    SingularCovariance { epsilon: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error in {source_name} at line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Input validation problems, as opposed to numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::NotSymmetric { .. }
                | Error::NotSquare { .. }
                | Error::NonFinite { .. }
                | Error::InvalidSamplingSet(_)
                | Error::InvalidBandSize { .. }
                | Error::InfeasibleSize(_)
                | Error::TooLarge { .. }
                | Error::EmptyPartition
                | Error::ZeroSignal { .. }
                | Error::InvalidConfig(_)
                | Error::Parse { .. }
                | Error::Io { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
