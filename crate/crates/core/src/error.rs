use thiserror::Error;

pub type Result<T> = std::result::Result<T, QeccError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QeccError {
    #[error("invalid qudit dimension {0}: need n >= 2")]
    InvalidDimension(usize),

    #[error("invalid tolerance {0}: need 0 < tol < 1e-6")]
    InvalidTolerance(f64),

    #[error("logical index {k} out of range for n = {n}")]
    LogicalIndexOutOfRange { k: usize, n: usize },

    #[error("register {register} out of range 1..={registers}")]
    RegisterOutOfRange { register: usize, registers: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator entries must be finite")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("refusing to materialize a {dim}x{dim} operator; apply it slot-wise instead")]
    TooLarge { dim: usize },

    #[error("operation requires n = {expected}, got n = {got}")]
    UnsupportedDimension { expected: usize, got: usize },

    #[error("error-correction conditions violated (diag {diag:e}, offdiag {offdiag:e})")]
    ConditionsViolated { diag: f64, offdiag: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state has no overlap with any syndrome subspace (captured weight {0:e})")]
    Undecodable(f64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
}
