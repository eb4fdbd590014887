use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid spectral function '{spec}': {reason}")]
    InvalidFunction { spec: String, reason: String },

    #[error("cascade factor {factor} does not divide polynomial order {order}")]
    CascadeNotDivisor { order: usize, factor: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(
        "non-finite value at recursion step {step}; the matrix spectrum likely exceeds [-1, 1], rescale by its spectral norm first"
    )]
    NonFinite { step: usize },

    #[error("matrix of size {n} exceeds the dense oracle cap of {cap}; exact evaluation is desk-scale only")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("dense eigensolver residual {residual:e} exceeds tolerance {tolerance:e}")]
    OracleResidual { residual: f64, tolerance: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
