use thiserror::Error;

use crate::conic::SolveStatus;

/// Errors raised by the allocation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwiptError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("value {value} for `{name}` is outside [{lo}, {hi}]")]
    OutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("conic solver stopped with status {0:?}")]
    Solver(SolveStatus),
}

pub type Result<T> = std::result::Result<T, SwiptError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> SwiptError {
    SwiptError::InvalidParameter { name, reason: reason.into() }
}
