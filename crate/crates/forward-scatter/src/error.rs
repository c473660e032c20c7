//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max deviation {deviation:.3e} exceeds tolerance {tolerance:.3e})")]
    NotSymmetric { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("eigensolver failed to converge within {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("eigenvalue {value:.6e} is negative beyond tolerance {tolerance:.3e}")]
    NegativeEigenvalue { value: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("selected subset is degenerate (lies on a hyperplane)")]
    DegenerateSubset,

    #[error("all weighted chi-square weights are zero")]
    AllZeroWeights,

    #[error("data error at line {line}: {message}")]
    Data { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(context: impl Into<String>) -> Self {
        Error::DimensionMismatch { context: context.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
