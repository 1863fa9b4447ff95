use thiserror::Error;

use crate::estimators::SolverReport;
use crate::linalg::HermitianPDS;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("beta = {beta} outside admissible interval ({lower}, 1]")]
    InvalidBeta { beta: f64, lower: f64 },

    #[error("no convergence after {} iterations (residual {:.3e})", .report.iterations, .report.final_residual)]
    NoConvergence {
        last: Box<HermitianPDS>,
        report: SolverReport,
    },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{failed} of {total} trials failed, above the allowed fraction")]
    FailureBudget { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
