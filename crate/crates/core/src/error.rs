use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A series (power or asymptotic) did not meet its truncation test.
    #[error("series for B_{order}({argument}) did not converge within {terms} terms")]
    NonConvergence { order: f64, argument: f64, terms: usize },

    /// Kernel evaluation failed while populating a transform plan.
    #[error("kernel J_{lambda}({x}) could not be evaluated: {source}")]
    KernelEntry {
        lambda: f64,
        x: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("function does not live on the plan's grid")]
    GridMismatch,

    #[error("solver report is not solvable; no solution to check")]
    ReportNotSolvable,

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn exponent(msg: impl Into<String>) -> Self {
        Error::InvalidExponent(msg.into())
    }

    /// True when the root cause is a series that failed to converge.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } => true,
            Error::KernelEntry { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}
