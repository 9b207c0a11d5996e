use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeylError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {iterations} sweeps at index {index}")]
    EigenNoConvergence { index: usize, iterations: usize },

    #[error("truncation not converged: change {change:.3e} > tol {tol:.3e} at N = {n}")]
    TruncationNoConvergence { n: usize, change: f64, tol: f64 },

    #[error("symbol parse error: {0}")]
    Symbol(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, WeylError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> WeylError {
    WeylError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
