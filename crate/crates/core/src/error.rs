use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum FracError {
    /// An argument lies outside the admissible domain of an operation.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    /// An iterative method exhausted its iteration budget.
    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Snapshot solve failure, tagged with the offending snapshot time.
    #[error("snapshot solve at t = {t:e} failed: {source}")]
    Snapshot {
        t: f64,
        #[source]
        source: Box<FracError>,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FracError {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        FracError::Domain {
            name,
            value,
            reason,
        }
    }

    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            FracError::NotConverged { .. } | FracError::NotPositiveDefinite { .. } => true,
            FracError::Snapshot { .. } => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, FracError>;
