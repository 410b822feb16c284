use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("n = {n} exceeds the dense spectral cap of {cap}; use a partial spectrum or permutation calibration")]
    Capacity { n: usize, cap: usize },

    #[error("{what} requires a full spectrum of length {n}, got {got} eigenvalues; use permutation calibration instead")]
    PartialSpectrum {
        what: &'static str,
        n: usize,
        got: usize,
    },

    #[error("conjugate gradient did not converge: residual {residual:.3e} after {iterations} iterations (tol {tol:.1e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("Lanczos found {converged} of {wanted} eigenvalues within {steps} steps")]
    LanczosNotConverged {
        wanted: usize,
        converged: usize,
        steps: usize,
        partial: Vec<f64>,
    },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
