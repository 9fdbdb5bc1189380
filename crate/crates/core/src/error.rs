use thiserror::Error;

/// Errors raised while building meshes, assembling operators or solving for
/// the dimension.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mesh resolution N = {0} must be a positive even integer")]
    InvalidResolution(i64),

    #[error("point ({x}, {y}) is not covered by any mesh square")]
    OutOfDomain { x: f64, y: f64 },

    #[error("image point ({x}, {y}) lies below the real axis for an alphabet that maps into the upper half-plane")]
    SymmetryViolation { x: f64, y: f64 },

    #[error("lower correction factor {err1} >= 1 at s = {s}; the mesh is too coarse")]
    CorrectionTooLarge { err1: f64, s: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("eigen iteration did not converge after {iterations} iterations (last width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },

    #[error("eigen iteration stagnated after {iterations} iterations; the dominant eigenvalue is not isolated")]
    OscillationDetected { iterations: usize },

    #[error("spectral radius never crossed 1 (last s = {s}, log r = {log_r})")]
    NoBracket { s: f64, log_r: f64 },

    #[error("{side} certificate failed at s = {s} after {retries} retries")]
    CertificateFailure {
        side: &'static str,
        s: f64,
        retries: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
