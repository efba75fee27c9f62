use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied inconsistent arguments (dimension mismatch, bad range, malformed config).
    #[error("usage error: {0}")]
    Usage(String),

    /// A mathematical precondition failed (non-positive form, non-positive density).
    #[error("domain error: {0}")]
    Domain(String),

    /// Newton iteration lost positivity and line search could not restore it.
    #[error("solver failure after {iters} Newton steps: {reason} (residual {residual:e})")]
    SolverFailure {
        reason: String,
        iters: usize,
        residual: f64,
        /// Last accepted iterate, mean-zero gauge.
        iterate: Vec<f64>,
    },

    #[error("no convergence within {iters} Newton steps (final residual {residual:e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
