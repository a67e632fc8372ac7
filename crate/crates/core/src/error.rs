use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("{source_name}:{line}: {message}")]
    Config {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("mass matrix is singular (det = {det:e})")]
    SingularMassMatrix { det: f64 },

    #[error("integration produced a non-finite state at substep {substep}")]
    Integration { substep: usize },

    #[error("safety violation: commanded {commanded} V ({reason})")]
    SafetyViolation { commanded: f64, reason: &'static str },

    #[error("reset controller `{controller}` did not converge after {elapsed:.3} s (final state {final_state:?})")]
    ResetFailed {
        controller: &'static str,
        elapsed: f64,
        final_state: [f64; 4],
    },

    #[error("full state not available yet: need two sensor frames")]
    NotReady,

    #[error("operation not supported for task `{0}`")]
    UnsupportedTask(String),

    #[error("protocol error: {0}")]
    Protocol(&'static str),

    #[error("CARE solver failed: {reason} (residual history {residuals:?})")]
    SolverFailed {
        reason: String,
        residuals: Vec<f64>,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Usage(_) | Error::Config { .. } | Error::InvalidParameter { .. }
        )
    }
}
