use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {key}: {reason}")]
    Config { key: String, reason: String },

    #[error("deployment generation failed: constraint `{constraint}` unsatisfiable after {attempts} attempts")]
    Generation { constraint: &'static str, attempts: usize },

    #[error("distance must be positive, got {0} m")]
    Domain(f64),

    #[error("unknown link {0}")]
    UnknownLink(String),

    #[error("out-of-order arrival: packet {id} at {arrival_ms} ms after {last_ms} ms")]
    Ordering { id: u64, arrival_ms: f64, last_ms: f64 },

    #[error("interference-plus-noise covariance is not positive definite")]
    Conditioning,

    #[error("baseline mean throughput is zero; relative gain undefined")]
    UndefinedGain,

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
