use std::fmt;

use thiserror::Error;

/// Which queue on a path ran out of headroom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueueKind {
    Transmission,
    Computation,
}

impl fmt::Display for QueueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueueKind::Transmission => f.write_str("transmission"),
            QueueKind::Computation => f.write_str("computation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unstable {queue} queue: arrival rate {lambda} exceeds stable limit {limit} (service rate {mu})")]
    Unstable { queue: QueueKind, lambda: f64, mu: f64, limit: f64 },

    #[error(
        "infeasible: input rate {x_i} packets/s exceeds total stable capacity {capacity} packets/s \
         (shortfall {shortfall}); per-path caps: {caps:?}"
    )]
    Infeasible { x_i: f64, capacity: f64, shortfall: f64, caps: Vec<f64> },

    #[error("grid oracle refused: {0}")]
    OracleRefused(String),

    #[error("invalid config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { key: key.into(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), message: err.to_string() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
