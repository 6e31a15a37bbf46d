//! Error type shared by every module of the simulator.

use std::path::PathBuf;

/// Errors surfaced by waveform construction, signal processing and the
/// simulation runner.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    /// A caller-supplied argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two sequences that must agree in length did not.
    #[error("length mismatch: {context} ({left} vs {right})")]
    LengthMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    /// A configuration file or value failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// An I/O failure, annotated with the path that produced it.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SimError::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}
