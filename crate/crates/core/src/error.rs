use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed input data. `line` is 1-based; 0 means the file as a whole.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// Too few extrema to build a sifting curve; the signal is a residual.
    #[error("residual signal: {maxima} maxima, {minima} minima")]
    ResidualSignal { maxima: usize, minima: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: msg.into(),
        }
    }

    pub fn is_residual(&self) -> bool {
        matches!(self, Error::ResidualSignal { .. })
    }
}
