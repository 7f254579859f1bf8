use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share an input width do not.
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    /// A caller-supplied value is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Text or file input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The instance is larger than an operation's size cap.
    #[error("{what} exceeds the size cap ({limit})")]
    Guard { what: String, limit: String },

    /// An iterative routine failed to converge or a numerical self-check failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn guard(what: impl Into<String>, limit: impl Into<String>) -> Self {
        Error::Guard {
            what: what.into(),
            limit: limit.into(),
        }
    }

    pub(crate) fn check_width(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::WidthMismatch { expected, found })
        }
    }
}
