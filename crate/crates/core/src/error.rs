use thiserror::Error;

/// Errors raised by instance construction, parsing and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or invariant-violating input.
    #[error("input error: {0}")]
    Input(String),

    /// Input parse failure with a 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A well-formed request outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The exhaustive solver refused an instance above its size limit.
    #[error("instance has {workers} workers, enumeration limit is {limit}")]
    TooLarge { workers: usize, limit: usize },

    /// An internal invariant (IR, welfare sign, consistency) was violated.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for errors caused by the caller's input (CLI exit code 2).
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Input(_) | Error::Parse { .. } | Error::Domain(_) | Error::TooLarge { .. } | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
