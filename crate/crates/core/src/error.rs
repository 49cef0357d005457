use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown element id {0}")]
    UnknownElement(usize),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("caller error: {0}")]
    Caller(String),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
}

impl Error {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            Error::Budget(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
