use thiserror::Error;

/// Crate-wide error type.
///
/// `Input` covers precondition violations (dimension mismatches, parameters
/// out of range, malformed files); `Resource` covers guards against runs that
/// would exhaust memory; `Verification` is reserved for failed property
/// suites so the CLI can map it to exit code 1.
#[derive(Error, Debug)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
