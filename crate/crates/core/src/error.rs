use thiserror::Error;

/// Crate-wide error type. `Domain` covers precondition and parameter
/// violations; the I/O and parse variants cover file handling in the
/// harness and CLI layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }

    /// Process exit code convention: 1 for domain/construction errors,
    /// 2 for I/O and parse failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Construction(_) => 1,
            Error::Io(_) | Error::Parse(_) => 2,
        }
    }
}
