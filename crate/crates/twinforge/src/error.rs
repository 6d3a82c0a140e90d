use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The operation is not permitted through this handle.
    #[error("access denied: {0}")]
    AccessDenied(String),
    /// The physical interaction budget ran out.
    #[error("interaction budget exhausted: {0}")]
    BudgetExhausted(String),
    /// A configuration document failed validation.
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
