use thiserror::Error;

/// Errors raised by the region evaluators and their building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A probability table failed validation.
    #[error("invalid distribution `{name}`: {reason}")]
    InvalidPmf { name: String, reason: String },

    /// A Gaussian information term diverges or is 0/0.
    #[error("infinite or undefined mutual information: {0}")]
    InfiniteInformation(String),

    /// A bound was requested outside the hypothesis under which it holds.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// The request is well-formed but beyond what the exhaustive evaluators handle.
    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
