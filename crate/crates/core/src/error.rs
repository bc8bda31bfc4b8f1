use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An exact count or intermediate power did not fit in 128 bits.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// A size guard protecting against runaway enumeration was exceeded.
    #[error("size guard exceeded: {0}")]
    Guard(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn overflow(msg: impl Into<String>) -> Error {
    Error::Overflow(msg.into())
}
