use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller combined arguments in a way the operation does not accept.
    #[error("usage error: {0}")]
    Usage(String),

    /// Guarded floating-point membership tests could not decide some points.
    #[error("{count} boundary comparisons fell inside the guard interval")]
    Ambiguous { count: u64 },

    /// An exact integer quantity exceeded the 128-bit working range.
    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("row at x = {x} failed: {source}")]
    Row { x: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
