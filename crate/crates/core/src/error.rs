use thiserror::Error;

/// Errors produced by basis construction, matrix assembly, and metrics.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: out-of-range sites, dimension mismatches, bad parameters.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical invariant was violated (e.g. a state lost its norm),
    /// signalling broken evolution upstream rather than bad user input.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// A requested computation exceeds the dense-tractability bounds.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
