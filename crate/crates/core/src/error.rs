use thiserror::Error;

pub type Result<T> = std::result::Result<T, DdlError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdlError {
    /// Invalid parameters, grids or splits. Nothing was computed.
    #[error("configuration error: {0}")]
    Config(String),
    /// A computation produced a non-finite or otherwise unusable value.
    #[error("computation error: {0}")]
    Computation(String),
    /// An argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
}

impl DdlError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        DdlError::Config(msg.into())
    }

    pub(crate) fn computation(msg: impl Into<String>) -> Self {
        DdlError::Computation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        DdlError::Domain(msg.into())
    }
}
