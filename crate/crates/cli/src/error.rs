use ddl_core::DdlError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Computation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 for configuration, 3 for computation, 1 for i/o.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<DdlError> for CliError {
    fn from(e: DdlError) -> Self {
        match e {
            DdlError::Config(m) | DdlError::Domain(m) => CliError::Config(m),
            DdlError::Computation(m) => CliError::Computation(m),
        }
    }
}
