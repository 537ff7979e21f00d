use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 2..=4)")]
    Dimension(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("empty site set")]
    EmptySet,
    #[error("resource limit of {limit} objects exceeded after emitting {emitted}")]
    ResourceLimit { limit: u64, emitted: u64 },
    #[error("counter overflow in {0}")]
    Overflow(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("surface profile unavailable: {0}")]
    ProfileUnavailable(String),
    #[error("sampling failure: {0}")]
    Sampling(String),
    #[error("table store: {0}")]
    Table(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
