use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unsupported generator: {0}")]
    UnsupportedGenerator(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),

    #[error("physics consistency violated: {0}")]
    Physics(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
