use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("group closure exceeded {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("decomposition unstable after {attempts} attempts")]
    DecompositionUnstable { attempts: usize },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("geometry error: {0}")]
    GeometryError(String),
    #[error("frame degenerated: {0}")]
    FrameError(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
