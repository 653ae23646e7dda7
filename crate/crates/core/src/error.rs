use thiserror::Error;

/// Failure categories shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("infinite detuning: {0}")]
    InfiniteDetuning(String),
    #[error("unreachable amplitude: {0}")]
    UnreachableAmplitude(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

impl Error {
    /// Short machine-readable category tag.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NoSolution(_) => "no-solution",
            Error::InfiniteDetuning(_) => "infinite-detuning",
            Error::UnreachableAmplitude(_) => "unreachable-amplitude",
            Error::NumericFailure(_) => "numeric-failure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
