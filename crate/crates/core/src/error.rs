use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Arguments outside an operation's domain.
    #[error("invalid parameters: {0}")]
    Parameter(String),

    /// An exhaustive search would visit more nodes than allowed.
    #[error("search exceeded capacity of {limit} nodes")]
    Capacity { limit: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
