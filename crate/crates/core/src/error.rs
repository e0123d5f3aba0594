use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input fell outside the domain of a physical formula.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Hard-core packing could not place every point.
    #[error("point process sampling failed: {0}")]
    Packing(String),

    #[error("empirical distribution needs at least one sample")]
    EmptySamples,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
