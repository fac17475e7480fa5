use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are grouped by how a caller is expected to react: domain,
/// config and data errors mean the input is wrong; budget and resolution
/// errors mean the input is fine but more resources are needed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("permutation budget exceeded: {required} product terms required, budget is {budget}")]
    Budget { required: u128, budget: u128 },
    #[error("resolution guard: {required} nodes per axis required on axis {axis}, {available} configured")]
    Resolution {
        axis: usize,
        required: usize,
        available: usize,
    },
    #[error("resource error: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors caused by resource limits rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. } | Error::Resolution { .. } | Error::Resource(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
