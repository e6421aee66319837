use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("requested {requested} flows but only {available} connected ordered pairs exist")]
    TooManyFlows { requested: usize, available: usize },
    #[error("invalid simulation parameter: {0}")]
    InvalidParameter(String),
    #[error("flow {0}: {1}")]
    InvalidFlow(usize, String),
    #[error(transparent)]
    Topology(#[from] meshtopo_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
