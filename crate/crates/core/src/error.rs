use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site {site:?} is outside the region")]
    OutsideRegion { site: Vec<i64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("regions differ")]
    RegionMismatch,

    #[error("invalid parameters: {0}")]
    InvalidParams(Violation),

    #[error("{0}")]
    Domain(String),

    #[error("stop rule can never be satisfied without a time limit")]
    UnreachableStop,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
