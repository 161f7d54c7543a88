use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ring mismatch: operands live over different rings")]
    SpecMismatch,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("not a unit: {0}")]
    NonUnit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("rank out of range: {0}")]
    RankOutOfRange(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
