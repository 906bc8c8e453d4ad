use alloc::string::String;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("tree has no strategies")]
    NoStrategies,

    #[error("invalid tree: {0}")]
    InvalidTree(ValidationReport),

    #[error("{what} = {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("weighting locus mismatch: {0}")]
    LocusMismatch(&'static str),

    #[error("strategies do not share a common state space: {0}")]
    StateSpaceMismatch(String),

    #[error("invalid lambda interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid lambda grid: {0}")]
    InvalidGrid(&'static str),

    #[error("path count {count} exceeds the limit of {limit}")]
    TooManyPaths { count: u64, limit: u64 },
}
