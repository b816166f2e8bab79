use std::io;

use thiserror::Error;

/// Failure while reading an instance, solution or registry file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    /// 1-based line number, 0 when the problem is not tied to a single line.
    pub line: usize,
    pub reason: String,
}

impl ParseError {
    pub fn new(line: usize, reason: impl Into<String>) -> Self {
        Self {
            line,
            reason: reason.into(),
        }
    }
}

/// Invalid run or experiment configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown acceptance criterion `{0}` (expected c1..c7)")]
    UnknownAcceptance(String),
    #[error("unknown degree mechanism `{0}` (expected d1..d4)")]
    UnknownDegree(String),
    #[error("parameter `{name}` out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("best known value must be positive, got {0}")]
    NonPositiveBks(f64),
    #[error("cannot summarize an empty sample")]
    EmptySample,
    #[error("local search requires a feasible solution (total excess {0})")]
    Infeasible(i64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
