use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop edge ({node}, {node})")]
    SelfLoop { line: usize, node: String },

    #[error("line {line}: non-finite edge time {value}")]
    NonFiniteTime { line: usize, value: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("time standard deviation needs at least 2 edges, got {0}")]
    TooFewEdges(usize),

    #[error("cannot resolve relative sigma: edge times have zero variance; pass an absolute sigma")]
    ZeroTimeVariance,

    #[error("line graph would hold {required} entries, budget is {budget}")]
    EntryBudget { required: u128, budget: u128 },

    #[error("row {row} has zero sum; cannot normalize")]
    ZeroRowSum { row: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("labels contain a single class")]
    SingleClass,

    #[error("non-finite loss at iteration {0}")]
    NonFiniteLoss(usize),

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
