use std::path::PathBuf;

use thiserror::Error;

use crate::pipeline::MergeTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("eigendecomposition did not converge within {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("membership constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("cluster {cluster} has zero total membership weight")]
    EmptyCluster { cluster: usize },

    #[error("cluster {cluster} degenerated at iteration {iteration}")]
    DegenerateCluster { cluster: usize, iteration: usize },

    #[error("need at least 2 clusters, got {0}")]
    TooFewClusters(usize),

    #[error("no admissible rank for a spectrum of dimension {0}")]
    NoAdmissibleRank(usize),

    #[error("label count mismatch: {predicted} predictions vs {truth} true labels")]
    LabelMismatch { predicted: usize, truth: usize },

    #[error("merge epoch {epoch}: {source}")]
    Epoch {
        epoch: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sweep at c = {c}: {source}")]
    Sweep {
        c: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("merging did not settle within {} outer iterations", .0.iterations.len())]
    OuterIterationLimit(Box<MergeTrace>),

    #[error("{path}: row {row}, column {column}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
