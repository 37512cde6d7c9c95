use std::path::PathBuf;

use crate::graph::Pair;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("pair {0} is not part of the pair universe (self-pairs disabled)")]
    SelfPairNotAllowed(Pair),

    #[error("pair {pair} cannot be used as a reference pair: {reason}")]
    InvalidReferencePair { pair: Pair, reason: &'static str },

    #[error("observed edge {0} is also marked unsampled")]
    EdgeMarkedUnsampled(Pair),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("not enough {what}: requested {requested}, available {available}")]
    Insufficient {
        what: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("no observed false edges: conformal calibration needs at least one sampled non-edge")]
    EmptyNullSet,

    #[error("the test set is empty: every pair is sampled, nothing to predict")]
    EmptyTestSet,

    #[error("the training set is empty")]
    EmptyTrainingSet,

    #[error("calibration set is empty")]
    EmptyCalibration,

    #[error("non-finite score {value} for pair {pair}")]
    NonFiniteScore { pair: Pair, value: f64 },

    #[error("training data needs at least one observed true edge and one observed non-edge outside the reference set; a trained scorer needs a calibration size below the number of observed non-edges")]
    MissingClass,

    #[error("calibration leakage: {count} {what} pairs were used as training examples")]
    Leakage { what: &'static str, count: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("selected pair {0} is not in the truth file's test universe")]
    UnknownSelectedPair(Pair),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
