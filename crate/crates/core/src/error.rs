use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::quiver::Edge;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex index {0}, expected 1, 2 or 3")]
    InvalidVertex(i64),

    #[error("weight on edge {edge} is not finite ({value})")]
    NonFinite { edge: Edge, value: f64 },

    #[error("weight {value:e} on edge {edge} exceeds the working range {limit:e}")]
    OutOfRange { edge: Edge, value: f64, limit: f64 },

    #[error("mutation step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("certificate check failed at step {step}: {detail}")]
    CertificateViolation { step: usize, detail: String },

    #[error("step budget of {0} mutations exhausted before reaching the target")]
    StepBudgetExhausted(usize),

    #[error("invalid geometric configuration: {0}")]
    InvalidConfiguration(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_step(step: usize, err: Error) -> Error {
        Error::AtStep {
            step,
            source: Box::new(err),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Strips any `AtStep` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}
