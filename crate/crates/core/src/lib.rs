//! Crime category classification for San Francisco incident reports.
//!
//! The pipeline is: [`ingest`] the CSV files, turn rows into numeric
//! [`features`], optionally append [`pca`] scores, fit one of the
//! [`models`], and score or export predictions with [`eval`].

pub mod eval;
pub mod features;
pub mod ingest;
pub mod matrix;
pub mod models;
pub mod pca;
pub mod synth;

use thiserror::Error;

pub use eval::{multiclass_log_loss, EvalError, SplitSpec, SweepReport};
pub use features::{build_feature_matrix, fit_encodings, EncodingMaps, FeatureError, FeatureMatrix};
pub use ingest::{IngestError, LoadOptions, RawIncident, Timestamp, Weekday};
pub use matrix::{Matrix, ShapeError};
pub use models::persist::PersistError;
pub use models::{FittedModel, ModelError, ModelSpec, ProbabilisticClassifier};
pub use pca::{pca_fit, PcaError, PcaModel};

/// Coarse classification of failures, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Persist(#[from] PersistError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Usage(_) => ErrorKind::Usage,
            Error::Pca(PcaError::InvalidComponents { .. }) => ErrorKind::Usage,
            Error::Pca(PcaError::Parse(_)) | Error::Pca(PcaError::DimensionMismatch { .. }) => {
                ErrorKind::Data
            }
            Error::Pca(_) => ErrorKind::Numeric,
            Error::Features(FeatureError::Pca(PcaError::NoConvergence(_) | PcaError::NonFinite)) => {
                ErrorKind::Numeric
            }
            Error::Model(ModelError::InvalidParameter(_)) => ErrorKind::Usage,
            Error::Model(ModelError::NonFinite) => ErrorKind::Numeric,
            Error::Eval(EvalError::BadFraction(_) | EvalError::EmptyGrid | EvalError::EmptyAxis(_)) => {
                ErrorKind::Usage
            }
            Error::Eval(EvalError::GridPoint { source: ModelError::InvalidParameter(_), .. }) => {
                ErrorKind::Usage
            }
            Error::Eval(EvalError::NonFinite(_) | EvalError::InvalidProbability { .. }) => {
                ErrorKind::Numeric
            }
            _ => ErrorKind::Data,
        }
    }
}
