//! Scoring, validation splits, hyperparameter sweeps and submission files.

mod metric;
mod split;
mod submission;
mod sweep;

use thiserror::Error;

use crate::models::ModelError;

pub use metric::{multiclass_log_loss, CLIP_EPSILON};
pub use split::{split, SplitIndices, SplitSpec};
pub use submission::{write_submission, SUBMISSION_CLASSES};
pub use sweep::{expand_grid, run_sweep, run_sweep_on_split, SweepReport, SweepRow};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{rows} probability rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("probability row {row} sums to {sum}, not 1")]
    NotNormalized { row: usize, sum: f64 },
    #[error("probability row {row} contains a negative or non-finite value")]
    InvalidProbability { row: usize },
    #[error("nothing to score")]
    Empty,
    #[error("validation fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
    #[error("split of {rows} rows leaves an empty subset")]
    DegenerateSplit { rows: usize },
    #[error("class {class} has a single row; stratification needs at least 2")]
    SingletonClass { class: usize },
    #[error("features carry no labels")]
    MissingLabels,
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("grid point {point}: {source}")]
    GridPoint {
        point: String,
        #[source]
        source: ModelError,
    },
    #[error("grid axis `{0}` has no values")]
    EmptyAxis(String),
    #[error("submission: expected {expected} probability columns, got {got}")]
    ColumnCount { expected: usize, got: usize },
    #[error("submission: duplicate id {0}")]
    DuplicateId(u64),
    #[error("submission: non-finite probability in row {0}")]
    NonFinite(usize),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}
