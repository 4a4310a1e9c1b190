//! Saving and loading trained models as JSON documents.
//!
//! Trees and forests are stored as node lists (split column, threshold,
//! child indices, leaf class counts). A kNN model stores only `k` and the
//! name of a feature CSV, written next to the document, that holds the
//! training rows and labels.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DecisionTree, FittedModel, GaussianNb, KnnModel, ProbabilisticClassifier, RandomForest};
use crate::features::{FeatureError, FeatureMatrix};

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("kNN training features: {0}")]
    Features(#[from] FeatureError),
    #[error("kNN model: {0}")]
    Model(#[from] super::ModelError),
    #[error("kNN training file has no label column")]
    MissingLabels,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ModelDocument {
    NaiveBayes(GaussianNb),
    Tree(DecisionTree),
    Forest(RandomForest),
    Knn {
        k: usize,
        n_classes: usize,
        features: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PersistError + '_ {
    move |source| PersistError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn knn_features_path(path: &Path) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(".knn.csv");
    path.with_file_name(name)
}

/// Writes `model` to `path`. For kNN an extra CSV is written alongside.
pub fn save_model(model: &FittedModel, path: &Path) -> Result<(), PersistError> {
    let doc = match model {
        FittedModel::NaiveBayes(m) => ModelDocument::NaiveBayes(m.clone()),
        FittedModel::Tree(m) => ModelDocument::Tree(m.clone()),
        FittedModel::Forest(m) => ModelDocument::Forest(m.clone()),
        FittedModel::Knn(m) => {
            let csv_path = knn_features_path(path);
            let names = (1..=m.n_features()).map(|i| format!("f{i}")).collect();
            let fm = FeatureMatrix {
                values: m.training_rows().clone(),
                column_names: names,
                labels: Some(m.training_labels().to_vec()),
            };
            let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
            fm.write_csv(BufWriter::new(file))?;
            ModelDocument::Knn {
                k: m.k(),
                n_classes: m.n_classes(),
                features: csv_path
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned(),
            }
        }
    };
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, &doc).map_err(|source| PersistError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn load_model(path: &Path) -> Result<FittedModel, PersistError> {
    let file = File::open(path).map_err(io_err(path))?;
    let doc: ModelDocument =
        serde_json::from_reader(BufReader::new(file)).map_err(|source| PersistError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(match doc {
        ModelDocument::NaiveBayes(m) => FittedModel::NaiveBayes(m),
        ModelDocument::Tree(m) => FittedModel::Tree(m),
        ModelDocument::Forest(m) => FittedModel::Forest(m),
        ModelDocument::Knn {
            k,
            n_classes,
            features,
        } => {
            let csv_path = path.with_file_name(features);
            let file = File::open(&csv_path).map_err(io_err(&csv_path))?;
            let fm = FeatureMatrix::read_csv(BufReader::new(file))?;
            let labels = fm.labels.ok_or(PersistError::MissingLabels)?;
            FittedModel::Knn(KnnModel::fit(&fm.values, &labels, n_classes, k)?)
        }
    })
}
