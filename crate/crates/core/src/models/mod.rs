//! Probabilistic classifiers sharing one contract.
//!
//! Every model produces, for each input row, a vector of `n_classes`
//! non-negative probabilities summing to one, in category-code order.

mod forest;
mod knn;
mod naive_bayes;
pub mod persist;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

pub use forest::{ForestParams, RandomForest};
pub use knn::KnnModel;
pub use naive_bayes::GaussianNb;
pub use tree::{gini_decrease, DecisionTree, Node, TreeParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("no training rows")]
    EmptyTrainingData,
    #[error("{rows} rows but {labels} labels")]
    LabelCountMismatch { rows: usize, labels: usize },
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("expected {expected} feature columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training features contain non-finite values")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Interface shared by every fitted model.
pub trait ProbabilisticClassifier: Send + Sync {
    fn n_classes(&self) -> usize;

    fn n_features(&self) -> usize;

    /// One probability row per input row.
    fn predict_proba(&self, x: &Matrix) -> Result<Matrix, ModelError>;
}

pub(crate) fn check_training(x: &Matrix, y: &[usize], n_classes: usize) -> Result<(), ModelError> {
    if x.rows() == 0 {
        return Err(ModelError::EmptyTrainingData);
    }
    if y.len() != x.rows() {
        return Err(ModelError::LabelCountMismatch {
            rows: x.rows(),
            labels: y.len(),
        });
    }
    if let Some(&label) = y.iter().find(|&&l| l >= n_classes) {
        return Err(ModelError::LabelOutOfRange { label, n_classes });
    }
    if !x.all_finite() {
        return Err(ModelError::NonFinite);
    }
    Ok(())
}

pub(crate) fn check_width(expected: usize, x: &Matrix) -> Result<(), ModelError> {
    if x.cols() != expected {
        return Err(ModelError::DimensionMismatch {
            expected,
            got: x.cols(),
        });
    }
    Ok(())
}

/// How many columns a split may consider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureSubset {
    All,
    /// `ceil(sqrt(d))`
    Sqrt,
    Count(usize),
}

impl FeatureSubset {
    pub fn resolve(self, n_features: usize) -> Result<usize, ModelError> {
        let m = match self {
            FeatureSubset::All => n_features,
            FeatureSubset::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            FeatureSubset::Count(m) => m,
        };
        if m == 0 || m > n_features {
            return Err(ModelError::InvalidParameter(format!(
                "features_per_split {m} must be between 1 and {n_features}"
            )));
        }
        Ok(m)
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSubset::All => f.write_str("all"),
            FeatureSubset::Sqrt => f.write_str("sqrt"),
            FeatureSubset::Count(m) => write!(f, "{m}"),
        }
    }
}

impl std::str::FromStr for FeatureSubset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(FeatureSubset::All),
            "sqrt" => Ok(FeatureSubset::Sqrt),
            n => n.parse().map(FeatureSubset::Count).map_err(|_| {
                ModelError::InvalidParameter(format!("features_per_split `{n}`"))
            }),
        }
    }
}

/// A model family together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    NaiveBayes,
    Knn { k: usize },
    Tree { params: TreeParams, seed: u64 },
    Forest(ForestParams),
}

impl ModelSpec {
    /// Default spec for a family name (`nb`, `knn`, `tree`, `forest`).
    pub fn for_family(name: &str) -> Result<ModelSpec, ModelError> {
        match name {
            "nb" => Ok(ModelSpec::NaiveBayes),
            "knn" => Ok(ModelSpec::Knn { k: 100 }),
            "tree" => Ok(ModelSpec::Tree {
                params: TreeParams {
                    max_depth: Some(10),
                    ..TreeParams::default()
                },
                seed: 0,
            }),
            "forest" => Ok(ModelSpec::Forest(ForestParams::default())),
            other => Err(ModelError::InvalidParameter(format!(
                "unknown model family `{other}` (expected nb, knn, tree or forest)"
            ))),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::NaiveBayes => "nb",
            ModelSpec::Knn { .. } => "knn",
            ModelSpec::Tree { .. } => "tree",
            ModelSpec::Forest(_) => "forest",
        }
    }

    /// Hyperparameters as ordered name/value pairs, for reports.
    pub fn hyperparameters(&self) -> Vec<(String, String)> {
        fn depth(d: Option<usize>) -> String {
            d.map_or_else(|| "none".to_string(), |d| d.to_string())
        }
        let pair = |k: &str, v: String| (k.to_string(), v);
        match self {
            ModelSpec::NaiveBayes => Vec::new(),
            ModelSpec::Knn { k } => vec![pair("k", k.to_string())],
            ModelSpec::Tree { params, .. } => vec![
                pair("max_depth", depth(params.max_depth)),
                pair("min_samples_leaf", params.min_samples_leaf.to_string()),
                pair("features_per_split", params.features_per_split.to_string()),
                pair("smoothing", params.smoothing.to_string()),
            ],
            ModelSpec::Forest(p) => vec![
                pair("n_estimators", p.n_estimators.to_string()),
                pair("max_depth", depth(p.tree.max_depth)),
                pair("min_samples_leaf", p.tree.min_samples_leaf.to_string()),
                pair("features_per_split", p.tree.features_per_split.to_string()),
                pair("bootstrap", p.bootstrap.to_string()),
                pair("smoothing", p.tree.smoothing.to_string()),
            ],
        }
    }

    /// Sets one named hyperparameter from its text form.
    pub fn set_param(&mut self, name: &str, value: &str) -> Result<(), ModelError> {
        fn parse<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, ModelError> {
            value
                .trim()
                .parse()
                .map_err(|_| ModelError::InvalidParameter(format!("{name} = `{value}`")))
        }
        let family = self.family();
        let unknown = || {
            ModelError::InvalidParameter(format!("`{name}` is not a hyperparameter of {family}"))
        };
        let tree = match (self, name) {
            (ModelSpec::Knn { k }, "k") => {
                *k = parse(name, value)?;
                return Ok(());
            }
            (ModelSpec::Tree { seed, .. }, "seed") => {
                *seed = parse(name, value)?;
                return Ok(());
            }
            (ModelSpec::Forest(p), "n_estimators") => {
                p.n_estimators = parse(name, value)?;
                return Ok(());
            }
            (ModelSpec::Forest(p), "bootstrap") => {
                p.bootstrap = parse(name, value)?;
                return Ok(());
            }
            (ModelSpec::Forest(p), "seed") => {
                p.seed = parse(name, value)?;
                return Ok(());
            }
            (ModelSpec::Tree { params, .. }, _) => params,
            (ModelSpec::Forest(p), _) => &mut p.tree,
            _ => return Err(unknown()),
        };
        match name {
            "max_depth" => {
                tree.max_depth = match value.trim() {
                    "none" | "inf" => None,
                    v => Some(parse(name, v)?),
                }
            }
            "min_samples_leaf" => tree.min_samples_leaf = parse(name, value)?,
            "features_per_split" => tree.features_per_split = value.trim().parse()?,
            "smoothing" => tree.smoothing = parse(name, value)?,
            _ => return Err(unknown()),
        }
        Ok(())
    }

    /// Sets the random seed where the family uses one.
    pub fn set_seed(&mut self, value: u64) {
        match self {
            ModelSpec::Tree { seed, .. } => *seed = value,
            ModelSpec::Forest(p) => p.seed = value,
            _ => {}
        }
    }

    pub fn fit(&self, x: &Matrix, y: &[usize], n_classes: usize) -> Result<FittedModel, ModelError> {
        use rand::SeedableRng;
        Ok(match self {
            ModelSpec::NaiveBayes => FittedModel::NaiveBayes(GaussianNb::fit(x, y, n_classes)?),
            ModelSpec::Knn { k } => FittedModel::Knn(KnnModel::fit(x, y, n_classes, *k)?),
            ModelSpec::Tree { params, seed } => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                FittedModel::Tree(DecisionTree::fit(x, y, n_classes, params, &mut rng)?)
            }
            ModelSpec::Forest(p) => FittedModel::Forest(RandomForest::fit(x, y, n_classes, p)?),
        })
    }
}

/// A trained model of any family.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    NaiveBayes(GaussianNb),
    Knn(KnnModel),
    Tree(DecisionTree),
    Forest(RandomForest),
}

impl FittedModel {
    fn inner(&self) -> &dyn ProbabilisticClassifier {
        match self {
            FittedModel::NaiveBayes(m) => m,
            FittedModel::Knn(m) => m,
            FittedModel::Tree(m) => m,
            FittedModel::Forest(m) => m,
        }
    }
}

impl ProbabilisticClassifier for FittedModel {
    fn n_classes(&self) -> usize {
        self.inner().n_classes()
    }

    fn n_features(&self) -> usize {
        self.inner().n_features()
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix, ModelError> {
        self.inner().predict_proba(x)
    }
}
