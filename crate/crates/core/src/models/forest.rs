//! Random forest of CART trees.
//!
//! Tree `i` draws all of its randomness (bootstrap rows and per-split
//! column subsets) from a ChaCha8 stream seeded with `seed ^ i`, so the
//! fitted forest is the same whatever the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_training, check_width, DecisionTree, FeatureSubset, ModelError,
    ProbabilisticClassifier, TreeParams,
};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 200,
            tree: TreeParams {
                max_depth: Some(13),
                features_per_split: FeatureSubset::Sqrt,
                ..TreeParams::default()
            },
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    params: ForestParams,
    n_classes: usize,
    n_features: usize,
}

impl RandomForest {
    pub fn fit(
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        params: &ForestParams,
    ) -> Result<RandomForest, ModelError> {
        check_training(x, y, n_classes)?;
        if params.n_estimators == 0 {
            return Err(ModelError::InvalidParameter(
                "n_estimators must be >= 1".into(),
            ));
        }
        params.tree.validate(x.cols())?;
        let n = x.rows();
        let trees = (0..params.n_estimators)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ i as u64);
                let rows = if params.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_rows(x, y, n_classes, &params.tree, rows, &mut rng)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RandomForest {
            trees,
            params: params.clone(),
            n_classes,
            n_features: x.cols(),
        })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }
}

impl ProbabilisticClassifier for RandomForest {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    /// Arithmetic mean of the member trees' rows, summed in tree order.
    fn predict_proba(&self, x: &Matrix) -> Result<Matrix, ModelError> {
        check_width(self.n_features, x)?;
        let m = self.n_classes;
        let n_trees = self.trees.len() as f64;
        let mut out = Matrix::zeros(x.rows(), m);
        out.as_mut_slice()
            .par_chunks_mut(m)
            .enumerate()
            .for_each_init(
                || vec![0.0; m],
                |tmp, (i, acc)| {
                    let row = x.row(i);
                    for tree in &self.trees {
                        tree.leaf_proba_into(row, tmp);
                        for (a, t) in acc.iter_mut().zip(tmp.iter()) {
                            *a += t;
                        }
                    }
                    for a in acc.iter_mut() {
                        *a /= n_trees;
                    }
                },
            );
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(seed: u64, n: usize, d: usize, classes: usize) -> (Matrix, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = Matrix::new(n, d, data).unwrap();
        let y = (0..n)
            .map(|i| {
                let s: f64 = x.row(i).iter().sum();
                ((s + d as f64) * classes as f64 / (2.0 * d as f64)) as usize % classes
            })
            .collect();
        (x, y)
    }

    #[test]
    fn single_tree_reduction_is_bitwise() {
        let (x, y) = dataset(1, 150, 4, 3);
        let tree_params = TreeParams {
            max_depth: Some(6),
            features_per_split: FeatureSubset::All,
            ..TreeParams::default()
        };
        let forest = RandomForest::fit(
            &x,
            &y,
            3,
            &ForestParams {
                n_estimators: 1,
                tree: tree_params.clone(),
                bootstrap: false,
                seed: 77,
            },
        )
        .unwrap();
        let tree =
            DecisionTree::fit(&x, &y, 3, &tree_params, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
        assert_eq!(forest.predict_proba(&x).unwrap(), tree.predict_proba(&x).unwrap());
    }

    #[test]
    fn seeded_runs_are_identical() {
        let (x, y) = dataset(2, 200, 5, 4);
        let params = ForestParams {
            n_estimators: 12,
            seed: 5,
            ..ForestParams::default()
        };
        let a = RandomForest::fit(&x, &y, 4, &params).unwrap();
        let b = RandomForest::fit(&x, &y, 4, &params).unwrap();
        assert_eq!(a.predict_proba(&x).unwrap(), b.predict_proba(&x).unwrap());
        let c = RandomForest::fit(&x, &y, 4, &ForestParams { seed: 6, ..params }).unwrap();
        assert_ne!(a.predict_proba(&x).unwrap(), c.predict_proba(&x).unwrap());
    }

    #[test]
    fn smaller_forest_is_a_prefix_of_a_larger_one() {
        let (x, y) = dataset(6, 200, 5, 4);
        let params = ForestParams {
            n_estimators: 10,
            seed: 13,
            ..ForestParams::default()
        };
        let big = RandomForest::fit(&x, &y, 4, &params).unwrap();
        let small = RandomForest::fit(&x, &y, 4, &ForestParams { n_estimators: 4, ..params }).unwrap();
        for (a, b) in small.trees().iter().zip(big.trees()) {
            assert_eq!(a.nodes(), b.nodes());
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let (x, y) = dataset(3, 200, 5, 4);
        let params = ForestParams {
            n_estimators: 8,
            seed: 9,
            ..ForestParams::default()
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    RandomForest::fit(&x, &y, 4, &params)
                        .unwrap()
                        .predict_proba(&x)
                        .unwrap()
                })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn averages_member_trees() {
        let (x, y) = dataset(4, 100, 3, 3);
        let forest = RandomForest::fit(
            &x,
            &y,
            3,
            &ForestParams {
                n_estimators: 3,
                ..ForestParams::default()
            },
        )
        .unwrap();
        let p = forest.predict_proba(&x).unwrap();
        let members: Vec<Matrix> = forest
            .trees()
            .iter()
            .map(|t| t.predict_proba(&x).unwrap())
            .collect();
        for i in 0..x.rows() {
            for c in 0..3 {
                let mean = members.iter().map(|m| m.get(i, c)).sum::<f64>() / 3.0;
                assert!((p.get(i, c) - mean).abs() < 1e-15);
            }
            assert!((p.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_zero_trees() {
        let (x, y) = dataset(5, 10, 2, 2);
        let params = ForestParams {
            n_estimators: 0,
            ..ForestParams::default()
        };
        assert!(RandomForest::fit(&x, &y, 2, &params).is_err());
    }
}
