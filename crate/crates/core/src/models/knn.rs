//! Brute-force k-nearest-neighbour class frequencies.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::{check_training, check_width, ModelError, ProbabilisticClassifier};
use crate::matrix::Matrix;

/// Stores the training rows; distances are Euclidean on the raw columns.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    train: Matrix,
    labels: Vec<usize>,
    n_classes: usize,
    k: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearer first; equal distances resolved by lower training row index.
fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

impl KnnModel {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, k: usize) -> Result<KnnModel, ModelError> {
        check_training(x, y, n_classes)?;
        if k == 0 || k > x.rows() {
            return Err(ModelError::InvalidParameter(format!(
                "k = {k} must be between 1 and the {} training rows",
                x.rows()
            )));
        }
        Ok(KnnModel {
            train: x.clone(),
            labels: y.to_vec(),
            n_classes,
            k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn training_rows(&self) -> &Matrix {
        &self.train
    }

    pub fn training_labels(&self) -> &[usize] {
        &self.labels
    }

    fn predict_row(&self, query: &[f64], scratch: &mut Vec<(f64, usize)>, out: &mut [f64]) {
        scratch.clear();
        scratch.extend(
            self.train
                .iter_rows()
                .enumerate()
                .map(|(i, r)| (squared_distance(query, r), i)),
        );
        let k = self.k;
        if k < scratch.len() {
            scratch.select_nth_unstable_by(k - 1, by_distance_then_index);
        }
        out.iter_mut().for_each(|p| *p = 0.0);
        for &(_, i) in &scratch[..k] {
            out[self.labels[i]] += 1.0;
        }
        for p in out.iter_mut() {
            *p /= k as f64;
        }
    }
}

impl ProbabilisticClassifier for KnnModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.train.cols()
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix, ModelError> {
        check_width(self.train.cols(), x)?;
        let mut out = Matrix::zeros(x.rows(), self.n_classes);
        out.as_mut_slice()
            .par_chunks_mut(self.n_classes)
            .enumerate()
            .for_each_init(
                || Vec::with_capacity(self.train.rows()),
                |scratch, (i, p)| self.predict_row(x.row(i), scratch, p),
            );
        Ok(out)
    }
}
