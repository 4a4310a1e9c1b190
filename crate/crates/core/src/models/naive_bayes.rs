//! Gaussian naive Bayes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_training, check_width, ModelError, ProbabilisticClassifier};
use crate::matrix::Matrix;

/// Relative variance floor, scaled by each column's overall variance.
pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    /// Class frequencies in the training data; absent classes get 0.
    pub priors: Vec<f64>,
    /// `n_classes x d`
    pub means: Matrix,
    /// `n_classes x d`, maximum-likelihood variances after flooring.
    pub variances: Matrix,
    /// Columns constant over the whole training set; they carry no
    /// information and are skipped.
    pub ignored_columns: Vec<usize>,
}

impl GaussianNb {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize) -> Result<GaussianNb, ModelError> {
        check_training(x, y, n_classes)?;
        let (n, d) = (x.rows(), x.cols());

        let mut counts = vec![0usize; n_classes];
        let mut means = Matrix::zeros(n_classes, d);
        for (row, &c) in x.iter_rows().zip(y) {
            counts[c] += 1;
            for (m, v) in means.row_mut(c).iter_mut().zip(row) {
                *m += v;
            }
        }
        for c in 0..n_classes {
            if counts[c] > 0 {
                for m in means.row_mut(c) {
                    *m /= counts[c] as f64;
                }
            }
        }

        let mut variances = Matrix::zeros(n_classes, d);
        for (row, &c) in x.iter_rows().zip(y) {
            for j in 0..d {
                let dev = row[j] - means.get(c, j);
                let v = variances.get(c, j) + dev * dev;
                variances.set(c, j, v);
            }
        }

        let mut ignored_columns = Vec::new();
        for j in 0..d {
            let col_mean = x.iter_rows().map(|r| r[j]).sum::<f64>() / n as f64;
            let col_var = x.iter_rows().map(|r| (r[j] - col_mean).powi(2)).sum::<f64>() / n as f64;
            let floor = VARIANCE_FLOOR * col_var;
            if floor <= 0.0 {
                ignored_columns.push(j);
            }
            for c in 0..n_classes {
                let v = if counts[c] > 0 {
                    variances.get(c, j) / counts[c] as f64
                } else {
                    0.0
                };
                variances.set(c, j, v.max(floor));
            }
        }

        Ok(GaussianNb {
            priors: counts.iter().map(|&k| k as f64 / n as f64).collect(),
            means,
            variances,
            ignored_columns,
        })
    }

    fn predict_row(&self, row: &[f64], out: &mut [f64]) {
        let d = row.len();
        let mut max = f64::NEG_INFINITY;
        for (c, p) in out.iter_mut().enumerate() {
            if self.priors[c] == 0.0 {
                *p = f64::NEG_INFINITY;
                continue;
            }
            let mut log_joint = self.priors[c].ln();
            for j in 0..d {
                if self.ignored_columns.contains(&j) {
                    continue;
                }
                let var = self.variances.get(c, j);
                let dev = row[j] - self.means.get(c, j);
                log_joint -= 0.5 * (2.0 * std::f64::consts::PI * var).ln() + dev * dev / (2.0 * var);
            }
            *p = log_joint;
            max = max.max(log_joint);
        }
        let mut total = 0.0;
        for p in out.iter_mut() {
            *p = (*p - max).exp();
            total += *p;
        }
        for p in out.iter_mut() {
            *p /= total;
        }
    }
}

impl ProbabilisticClassifier for GaussianNb {
    fn n_classes(&self) -> usize {
        self.priors.len()
    }

    fn n_features(&self) -> usize {
        self.means.cols()
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix, ModelError> {
        check_width(self.means.cols(), x)?;
        let m = self.priors.len();
        let mut out = Matrix::zeros(x.rows(), m);
        out.as_mut_slice()
            .par_chunks_mut(m)
            .enumerate()
            .for_each(|(i, p)| self.predict_row(x.row(i), p));
        Ok(out)
    }
}
