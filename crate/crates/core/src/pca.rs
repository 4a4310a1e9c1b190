//! Principal component analysis on standardized columns.
//!
//! Columns are centered and scaled to unit sample variance, the sample
//! covariance of the standardized data is diagonalized with cyclic Jacobi
//! rotations, and the top `k` axes are kept.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::matrix::Matrix;

/// Off-diagonal Frobenius norm at which Jacobi iteration stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcaError {
    #[error("component count {k} must be between 1 and {d}")]
    InvalidComponents { k: usize, d: usize },
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Jacobi iteration did not converge (off-diagonal norm {0:e})")]
    NoConvergence(f64),
    #[error("malformed PCA model document: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Sample standard deviation per column, 1 for constant columns.
    pub scale: Vec<f64>,
    /// `k x d`, one unit-length principal axis per row.
    pub components: Matrix,
    /// Variance of the standardized data along each axis, non-increasing.
    pub explained_variance: Vec<f64>,
    /// Columns found constant during fitting.
    pub constant_columns: Vec<usize>,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and a matrix whose columns are the
/// matching eigenvectors.
pub fn symmetric_eigen(matrix: &Matrix) -> Result<(Vec<f64>, Matrix), PcaError> {
    let n = matrix.rows();
    if matrix.cols() != n {
        return Err(PcaError::DimensionMismatch {
            expected: n,
            got: matrix.cols(),
        });
    }
    let mut a = matrix.clone();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }

    let off_norm = |a: &Matrix| {
        let mut sum = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    sum += a.get(p, q) * a.get(p, q);
                }
            }
        }
        sum.sqrt()
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off >= JACOBI_TOLERANCE {
        if sweeps == MAX_SWEEPS {
            return Err(PcaError::NoConvergence(off));
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
        off = off_norm(&a);
    }
    Ok(((0..n).map(|i| a.get(i, i)).collect(), v))
}

/// Fits a `k`-component model on the rows of `matrix`.
pub fn pca_fit(matrix: &Matrix, k: usize) -> Result<PcaModel, PcaError> {
    let (n, d) = (matrix.rows(), matrix.cols());
    if k < 1 || k > d {
        return Err(PcaError::InvalidComponents { k, d });
    }
    if n < 2 {
        return Err(PcaError::TooFewRows(n));
    }
    if !matrix.all_finite() {
        return Err(PcaError::NonFinite);
    }

    let mut mean = vec![0.0; d];
    for row in matrix.iter_rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let first = matrix.row(0);
    let mut constant_columns = Vec::new();
    let mut scale = vec![0.0; d];
    for j in 0..d {
        if matrix.iter_rows().all(|r| r[j] == first[j]) {
            constant_columns.push(j);
            scale[j] = 1.0;
            continue;
        }
        let ss: f64 = matrix.iter_rows().map(|r| (r[j] - mean[j]).powi(2)).sum();
        scale[j] = (ss / (n - 1) as f64).sqrt();
    }

    let mut cov = Matrix::zeros(d, d);
    let mut z = vec![0.0; d];
    for row in matrix.iter_rows() {
        for j in 0..d {
            z[j] = (row[j] - mean[j]) / scale[j];
        }
        for p in 0..d {
            for q in p..d {
                let v = cov.get(p, q) + z[p] * z[q];
                cov.set(p, q, v);
            }
        }
    }
    for p in 0..d {
        for q in p..d {
            let v = cov.get(p, q) / (n - 1) as f64;
            cov.set(p, q, v);
            cov.set(q, p, v);
        }
    }

    let (values, vectors) = symmetric_eigen(&cov)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut components = Matrix::zeros(k, d);
    let mut explained_variance = Vec::with_capacity(k);
    for (row, &idx) in order.iter().take(k).enumerate() {
        let axis = vectors.column(idx);
        // largest-magnitude entry (first on ties) is made positive
        let mut pivot = 0;
        for (j, x) in axis.iter().enumerate() {
            if x.abs() > axis[pivot].abs() {
                pivot = j;
            }
        }
        let sign = if axis[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (j, x) in axis.iter().enumerate() {
            components.set(row, j, sign * x);
        }
        explained_variance.push(values[idx].max(0.0));
    }

    Ok(PcaModel {
        mean,
        scale,
        components,
        explained_variance,
        constant_columns,
    })
}

impl PcaModel {
    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.rows()
    }

    /// Scores `((x - mean) / scale) * components^T`, row by row.
    pub fn transform(&self, matrix: &Matrix) -> Result<Matrix, PcaError> {
        let d = self.dimension();
        if matrix.cols() != d {
            return Err(PcaError::DimensionMismatch {
                expected: d,
                got: matrix.cols(),
            });
        }
        let k = self.n_components();
        let mut out = Matrix::zeros(matrix.rows(), k);
        if k == 0 {
            return Ok(out);
        }
        out.as_mut_slice()
            .par_chunks_mut(k)
            .enumerate()
            .for_each(|(i, scores)| {
                let row = matrix.row(i);
                for (c, score) in scores.iter_mut().enumerate() {
                    let axis = self.components.row(c);
                    *score = (0..d)
                        .map(|j| (row[j] - self.mean[j]) / self.scale[j] * axis[j])
                        .sum();
                }
            });
        Ok(out)
    }

    /// Maps scores back to the input space: `mean + scale * (scores * components)`.
    pub fn inverse_transform(&self, scores: &Matrix) -> Result<Matrix, PcaError> {
        let (k, d) = (self.n_components(), self.dimension());
        if scores.cols() != k {
            return Err(PcaError::DimensionMismatch {
                expected: k,
                got: scores.cols(),
            });
        }
        let mut out = Matrix::zeros(scores.rows(), d);
        for i in 0..scores.rows() {
            let s = scores.row(i);
            for j in 0..d {
                let z: f64 = (0..k).map(|c| s[c] * self.components.get(c, j)).sum();
                out.set(i, j, self.mean[j] + self.scale[j] * z);
            }
        }
        Ok(out)
    }

    /// Plain-text `key = values` document; floats round-trip exactly.
    pub fn to_text(&self) -> String {
        fn join<T: std::fmt::Debug>(v: &[T]) -> String {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        }
        let mut out = String::new();
        let _ = writeln!(out, "dimension = {}", self.dimension());
        let _ = writeln!(out, "components = {}", self.n_components());
        let _ = writeln!(out, "mean = {}", join(&self.mean));
        let _ = writeln!(out, "scale = {}", join(&self.scale));
        let _ = writeln!(out, "axes = {}", join(self.components.as_slice()));
        let _ = writeln!(out, "explained_variance = {}", join(&self.explained_variance));
        let _ = writeln!(out, "constant_columns = {}", join(&self.constant_columns));
        out
    }

    pub fn from_text(text: &str) -> Result<PcaModel, PcaError> {
        let mut dimension = None;
        let mut k = None;
        let mut mean = None;
        let mut scale = None;
        let mut axes = None;
        let mut explained = None;
        let mut constant = Vec::new();

        fn floats(v: &str) -> Result<Vec<f64>, PcaError> {
            v.split_whitespace()
                .map(|t| t.parse().map_err(|_| PcaError::Parse(format!("bad number `{t}`"))))
                .collect()
        }
        fn count(v: &str) -> Result<usize, PcaError> {
            v.trim()
                .parse()
                .map_err(|_| PcaError::Parse(format!("bad count `{v}`")))
        }

        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| PcaError::Parse(format!("expected `key = value`, got `{line}`")))?;
            match key.trim() {
                "dimension" => dimension = Some(count(value)?),
                "components" => k = Some(count(value)?),
                "mean" => mean = Some(floats(value)?),
                "scale" => scale = Some(floats(value)?),
                "axes" => axes = Some(floats(value)?),
                "explained_variance" => explained = Some(floats(value)?),
                "constant_columns" => {
                    constant = value
                        .split_whitespace()
                        .map(count)
                        .collect::<Result<_, _>>()?
                }
                other => return Err(PcaError::Parse(format!("unknown key `{other}`"))),
            }
        }

        let missing = |name: &str| PcaError::Parse(format!("missing `{name}`"));
        let d = dimension.ok_or_else(|| missing("dimension"))?;
        let k = k.ok_or_else(|| missing("components"))?;
        let mean = mean.ok_or_else(|| missing("mean"))?;
        let scale = scale.ok_or_else(|| missing("scale"))?;
        let explained_variance = explained.ok_or_else(|| missing("explained_variance"))?;
        let components = Matrix::new(k, d, axes.ok_or_else(|| missing("axes"))?)
            .map_err(|e| PcaError::Parse(e.to_string()))?;
        if mean.len() != d || scale.len() != d || explained_variance.len() != k {
            return Err(PcaError::Parse("vector lengths disagree with dimension".into()));
        }
        Ok(PcaModel {
            mean,
            scale,
            components,
            explained_variance,
            constant_columns: constant,
        })
    }
}
