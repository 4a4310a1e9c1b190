use super::EvalError;
use crate::matrix::Matrix;

/// Probabilities are clipped to `[CLIP_EPSILON, 1 - CLIP_EPSILON]`.
pub const CLIP_EPSILON: f64 = 1e-15;

const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Mean negative log probability of the true class.
///
/// Each row is clipped to `[1e-15, 1 - 1e-15]` and renormalized before the
/// true-class entry is read, matching the leaderboard metric.
pub fn multiclass_log_loss(probabilities: &Matrix, labels: &[usize]) -> Result<f64, EvalError> {
    let n = probabilities.rows();
    let m = probabilities.cols();
    if n != labels.len() {
        return Err(EvalError::LengthMismatch {
            rows: n,
            labels: labels.len(),
        });
    }
    if n == 0 {
        return Err(EvalError::Empty);
    }
    let mut total = 0.0;
    for (i, (row, &label)) in probabilities.iter_rows().zip(labels).enumerate() {
        if label >= m {
            return Err(EvalError::LabelOutOfRange {
                label,
                n_classes: m,
            });
        }
        if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(EvalError::InvalidProbability { row: i });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(EvalError::NotNormalized { row: i, sum });
        }
        let clip = |p: f64| p.clamp(CLIP_EPSILON, 1.0 - CLIP_EPSILON);
        let clipped_sum: f64 = row.iter().map(|&p| clip(p)).sum();
        total -= (clip(row[label]) / clipped_sum).ln();
    }
    Ok(total / n as f64)
}
