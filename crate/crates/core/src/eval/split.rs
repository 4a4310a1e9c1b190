use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub validation_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            validation_fraction: 0.3,
            seed: 42,
            stratified: true,
        }
    }
}

/// Disjoint, ascending row indices covering the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

impl SplitIndices {
    /// Partitions `0..labels.len()`.
    ///
    /// The validation set has `round(n * fraction)` rows. In stratified mode
    /// each class contributes `floor(n_c * fraction)` rows, and the rows
    /// still missing go to the classes with the largest fractional
    /// remainders (lower class index first on ties).
    pub fn compute(labels: &[usize], spec: &SplitSpec) -> Result<SplitIndices, EvalError> {
        let f = spec.validation_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(EvalError::BadFraction(f));
        }
        let n = labels.len();
        let n_val = (n as f64 * f).round() as usize;
        if n_val == 0 || n_val == n {
            return Err(EvalError::DegenerateSplit { rows: n });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

        let mut validation = if spec.stratified {
            let n_classes = labels.iter().max().map_or(0, |m| m + 1);
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
            for (i, &c) in labels.iter().enumerate() {
                members[c].push(i);
            }
            if let Some(class) = members.iter().position(|m| m.len() == 1) {
                return Err(EvalError::SingletonClass { class });
            }
            let quotas: Vec<f64> = members.iter().map(|m| m.len() as f64 * f).collect();
            let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
            let missing = n_val - take.iter().sum::<usize>();
            let mut by_remainder: Vec<usize> = (0..n_classes).filter(|&c| !members[c].is_empty()).collect();
            by_remainder.sort_by(|&a, &b| {
                let ra = quotas[a] - quotas[a].floor();
                let rb = quotas[b] - quotas[b].floor();
                rb.total_cmp(&ra).then(a.cmp(&b))
            });
            for &c in by_remainder.iter().take(missing) {
                take[c] += 1;
            }
            let mut validation = Vec::with_capacity(n_val);
            for (c, rows) in members.iter_mut().enumerate() {
                rows.shuffle(&mut rng);
                validation.extend_from_slice(&rows[..take[c]]);
            }
            validation
        } else {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            all.truncate(n_val);
            all
        };

        validation.sort_unstable();
        let mut in_validation = vec![false; n];
        for &i in &validation {
            in_validation[i] = true;
        }
        let train = (0..n).filter(|&i| !in_validation[i]).collect();
        Ok(SplitIndices { train, validation })
    }
}

/// Splits labelled features into `(train, validation)`.
pub fn split(
    features: &FeatureMatrix,
    spec: &SplitSpec,
) -> Result<(FeatureMatrix, FeatureMatrix), EvalError> {
    let labels = features.labels.as_ref().ok_or(EvalError::MissingLabels)?;
    let idx = SplitIndices::compute(labels, spec)?;
    Ok((
        features.select_rows(&idx.train),
        features.select_rows(&idx.validation),
    ))
}
