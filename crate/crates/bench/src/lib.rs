//! Shared inputs for the benchmarks.

use sfcrime_core::features::{build_feature_matrix, fit_encodings};
use sfcrime_core::{synth, FeatureMatrix, Matrix};

/// Encoded synthetic incidents with every category present.
pub fn incident_features(n: usize, seed: u64) -> FeatureMatrix {
    let rows = synth::incidents(n, seed, true);
    let maps = fit_encodings(&rows).expect("synthetic rows encode");
    build_feature_matrix(&rows, &maps, None).expect("synthetic rows encode")
}

/// Gaussian blobs split into a fitting block and a query block.
pub fn blobs(n_fit: usize, n_query: usize, d: usize, classes: usize) -> (Matrix, Vec<usize>, Matrix) {
    let (x, y) = synth::classification_dataset(n_fit + n_query, d, classes, 17);
    let fit: Vec<usize> = (0..n_fit).collect();
    let query: Vec<usize> = (n_fit..n_fit + n_query).collect();
    (x.select_rows(&fit), y[..n_fit].to_vec(), x.select_rows(&query))
}

/// Row-normalised pseudo-random probabilities and labels for the metric.
pub fn probabilities(n: usize, classes: usize) -> (Matrix, Vec<usize>) {
    let mut data = Vec::with_capacity(n * classes);
    for i in 0..n {
        let raw: Vec<f64> = (0..classes).map(|c| 1.0 + ((i * 31 + c * 7) % 13) as f64).collect();
        let total: f64 = raw.iter().sum();
        data.extend(raw.iter().map(|v| v / total));
    }
    let labels = (0..n).map(|i| (i * 11) % classes).collect();
    (Matrix::new(n, classes, data).expect("consistent shape"), labels)
}
