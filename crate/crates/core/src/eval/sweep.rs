use std::fmt::Write as _;
use std::time::Instant;

use super::{multiclass_log_loss, EvalError, SplitIndices, SplitSpec};
use crate::features::FeatureMatrix;
use crate::models::{ModelSpec, ProbabilisticClassifier};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub hyperparameters: Vec<(String, String)>,
    pub log_loss: f64,
    /// Fit plus predict wall time.
    pub seconds: f64,
}

/// Rows in grid order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

fn params_text(params: &[(String, String)]) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl SweepReport {
    /// Aligned table. Timings are optional because they vary between runs.
    pub fn render_text(&self, timings: bool) -> String {
        let params: Vec<String> = self.rows.iter().map(|r| params_text(&r.hyperparameters)).collect();
        let pw = params.iter().map(String::len).chain([15]).max().unwrap_or(15);
        let mw = self.rows.iter().map(|r| r.model.len()).chain([5]).max().unwrap_or(5);
        let mut out = String::new();
        let _ = write!(out, "{:<mw$}  {:<pw$}  {:>12}", "model", "hyperparameters", "log_loss");
        if timings {
            let _ = write!(out, "  {:>9}", "seconds");
        }
        out.push('\n');
        for (row, p) in self.rows.iter().zip(&params) {
            let _ = write!(out, "{:<mw$}  {p:<pw$}  {:>12.9}", row.model, row.log_loss);
            if timings {
                let _ = write!(out, "  {:>9.3}", row.seconds);
            }
            out.push('\n');
        }
        out
    }

    /// CSV with columns `model,hyperparameters,log_loss[,seconds]`.
    pub fn to_csv(&self, timings: bool) -> String {
        let mut out = String::from("model,hyperparameters,log_loss");
        if timings {
            out.push_str(",seconds");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(
                out,
                "{},{},{}",
                row.model,
                params_text(&row.hyperparameters),
                row.log_loss
            );
            if timings {
                let _ = write!(out, ",{:.6}", row.seconds);
            }
            out.push('\n');
        }
        out
    }
}

/// Cartesian product of the axes applied on top of `base`; the first axis
/// varies slowest.
pub fn expand_grid(
    base: &ModelSpec,
    axes: &[(String, Vec<String>)],
) -> Result<Vec<ModelSpec>, EvalError> {
    let mut specs = vec![base.clone()];
    for (name, values) in axes {
        if values.is_empty() {
            return Err(EvalError::EmptyAxis(name.clone()));
        }
        let mut next = Vec::with_capacity(specs.len() * values.len());
        for spec in &specs {
            for value in values {
                let mut s = spec.clone();
                s.set_param(name, value)
                    .map_err(|source| EvalError::GridPoint {
                        point: format!("{name}={value}"),
                        source,
                    })?;
                next.push(s);
            }
        }
        specs = next;
    }
    Ok(specs)
}

/// Splits `features` once and scores every grid point on that split.
pub fn run_sweep(
    features: &FeatureMatrix,
    n_classes: usize,
    grid: &[ModelSpec],
    spec: &SplitSpec,
) -> Result<SweepReport, EvalError> {
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let labels = features.labels.as_ref().ok_or(EvalError::MissingLabels)?;
    let idx = SplitIndices::compute(labels, spec)?;
    run_sweep_on_split(
        &features.select_rows(&idx.train),
        &features.select_rows(&idx.validation),
        n_classes,
        grid,
    )
}

/// Fits each grid point on `train` and scores it on `validation`.
pub fn run_sweep_on_split(
    train: &FeatureMatrix,
    validation: &FeatureMatrix,
    n_classes: usize,
    grid: &[ModelSpec],
) -> Result<SweepReport, EvalError> {
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let train_labels = train.labels.as_ref().ok_or(EvalError::MissingLabels)?;
    let val_labels = validation.labels.as_ref().ok_or(EvalError::MissingLabels)?;
    let mut report = SweepReport::default();
    for spec in grid {
        let point_err = |source| EvalError::GridPoint {
            point: format!("{} {}", spec.family(), params_text(&spec.hyperparameters())),
            source,
        };
        let start = Instant::now();
        let model = spec
            .fit(&train.values, train_labels, n_classes)
            .map_err(point_err)?;
        let proba = model.predict_proba(&validation.values).map_err(point_err)?;
        let seconds = start.elapsed().as_secs_f64();
        let log_loss = multiclass_log_loss(&proba, val_labels)?;
        log::info!(
            "{} {} -> {log_loss:.6} ({seconds:.2}s)",
            spec.family(),
            params_text(&spec.hyperparameters())
        );
        report.rows.push(SweepRow {
            model: spec.family().to_string(),
            hyperparameters: spec.hyperparameters(),
            log_loss,
            seconds,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn toy() -> FeatureMatrix {
        let rows: Vec<[f64; 2]> = (0..90)
            .map(|i| [(i % 9) as f64, (i % 7) as f64 * 0.5])
            .collect();
        FeatureMatrix {
            values: Matrix::from_rows(&rows).unwrap(),
            column_names: vec!["a".into(), "b".into()],
            labels: Some((0..90).map(|i| (i % 9) / 3).collect()),
        }
    }

    #[test]
    fn one_row_per_grid_point() {
        let base = ModelSpec::for_family("knn").unwrap();
        let grid = expand_grid(
            &base,
            &[("k".into(), vec!["1".into(), "5".into(), "20".into()])],
        )
        .unwrap();
        let report = run_sweep(&toy(), 3, &grid, &SplitSpec::default()).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert_eq!(report.rows[2].hyperparameters[0].1, "20");
        assert!(report.rows.iter().all(|r| r.log_loss >= 0.0));
        assert_eq!(report.to_csv(false).lines().count(), 4);
        assert!(report.render_text(true).contains("seconds"));
    }

    #[test]
    fn cartesian_product_order() {
        let base = ModelSpec::for_family("forest").unwrap();
        let grid = expand_grid(
            &base,
            &[
                ("max_depth".into(), vec!["2".into(), "3".into()]),
                ("n_estimators".into(), vec!["1".into(), "2".into(), "3".into()]),
            ],
        )
        .unwrap();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[1].hyperparameters()[0].1, "2");
        assert_eq!(grid[1].hyperparameters()[1].1, "2");
        assert_eq!(grid[3].hyperparameters()[1].1, "3");
    }

    #[test]
    fn errors_name_the_grid_point() {
        assert!(matches!(
            run_sweep(&toy(), 3, &[], &SplitSpec::default()),
            Err(EvalError::EmptyGrid)
        ));
        let grid = vec![ModelSpec::Knn { k: 10_000 }];
        match run_sweep(&toy(), 3, &grid, &SplitSpec::default()) {
            Err(EvalError::GridPoint { point, .. }) => assert!(point.contains("k=10000")),
            other => panic!("{other:?}"),
        }
        let base = ModelSpec::NaiveBayes;
        assert!(expand_grid(&base, &[("k".into(), vec!["1".into()])]).is_err());
        assert!(expand_grid(&base, &[("k".into(), vec![])]).is_err());
    }

    #[test]
    fn reproducible() {
        let grid = vec![ModelSpec::for_family("forest").unwrap()];
        let mut grid = grid;
        grid[0].set_param("n_estimators", "5").unwrap();
        let a = run_sweep(&toy(), 3, &grid, &SplitSpec::default()).unwrap();
        let b = run_sweep(&toy(), 3, &grid, &SplitSpec::default()).unwrap();
        assert_eq!(a.to_csv(false), b.to_csv(false));
    }
}
