use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use sfcrime_core::eval::{run_sweep_on_split, write_submission, SplitIndices};
use sfcrime_core::features::{build_feature_matrix, fit_encodings};
use sfcrime_core::ingest::{load_test_with, load_train_with, summarize};
use sfcrime_core::models::persist::{load_model, save_model};
use sfcrime_core::{
    eval, pca_fit, EncodingMaps, Error, FeatureMatrix, LoadOptions, PcaModel,
    ProbabilisticClassifier, RawIncident,
};

use crate::config::RunConfig;

pub const MODEL_FILE: &str = "model.json";
pub const PCA_FILE: &str = "pca.txt";
pub const ENCODINGS_FILE: &str = "encodings.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Error> {
    fs::write(path, contents).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), Error> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn load_train(cfg: &RunConfig) -> Result<Vec<RawIncident>, Error> {
    let path = cfg.require_train()?;
    let rows = load_train_with(
        path,
        LoadOptions {
            filter_outliers: cfg.filter_outliers,
        },
    )?;
    info!("read {} training rows from {}", rows.len(), path.display());
    Ok(rows)
}

fn load_test(cfg: &RunConfig) -> Result<Vec<RawIncident>, Error> {
    let path = cfg.require_test()?;
    // test rows are never dropped; every Id needs a prediction
    let rows = load_test_with(path, LoadOptions::default())?;
    info!("read {} test rows from {}", rows.len(), path.display());
    Ok(rows)
}

/// Fits PCA on `fit_on` when `k > 0`.
fn maybe_pca(fit_on: &FeatureMatrix, k: usize) -> Result<Option<PcaModel>, Error> {
    if k == 0 {
        return Ok(None);
    }
    Ok(Some(pca_fit(&fit_on.base_values(), k)?))
}

fn with_optional_pca(fm: FeatureMatrix, pca: Option<&PcaModel>) -> Result<FeatureMatrix, Error> {
    match pca {
        Some(p) => Ok(fm.with_pca(p)?),
        None => Ok(fm),
    }
}

pub fn summarize_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let rows = load_train(cfg)?;
    let text = summarize(&rows).render_text();
    match &cfg.out {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn featurize_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let out_dir = cfg.require_out_dir()?;
    let rows = load_train(cfg)?;
    let maps = fit_encodings(&rows)?;
    let base = build_feature_matrix(&rows, &maps, None)?;
    let pca = maybe_pca(&base, cfg.pca)?;
    let train = with_optional_pca(base, pca.as_ref())?;

    create_dir(out_dir)?;
    write_features(&train, &out_dir.join("train_features.csv"))?;
    if cfg.test.is_some() {
        let test = build_feature_matrix(&load_test(cfg)?, &maps, pca.as_ref())?;
        write_features(&test, &out_dir.join("test_features.csv"))?;
    }
    write_preprocessing(out_dir, &maps, pca.as_ref())
}

fn write_features(fm: &FeatureMatrix, path: &Path) -> Result<(), Error> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    fm.write_csv(&mut w)?;
    w.flush().map_err(io_err(path))
}

fn write_preprocessing(dir: &Path, maps: &EncodingMaps, pca: Option<&PcaModel>) -> Result<(), Error> {
    let json = sfcrime_core::features::encodings_to_json(maps);
    write_file(&dir.join(ENCODINGS_FILE), json.as_bytes())?;
    let pca_path = dir.join(PCA_FILE);
    match pca {
        Some(p) => write_file(&pca_path, p.to_text().as_bytes()),
        None if pca_path.exists() => fs::remove_file(&pca_path).map_err(io_err(&pca_path)),
        None => Ok(()),
    }
}

pub fn train_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let out_dir = cfg.require_out_dir()?;
    let spec = cfg.model_spec()?;
    let rows = load_train(cfg)?;
    let maps = fit_encodings(&rows)?;
    let base = build_feature_matrix(&rows, &maps, None)?;
    let pca = maybe_pca(&base, cfg.pca)?;
    let train = with_optional_pca(base, pca.as_ref())?;
    let labels = train.labels.as_ref().ok_or(eval::EvalError::MissingLabels)?;

    info!("fitting {} on {} rows x {} columns", spec.family(), train.rows(), train.cols());
    let model = spec.fit(&train.values, labels, maps.n_classes())?;
    create_dir(out_dir)?;
    save_model(&model, &out_dir.join(MODEL_FILE))?;
    write_preprocessing(out_dir, &maps, pca.as_ref())
}

/// Encodes the training file, splits it, and fits PCA on the training part.
fn prepared_split(cfg: &RunConfig) -> Result<(FeatureMatrix, FeatureMatrix, usize), Error> {
    let rows = load_train(cfg)?;
    let maps = fit_encodings(&rows)?;
    let base = build_feature_matrix(&rows, &maps, None)?;
    let labels = base.labels.as_ref().ok_or(eval::EvalError::MissingLabels)?;
    let idx = SplitIndices::compute(labels, &cfg.split)?;
    let train = base.select_rows(&idx.train);
    let validation = base.select_rows(&idx.validation);
    let pca = maybe_pca(&train, cfg.pca)?;
    Ok((
        with_optional_pca(train, pca.as_ref())?,
        with_optional_pca(validation, pca.as_ref())?,
        maps.n_classes(),
    ))
}

pub fn evaluate_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let spec = cfg.model_spec()?;
    let (train, validation, n_classes) = prepared_split(cfg)?;
    let report = run_sweep_on_split(&train, &validation, n_classes, &[spec])?;
    let text = report.render_text(cfg.timings);
    print!("{text}");
    if let Some(path) = &cfg.out {
        write_file(path, report.to_csv(cfg.timings).as_bytes())?;
    }
    Ok(())
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let base = cfg.model_spec()?;
    if cfg.grid.is_empty() {
        return Err(Error::Usage("sweep needs at least one --grid axis".into()));
    }
    let grid = eval::expand_grid(&base, &cfg.grid)?;
    let (train, validation, n_classes) = prepared_split(cfg)?;
    let report = run_sweep_on_split(&train, &validation, n_classes, &grid)?;
    print!("{}", report.render_text(cfg.timings));
    if let Some(path) = &cfg.out {
        write_file(path, report.to_csv(cfg.timings).as_bytes())?;
    }
    Ok(())
}

pub fn predict_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let dir: PathBuf = cfg
        .model_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| Error::Usage("a model directory is required (--model-dir)".into()))?;
    let out = cfg.require_out()?;

    let enc_path = dir.join(ENCODINGS_FILE);
    let enc_text = fs::read_to_string(&enc_path).map_err(io_err(&enc_path))?;
    let maps = sfcrime_core::features::encodings_from_json(&enc_text)?;
    let pca_path = dir.join(PCA_FILE);
    let pca = if pca_path.exists() {
        let text = fs::read_to_string(&pca_path).map_err(io_err(&pca_path))?;
        Some(PcaModel::from_text(&text)?)
    } else {
        None
    };
    let model = load_model(&dir.join(MODEL_FILE))?;

    let rows = load_test(cfg)?;
    let features = build_feature_matrix(&rows, &maps, pca.as_ref())?;
    let probabilities = model.predict_proba(&features.values)?;
    let ids: Vec<u64> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.id.unwrap_or(i as u64))
        .collect();
    write_submission(&ids, &probabilities, &maps.category_names(), out)?;
    info!("wrote {} predictions to {}", ids.len(), out.display());
    Ok(())
}
