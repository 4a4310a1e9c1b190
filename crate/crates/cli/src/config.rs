//! Run configuration merged from a TOML file and command-line flags.
//!
//! Flags win over the file; the file wins over built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sfcrime_core::{Error, ModelSpec, SplitSpec};

pub const MAX_PCA_COMPONENTS: usize = 8;
pub const DEFAULT_SEED: u64 = 42;

/// Optional settings as they appear in a config file or on the command line.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub model: Option<String>,
    pub model_dir: Option<PathBuf>,
    pub pca: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub validation_fraction: Option<f64>,
    pub stratified: Option<bool>,
    pub filter_outliers: Option<bool>,
    pub timings: Option<bool>,
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, toml::Value>,
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<toml::Value>>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub model: String,
    pub model_dir: Option<PathBuf>,
    pub hyperparameters: Vec<(String, String)>,
    pub grid: Vec<(String, Vec<String>)>,
    pub pca: usize,
    pub split: SplitSpec,
    pub seed: u64,
    pub threads: Option<usize>,
    pub filter_outliers: bool,
    pub timings: bool,
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn read_settings(path: &Path) -> Result<Settings, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

/// Parses `name=v1,v2,...`.
pub fn parse_grid_axis(text: &str) -> Result<(String, Vec<String>), String> {
    let (name, values) = text
        .split_once('=')
        .ok_or_else(|| format!("grid axis `{text}` must look like name=v1,v2"))?;
    let values: Vec<String> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect();
    if values.is_empty() {
        return Err(format!("grid axis `{name}` has no values"));
    }
    Ok((name.trim().to_string(), values))
}

fn merge_pairs<T: Clone>(base: &mut Vec<(String, T)>, over: impl IntoIterator<Item = (String, T)>) {
    for (k, v) in over {
        match base.iter_mut().find(|(name, _)| *name == k) {
            Some(slot) => slot.1 = v,
            None => base.push((k, v)),
        }
    }
}

impl RunConfig {
    /// `flags` take precedence over `file`.
    pub fn resolve(
        file: Settings,
        flags: Settings,
        flag_params: Vec<(String, String)>,
        flag_grid: Vec<(String, Vec<String>)>,
    ) -> Result<RunConfig, Error> {
        let seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let pca = flags.pca.or(file.pca).unwrap_or(0);
        if pca > MAX_PCA_COMPONENTS {
            return Err(Error::Usage(format!(
                "--pca must be between 0 and {MAX_PCA_COMPONENTS}, got {pca}"
            )));
        }
        let model = flags
            .model
            .or(file.model)
            .unwrap_or_else(|| "forest".to_string());
        ModelSpec::for_family(&model).map_err(|e| Error::Usage(e.to_string()))?;
        if flags.threads.or(file.threads) == Some(0) {
            return Err(Error::Usage("--threads must be at least 1".into()));
        }

        let mut hyperparameters: Vec<(String, String)> = file
            .hyperparameters
            .iter()
            .map(|(k, v)| (k.clone(), value_text(v)))
            .collect();
        merge_pairs(&mut hyperparameters, flag_params);
        let mut grid: Vec<(String, Vec<String>)> = file
            .grid
            .iter()
            .map(|(k, vs)| (k.clone(), vs.iter().map(value_text).collect()))
            .collect();
        merge_pairs(&mut grid, flag_grid);

        let defaults = SplitSpec::default();
        Ok(RunConfig {
            train: flags.train.or(file.train),
            test: flags.test.or(file.test),
            model,
            model_dir: flags.model_dir.or(file.model_dir),
            hyperparameters,
            grid,
            pca,
            split: SplitSpec {
                validation_fraction: flags
                    .validation_fraction
                    .or(file.validation_fraction)
                    .unwrap_or(defaults.validation_fraction),
                seed,
                stratified: flags
                    .stratified
                    .or(file.stratified)
                    .unwrap_or(defaults.stratified),
            },
            seed,
            threads: flags.threads.or(file.threads),
            filter_outliers: flags.filter_outliers.or(file.filter_outliers).unwrap_or(false),
            timings: flags.timings.or(file.timings).unwrap_or(false),
            out: flags.out.or(file.out),
            out_dir: flags.out_dir.or(file.out_dir),
        })
    }

    /// Model family defaults, then the seed, then explicit hyperparameters.
    pub fn model_spec(&self) -> Result<ModelSpec, Error> {
        let mut spec = ModelSpec::for_family(&self.model).map_err(|e| Error::Usage(e.to_string()))?;
        spec.set_seed(self.seed);
        for (name, value) in &self.hyperparameters {
            spec.set_param(name, value)
                .map_err(|e| Error::Usage(e.to_string()))?;
        }
        Ok(spec)
    }

    pub fn require_train(&self) -> Result<&Path, Error> {
        self.train
            .as_deref()
            .ok_or_else(|| Error::Usage("a training file is required (--train)".into()))
    }

    pub fn require_test(&self) -> Result<&Path, Error> {
        self.test
            .as_deref()
            .ok_or_else(|| Error::Usage("a test file is required (--test)".into()))
    }

    pub fn require_out(&self) -> Result<&Path, Error> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::Usage("an output file is required (--out)".into()))
    }

    pub fn require_out_dir(&self) -> Result<&Path, Error> {
        self.out_dir
            .as_deref()
            .ok_or_else(|| Error::Usage("an output directory is required (--out-dir)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: Settings = toml::from_str(
            r#"
            model = "knn"
            seed = 7
            pca = 2
            [hyperparameters]
            k = 39
            [grid]
            k = [39, 100]
            "#,
        )
        .unwrap();
        let flags = Settings {
            seed: Some(9),
            ..Settings::default()
        };
        let cfg = RunConfig::resolve(
            file,
            flags,
            vec![("k".into(), "5".into())],
            vec![],
        )
        .unwrap();
        assert_eq!(cfg.model, "knn");
        assert_eq!((cfg.seed, cfg.split.seed, cfg.pca), (9, 9, 2));
        assert_eq!(cfg.hyperparameters, vec![("k".to_string(), "5".to_string())]);
        assert_eq!(cfg.grid[0].1, vec!["39", "100"]);
        assert_eq!(cfg.model_spec().unwrap(), ModelSpec::Knn { k: 5 });
    }

    #[test]
    fn invalid_settings() {
        let pca = Settings {
            pca: Some(9),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(Settings::default(), pca, vec![], vec![]).is_err());
        let model = Settings {
            model: Some("xgb".into()),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(Settings::default(), model, vec![], vec![]).is_err());
        assert!(toml::from_str::<Settings>("bogus = 1").is_err());
    }

    #[test]
    fn grid_axis_syntax() {
        assert_eq!(
            parse_grid_axis("n_estimators=10, 20,50").unwrap(),
            ("n_estimators".to_string(), vec!["10".into(), "20".into(), "50".into()])
        );
        assert!(parse_grid_axis("k").is_err());
        assert!(parse_grid_axis("k=").is_err());
    }
}
