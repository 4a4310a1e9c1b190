mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sfcrime_core::{Error, ErrorKind};

use config::{parse_grid_axis, read_settings, RunConfig, Settings};

/// San Francisco crime category classifier.
#[derive(Debug, Parser)]
#[command(name = "sfcrime", version, about)]
struct Cli {
    /// Seed for every random choice (split, bootstrap, feature sampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print district, category, hour and weekday tables for a training file.
    Summarize(SummarizeArgs),
    /// Write encoded feature matrices as CSV.
    Featurize(FeaturizeArgs),
    /// Fit a model on a whole training file and save it.
    Train(TrainArgs),
    /// Fit on a train split and print the validation log-loss.
    Evaluate(EvaluateArgs),
    /// Evaluate every point of a hyperparameter grid on one split.
    Sweep(SweepArgs),
    /// Write a submission file for a test file using a saved model.
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Training CSV.
    #[arg(long, value_name = "FILE")]
    train: Option<PathBuf>,
    /// Drop rows whose latitude is 38 or more.
    #[arg(long)]
    filter_outliers: bool,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model family: nb, knn, tree or forest.
    #[arg(long)]
    model: Option<String>,
    /// Neighbours for knn.
    #[arg(long)]
    k: Option<usize>,
    /// Tree depth limit (a number, or `none`).
    #[arg(long)]
    max_depth: Option<String>,
    #[arg(long)]
    min_samples_leaf: Option<usize>,
    /// Trees in a forest.
    #[arg(long)]
    n_estimators: Option<usize>,
    /// Candidate columns per split: all, sqrt, or a count.
    #[arg(long)]
    features_per_split: Option<String>,
    /// Train every forest tree on the full data.
    #[arg(long)]
    no_bootstrap: bool,
    /// Additive smoothing for leaf class counts.
    #[arg(long)]
    smoothing: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        push("k", self.k.map(|v| v.to_string()));
        push("max_depth", self.max_depth.clone());
        push("min_samples_leaf", self.min_samples_leaf.map(|v| v.to_string()));
        push("n_estimators", self.n_estimators.map(|v| v.to_string()));
        push("features_per_split", self.features_per_split.clone());
        push("bootstrap", self.no_bootstrap.then(|| "false".to_string()));
        push("smoothing", self.smoothing.map(|v| v.to_string()));
        out
    }
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Principal components appended to the base columns (0 to 8).
    #[arg(long, value_name = "K")]
    pca: Option<usize>,
    /// Share of rows held out for validation.
    #[arg(long)]
    validation_fraction: Option<f64>,
    /// Sample the validation rows without preserving class proportions.
    #[arg(long)]
    no_stratify: bool,
    /// Include wall-clock seconds in the report.
    #[arg(long)]
    timings: bool,
    /// Also write the report as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write the tables here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Test CSV to encode with the training encodings.
    #[arg(long, value_name = "FILE")]
    test: Option<PathBuf>,
    #[arg(long, value_name = "K")]
    pca: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Principal components appended to the base columns (0 to 8).
    #[arg(long, value_name = "K")]
    pca: Option<usize>,
    /// Directory for model.json, encodings.json and pca.txt.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    split: SplitArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    split: SplitArgs,
    /// Grid axis as name=v1,v2,... (repeatable).
    #[arg(long, value_name = "AXIS", value_parser = parse_grid_axis)]
    grid: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Directory written by `train`.
    #[arg(long, value_name = "DIR")]
    model_dir: Option<PathBuf>,
    /// Test CSV.
    #[arg(long, value_name = "FILE")]
    test: Option<PathBuf>,
    /// Submission file to write.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

fn input_settings(input: &InputArgs) -> Settings {
    Settings {
        train: input.train.clone(),
        filter_outliers: flag(input.filter_outliers),
        ..Settings::default()
    }
}

fn split_settings(base: Settings, model: &ModelArgs, split: &SplitArgs) -> Settings {
    Settings {
        model: model.model.clone(),
        pca: split.pca,
        validation_fraction: split.validation_fraction,
        stratified: split.no_stratify.then_some(false),
        timings: flag(split.timings),
        out: split.out.clone(),
        ..base
    }
}

/// Flag settings, explicit hyperparameters and grid axes for a command.
fn command_settings(command: &Command) -> (Settings, Vec<(String, String)>, Vec<(String, Vec<String>)>) {
    match command {
        Command::Summarize(a) => (
            Settings {
                out: a.out.clone(),
                ..input_settings(&a.input)
            },
            vec![],
            vec![],
        ),
        Command::Featurize(a) => (
            Settings {
                test: a.test.clone(),
                pca: a.pca,
                out_dir: a.out_dir.clone(),
                ..input_settings(&a.input)
            },
            vec![],
            vec![],
        ),
        Command::Train(a) => (
            Settings {
                model: a.model.model.clone(),
                pca: a.pca,
                out_dir: a.out_dir.clone(),
                ..input_settings(&a.input)
            },
            a.model.params(),
            vec![],
        ),
        Command::Evaluate(a) => (
            split_settings(input_settings(&a.input), &a.model, &a.split),
            a.model.params(),
            vec![],
        ),
        Command::Sweep(a) => (
            split_settings(input_settings(&a.input), &a.model, &a.split),
            a.model.params(),
            a.grid.clone(),
        ),
        Command::Predict(a) => (
            Settings {
                model_dir: a.model_dir.clone(),
                test: a.test.clone(),
                out: a.out.clone(),
                ..Settings::default()
            },
            vec![],
            vec![],
        ),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let file = match &cli.config {
        Some(path) => read_settings(path)?,
        None => Settings::default(),
    };
    let (mut flags, params, grid) = command_settings(&cli.command);
    flags.seed = cli.seed;
    flags.threads = cli.threads;
    let cfg = RunConfig::resolve(file, flags, params, grid)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Summarize(_) => commands::summarize_cmd(&cfg),
        Command::Featurize(_) => commands::featurize_cmd(&cfg),
        Command::Train(_) => commands::train_cmd(&cfg),
        Command::Evaluate(_) => commands::evaluate_cmd(&cfg),
        Command::Sweep(_) => commands::sweep_cmd(&cfg),
        Command::Predict(_) => commands::predict_cmd(&cfg),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Numeric => 3,
            })
        }
    }
}
