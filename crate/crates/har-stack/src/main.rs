//! Experiment CLI over the library: three subcommands, JSON reports on
//! stdout or `--out`, optional CSV projections via `--csv`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use har_stack::error::Error;
use har_stack::experiments::{cmd_compare_forests, cmd_pca_sweep, cmd_stack, roc_csv, sweep_csv};
use har_stack::report::{ExperimentConfig, ModelConfig};

const DATA_HINT: &str = "download the \"Human Activity Recognition Using Smartphones\" dataset \
from https://archive.ics.uci.edu/dataset/240 and point --data-dir or HAR_DATA_DIR at the \
unzipped directory";

#[derive(Parser)]
#[command(name = "har-stack", version, about = "Ensemble experiments on the UCI HAR dataset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Accuracy grid: every model at PCA 200 / 400 / raw features
    PcaSweep(CommonArgs),
    /// Random forest vs extra trees: accuracy, CV variance, fit times
    CompareForests(CommonArgs),
    /// Train and evaluate the stacked ensemble
    Stack(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// HAR dataset directory (falls back to HAR_DATA_DIR)
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// JSON config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the command's CSV projection here (sweep grid / ROC points)
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// PCA components for the stack command: an integer or "none"
    #[arg(long)]
    pca: Option<String>,
    /// Cross-validation folds
    #[arg(long)]
    k: Option<usize>,
    /// Cross-validation repeats
    #[arg(long)]
    repeats: Option<usize>,
    /// D1 fraction of the stack's internal split
    #[arg(long)]
    split_ratio: Option<f64>,

    #[arg(long)]
    logreg_lambda: Option<f64>,
    #[arg(long)]
    logreg_max_iters: Option<usize>,
    #[arg(long)]
    logreg_tol: Option<f64>,
    #[arg(long)]
    svm_c: Option<f64>,
    #[arg(long)]
    svm_epochs: Option<usize>,
    #[arg(long)]
    gb_estimators: Option<usize>,
    #[arg(long)]
    gb_learning_rate: Option<f64>,
    #[arg(long)]
    gb_max_depth: Option<usize>,
    #[arg(long)]
    stack_et_estimators: Option<usize>,
    #[arg(long)]
    stack_et_max_depth: Option<usize>,
    /// Estimators for the sweep's forests
    #[arg(long)]
    sweep_estimators: Option<usize>,
    #[arg(long)]
    bagging_estimators: Option<usize>,
    #[arg(long)]
    knn_k: Option<usize>,
    /// Estimators for the forest comparison
    #[arg(long)]
    forest_estimators: Option<usize>,
}

/// File-format mirror of the flags; all fields optional.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    data_dir: Option<PathBuf>,
    seed: Option<u64>,
    pca: Option<serde_json::Value>,
    k: Option<usize>,
    repeats: Option<usize>,
    split_ratio: Option<f64>,
    logreg_lambda: Option<f64>,
    logreg_max_iters: Option<usize>,
    logreg_tol: Option<f64>,
    svm_c: Option<f64>,
    svm_epochs: Option<usize>,
    gb_estimators: Option<usize>,
    gb_learning_rate: Option<f64>,
    gb_max_depth: Option<usize>,
    stack_et_estimators: Option<usize>,
    stack_et_max_depth: Option<usize>,
    sweep_estimators: Option<usize>,
    bagging_estimators: Option<usize>,
    knn_k: Option<usize>,
    forest_estimators: Option<usize>,
}

fn parse_pca_flag(raw: &str) -> Result<Option<usize>, Error> {
    if raw.eq_ignore_ascii_case("none") || raw.eq_ignore_ascii_case("false") {
        return Ok(None);
    }
    raw.parse::<usize>().map(Some).map_err(|_| {
        Error::Validation(format!("--pca expects an integer or \"none\", got {raw:?}"))
    })
}

fn resolve_config(args: &CommonArgs) -> Result<ExperimentConfig, Error> {
    let file: FileConfig = match &args.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|_| Error::NotFound {
                path: path.clone(),
                hint: Some("config file".into()),
            })?;
            serde_json::from_str(&text).map_err(|e| {
                Error::Validation(format!("config file {}: {e}", path.display()))
            })?
        }
    };

    let data_dir = args
        .data_dir
        .clone()
        .or(file.data_dir)
        .or_else(|| std::env::var_os("HAR_DATA_DIR").map(PathBuf::from))
        .ok_or_else(|| Error::Validation(format!("no data directory given; {DATA_HINT}")))?;

    let pca_components = match &args.pca {
        Some(raw) => parse_pca_flag(raw)?,
        None => match &file.pca {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::Number(n)) => Some(n.as_u64().ok_or_else(|| {
                Error::Validation("pca in config must be a non-negative integer".into())
            })? as usize),
            Some(serde_json::Value::String(s)) => parse_pca_flag(s)?,
            Some(other) => {
                return Err(Error::Validation(format!(
                    "pca in config must be an integer or \"none\", got {other}"
                )))
            }
        },
    };

    let defaults = ModelConfig::default();
    Ok(ExperimentConfig {
        data_dir,
        pca_components,
        seed: args.seed.or(file.seed).unwrap_or(42),
        k: args.k.or(file.k).unwrap_or(10),
        repeats: args.repeats.or(file.repeats).unwrap_or(10),
        split_ratio: args.split_ratio.or(file.split_ratio).unwrap_or(0.5),
        models: ModelConfig {
            logreg_lambda: args.logreg_lambda.or(file.logreg_lambda),
            logreg_max_iters: args
                .logreg_max_iters
                .or(file.logreg_max_iters)
                .unwrap_or(defaults.logreg_max_iters),
            logreg_tol: args.logreg_tol.or(file.logreg_tol).unwrap_or(defaults.logreg_tol),
            svm_c: args.svm_c.or(file.svm_c).unwrap_or(defaults.svm_c),
            svm_epochs: args.svm_epochs.or(file.svm_epochs).unwrap_or(defaults.svm_epochs),
            gb_estimators: args
                .gb_estimators
                .or(file.gb_estimators)
                .unwrap_or(defaults.gb_estimators),
            gb_learning_rate: args
                .gb_learning_rate
                .or(file.gb_learning_rate)
                .unwrap_or(defaults.gb_learning_rate),
            gb_max_depth: args
                .gb_max_depth
                .or(file.gb_max_depth)
                .unwrap_or(defaults.gb_max_depth),
            stack_et_estimators: args
                .stack_et_estimators
                .or(file.stack_et_estimators)
                .unwrap_or(defaults.stack_et_estimators),
            stack_et_max_depth: args
                .stack_et_max_depth
                .or(file.stack_et_max_depth)
                .unwrap_or(defaults.stack_et_max_depth),
            sweep_estimators: args
                .sweep_estimators
                .or(file.sweep_estimators)
                .unwrap_or(defaults.sweep_estimators),
            bagging_estimators: args
                .bagging_estimators
                .or(file.bagging_estimators)
                .unwrap_or(defaults.bagging_estimators),
            knn_k: args.knn_k.or(file.knn_k).unwrap_or(defaults.knn_k),
            forest_estimators: args
                .forest_estimators
                .or(file.forest_estimators)
                .unwrap_or(defaults.forest_estimators),
        },
    })
}

fn emit(json: String, csv: Option<String>, args: &CommonArgs) -> Result<(), Error> {
    match &args.out {
        Some(path) => fs::write(path, json)?,
        None => println!("{json}"),
    }
    if let Some(csv_path) = &args.csv {
        match csv {
            Some(content) => fs::write(csv_path, content)?,
            None => {
                return Err(Error::Validation(
                    "--csv is not supported for this command".into(),
                ))
            }
        }
    }
    Ok(())
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::PcaSweep(args) => {
            let config = resolve_config(args)?;
            let bundle = cmd_pca_sweep(&config)?;
            emit(bundle.to_json_string(), Some(sweep_csv(&bundle.results)), args)
        }
        Command::CompareForests(args) => {
            let config = resolve_config(args)?;
            let bundle = cmd_compare_forests(&config)?;
            if args.csv.is_some() {
                return Err(Error::Validation(
                    "--csv is not supported for compare-forests".into(),
                ));
            }
            emit(bundle.to_json_string(), None, args)
        }
        Command::Stack(args) => {
            let config = resolve_config(args)?;
            let bundle = cmd_stack(&config)?;
            emit(bundle.to_json_string(), Some(roc_csv(&bundle.results)), args)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let hint = match &err {
                Error::NotFound { .. } => format!("; {DATA_HINT}"),
                _ => String::new(),
            };
            eprintln!("error: {err}{hint}");
            ExitCode::FAILURE
        }
    }
}
