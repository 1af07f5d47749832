//! Report structures serialized by the experiment commands. Every bundle
//! embeds the resolved configuration and seed, so a report is reproducible
//! from its own header; timings live in a separate section because they
//! are the one part that legitimately varies between runs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cv::{CVReport, TimingReport};
use crate::metrics::{ClassificationReport, ConfusionMatrix};

/// Resolved settings for one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data_dir: PathBuf,
    /// `None` runs on the raw 561 features.
    pub pca_components: Option<usize>,
    pub seed: u64,
    pub k: usize,
    pub repeats: usize,
    pub split_ratio: f64,
    pub models: ModelConfig,
}

/// Per-model hyperparameters; defaults follow the tuned stack settings
/// where they exist and the common library defaults elsewhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    /// L1 strength for logistic regression; `None` means `1/n`.
    pub logreg_lambda: Option<f64>,
    pub logreg_max_iters: usize,
    pub logreg_tol: f64,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub gb_estimators: usize,
    pub gb_learning_rate: f64,
    pub gb_max_depth: usize,
    /// Extra-trees depth used inside the stack (the sweep grows full trees).
    pub stack_et_estimators: usize,
    pub stack_et_max_depth: usize,
    pub sweep_estimators: usize,
    pub bagging_estimators: usize,
    pub knn_k: usize,
    /// Estimator count for the forest comparison.
    pub forest_estimators: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            logreg_lambda: None,
            logreg_max_iters: 500,
            logreg_tol: 1e-5,
            svm_c: 2.0,
            svm_epochs: 60,
            gb_estimators: 50,
            gb_learning_rate: 0.2,
            gb_max_depth: 3,
            stack_et_estimators: 100,
            stack_et_max_depth: 4,
            sweep_estimators: 100,
            bagging_estimators: 10,
            knn_k: 5,
            forest_estimators: 200,
        }
    }
}

/// Header common to every report: enough to rerun the experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportHeader {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
}

/// One cell of the PCA sweep grid.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub model: String,
    /// `None` encodes the raw-features column.
    pub pca: Option<usize>,
    /// `None` marks a model that is intentionally not implemented.
    pub accuracy: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResults {
    pub grid: Vec<SweepCell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForestComparisonEntry {
    pub model: String,
    pub pca: Option<usize>,
    pub test_accuracy: f64,
    pub cv_mean: f64,
    pub cv_variance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForestComparisonResults {
    pub entries: Vec<ForestComparisonEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RocPointRow {
    pub class: String,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StackResults {
    pub test_accuracy: f64,
    pub cv: CVReport,
    pub confusion_matrix: ConfusionMatrix,
    pub confusion_rows: Vec<Vec<u64>>,
    pub classification_report: ClassificationReport,
    pub class_names: Vec<String>,
    pub roc_auc_per_class: Vec<Option<f64>>,
    pub macro_auc: Option<f64>,
    pub roc_points: Vec<RocPointRow>,
}

/// A full experiment report: header + deterministic results + timings.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle<T: Serialize> {
    pub header: ReportHeader,
    pub results: T,
    pub timings: Vec<TimingReport>,
}

impl<T: Serialize> ReportBundle<T> {
    /// JSON of header and results only — the part that must be
    /// byte-identical across reruns with the same config and seed.
    pub fn deterministic_json(&self) -> serde_json::Value {
        serde_json::json!({
            "header": serde_json::to_value(&self.header).expect("serializable header"),
            "results": serde_json::to_value(&self.results).expect("serializable results"),
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut value = self.deterministic_json();
        value["timings"] =
            serde_json::to_value(&self.timings).expect("serializable timings");
        serde_json::to_string_pretty(&value).expect("serializable bundle")
    }
}
