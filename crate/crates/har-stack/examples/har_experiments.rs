//! The three packaged HAR experiments, end to end, against a local copy
//! of the UCI "Human Activity Recognition Using Smartphones" dataset.
//!
//! Point HAR_DATA_DIR at the unzipped dataset, then:
//! ```bash
//! HAR_DATA_DIR=/path/to/UCI-HAR cargo run --release -p har-stack --example har_experiments
//! ```
//!
//! Cross-validation repeats are reduced here so the walkthrough finishes
//! quickly; the `har-stack` binary runs the full 10x10 protocol.

use std::path::PathBuf;

use har_stack::experiments::{cmd_compare_forests, cmd_pca_sweep, cmd_stack};
use har_stack::report::{ExperimentConfig, ModelConfig};

fn main() {
    let Some(data_dir) = std::env::var_os("HAR_DATA_DIR").map(PathBuf::from) else {
        eprintln!(
            "HAR_DATA_DIR is not set. Download the dataset from \
             https://archive.ics.uci.edu/dataset/240 (Human Activity Recognition \
             Using Smartphones), unzip it, and set HAR_DATA_DIR to the directory \
             containing activity_labels.txt plus the train/ and test/ folders."
        );
        return;
    };

    let config = ExperimentConfig {
        data_dir,
        pca_components: None,
        seed: 42,
        k: 10,
        repeats: 2, // full protocol uses 10
        split_ratio: 0.5,
        models: ModelConfig::default(),
    };

    println!("== pca-sweep ==");
    match cmd_pca_sweep(&config) {
        Ok(bundle) => {
            for cell in &bundle.results.grid {
                let pca = cell.pca.map_or("raw".to_string(), |k| k.to_string());
                match cell.accuracy {
                    Some(acc) => println!("  {:<18} pca={:<4} accuracy={acc:.4}", cell.model, pca),
                    None => println!("  {:<18} pca={:<4} (not implemented)", cell.model, pca),
                }
            }
        }
        Err(e) => eprintln!("pca-sweep failed: {e}"),
    }

    println!("\n== compare-forests ==");
    match cmd_compare_forests(&config) {
        Ok(bundle) => {
            for entry in &bundle.results.entries {
                let pca = entry.pca.map_or("raw".to_string(), |k| k.to_string());
                println!(
                    "  {:<14} pca={:<4} test={:.4} cv_mean={:.4} cv_var={:.5}",
                    entry.model, pca, entry.test_accuracy, entry.cv_mean, entry.cv_variance
                );
            }
            for timing in &bundle.timings {
                println!("  {:<22} fit {:.2}s", timing.model_label, timing.fit_seconds);
            }
        }
        Err(e) => eprintln!("compare-forests failed: {e}"),
    }

    println!("\n== stack ==");
    match cmd_stack(&config) {
        Ok(bundle) => {
            let r = &bundle.results;
            println!("  test accuracy: {:.4}", r.test_accuracy);
            println!(
                "  cv mean {:.4}, variance {:.5} over {} folds",
                r.cv.mean,
                r.cv.variance,
                r.cv.fold_scores.len()
            );
            println!("  confusion matrix:");
            for row in &r.confusion_rows {
                println!("    {row:?}");
            }
            if let Some(auc) = r.macro_auc {
                println!("  macro AUC: {auc:.4}");
            }
        }
        Err(e) => eprintln!("stack failed: {e}"),
    }
}
