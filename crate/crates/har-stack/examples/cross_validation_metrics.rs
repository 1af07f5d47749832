//! The evaluation toolbox: repeated stratified k-fold cross validation,
//! confusion matrix, per-class classification report, and one-vs-rest
//! ROC curves with AUC.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example cross_validation_metrics
//! ```

use har_stack::classifier::Learner;
use har_stack::cv::repeated_kfold_cv;
use har_stack::learner::BaseLearnerSpec;
use har_stack::metrics::{classification_report, roc_ovr, ConfusionMatrix};
use har_stack::tree::ForestParams;
use har_stack::{predict_labels, RngSeed, RngStream};
use ndarray::Array2;

fn noisy_classes(n: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let mut rng = RngStream::new(RngSeed(seed), "cv_data", 0);
    let mut x = Array2::zeros((n, 5));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 3;
        for j in 0..5 {
            x[[i, j]] = if j == class { 1.0 } else { 0.0 } + rng.uniform(-0.9, 0.9);
        }
        y.push(class);
    }
    (x, y)
}

fn main() {
    let (x, y) = noisy_classes(600, 3);
    let spec = BaseLearnerSpec::ExtraTrees(ForestParams {
        n_estimators: 40,
        ..ForestParams::default()
    });

    // 5 repeats x 5 folds = 25 scores, each from a fresh fit
    let report = repeated_kfold_cv(&spec, x.view(), &y, 3, 5, 5, RngSeed(11)).unwrap();
    println!(
        "cross validation: {} folds, mean accuracy {:.3}, variance {:.5}",
        report.fold_scores.len(),
        report.mean,
        report.variance
    );
    println!();

    // fixed train/test split for the remaining metrics
    let (test_x, test_y) = noisy_classes(300, 4);
    let model = spec.fit(x.view(), &y, 3, RngSeed(2)).unwrap();
    let pred = predict_labels(model.as_ref(), test_x.view()).unwrap();

    let cm = ConfusionMatrix::from_labels(&test_y, &pred, 3).unwrap();
    println!("confusion matrix (rows = true, cols = predicted):");
    for c in 0..3 {
        println!("  {:?}", cm.row(c));
    }
    println!();

    let cr = classification_report(&cm).unwrap();
    println!("class | precision | recall | f1    | support");
    for (c, m) in cr.per_class.iter().enumerate() {
        println!(
            "{c:>5} | {:>9.3} | {:>6.3} | {:.3} | {:>7}",
            m.precision, m.recall, m.f1, m.support
        );
    }
    println!(
        "accuracy {:.3}, macro F1 {:.3}, weighted F1 {:.3}",
        cr.accuracy, cr.macro_f1, cr.weighted_f1
    );
    println!();

    let proba = model.predict_proba(test_x.view()).unwrap();
    let roc = roc_ovr(&test_y, proba.view()).unwrap();
    for (c, curve) in roc.per_class.iter().enumerate() {
        let curve = curve.as_ref().unwrap();
        println!(
            "class {c}: AUC {:.3} over {} ROC points (ends at {:?})",
            curve.auc,
            curve.points.len(),
            curve.points.last().unwrap()
        );
    }
    println!("macro AUC: {:.3}", roc.macro_auc.unwrap());
}
