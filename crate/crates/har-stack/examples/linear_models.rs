//! One-vs-rest linear classifiers: L1 logistic regression and a hinge-loss
//! SVM trained by subgradient descent, on the same three-class problem.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example linear_models
//! ```

use har_stack::linear::{
    sigmoid, train_linear_svm_ovr, train_logreg_ovr, LogisticParams, SvmParams,
};
use har_stack::{accuracy, predict_labels, RngSeed, RngStream};
use ndarray::Array2;

fn three_blobs(n: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let centers = [(-3.0, 0.0), (3.0, 0.0), (0.0, 4.0)];
    let mut rng = RngStream::new(RngSeed(seed), "blobs", 0);
    let mut x = Array2::zeros((n, 2));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 3;
        let (cx, cy) = centers[class];
        x[[i, 0]] = cx + rng.uniform(-1.5, 1.5);
        x[[i, 1]] = cy + rng.uniform(-1.5, 1.5);
        y.push(class);
    }
    (x, y)
}

fn main() {
    println!("sigmoid(0) = {}, sigmoid(2) = {:.6}", sigmoid(0.0), sigmoid(2.0));
    println!();

    let (train_x, train_y) = three_blobs(300, 1);
    let (test_x, test_y) = three_blobs(150, 2);

    // Logistic regression, light L1
    let logreg = train_logreg_ovr(
        train_x.view(),
        &train_y,
        3,
        LogisticParams::default(),
    )
    .unwrap();
    let pred = predict_labels(&logreg, test_x.view()).unwrap();
    println!("logistic regression test accuracy: {:.3}", accuracy(&test_y, &pred));

    // Heavier L1 shrinks weights to exact zeros
    for lambda in [0.001, 0.05, 0.5] {
        let model = train_logreg_ovr(
            train_x.view(),
            &train_y,
            3,
            LogisticParams {
                l1_lambda: Some(lambda),
                ..LogisticParams::default()
            },
        )
        .unwrap();
        let zeros = model.weights.iter().filter(|&&w| w == 0.0).count();
        println!("  lambda = {lambda:<5}: {zeros} of {} weights exactly zero", model.weights.len());
    }
    println!();

    // Linear SVM with the hinge loss
    let svm = train_linear_svm_ovr(
        train_x.view(),
        &train_y,
        3,
        SvmParams { c: 2.0, epochs: 60 },
        RngSeed(5),
    )
    .unwrap();
    let pred = predict_labels(&svm, test_x.view()).unwrap();
    println!("linear SVM (C = 2.0) test accuracy: {:.3}", accuracy(&test_y, &pred));

    // Both models expose class probabilities via softmax over their scores
    use har_stack::TrainedClassifier;
    let proba = svm.predict_proba(test_x.slice(ndarray::s![..3, ..])).unwrap();
    println!("first three SVM probability rows:");
    for row in proba.outer_iter() {
        println!("  [{:.3}, {:.3}, {:.3}]", row[0], row[1], row[2]);
    }
}
