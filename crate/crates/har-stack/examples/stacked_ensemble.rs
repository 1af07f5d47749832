//! Stacked generalization: four base learners fit on one half of the
//! training data, a logistic meta-learner fit on their probability
//! outputs over the other half.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example stacked_ensemble
//! ```

use har_stack::boosting::GradientBoostingParams;
use har_stack::classifier::Learner;
use har_stack::learner::BaseLearnerSpec;
use har_stack::linear::{LogisticParams, SvmParams};
use har_stack::stacking::{meta_features, train_stacked, StackSpec};
use har_stack::tree::ForestParams;
use har_stack::{accuracy, predict_labels, RngSeed, RngStream};
use ndarray::Array2;

fn overlapping_blobs(n: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let centers = [(-1.6, 0.0), (1.6, 0.0), (0.0, 2.2), (0.0, -2.2)];
    let mut rng = RngStream::new(RngSeed(seed), "stack_data", 0);
    let mut x = Array2::zeros((n, 4));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 4;
        let (cx, cy) = centers[class];
        x[[i, 0]] = cx + rng.uniform(-1.4, 1.4);
        x[[i, 1]] = cy + rng.uniform(-1.4, 1.4);
        x[[i, 2]] = x[[i, 0]] * 0.5 + rng.uniform(-0.5, 0.5);
        x[[i, 3]] = rng.uniform(-1.0, 1.0);
        y.push(class);
    }
    (x, y)
}

fn main() {
    let (train_x, train_y) = overlapping_blobs(1200, 5);
    let (test_x, test_y) = overlapping_blobs(600, 6);

    let spec = StackSpec {
        base: vec![
            BaseLearnerSpec::LogisticOvr(LogisticParams::default()),
            BaseLearnerSpec::LinearSvm(SvmParams { c: 2.0, epochs: 40 }),
            BaseLearnerSpec::GradientBoosting(GradientBoostingParams {
                n_estimators: 25,
                ..GradientBoostingParams::default()
            }),
            BaseLearnerSpec::ExtraTrees(ForestParams {
                n_estimators: 50,
                max_depth: Some(4),
                ..ForestParams::default()
            }),
        ],
        meta: har_stack::stacking::default_meta_spec(),
        split_ratio: 0.5,
        levels: 2,
    };

    // individual performance of each base learner on the full train set
    println!("base learner      | test accuracy (fit on all training data)");
    for base in &spec.base {
        let model = base.fit(train_x.view(), &train_y, 4, RngSeed(1)).unwrap();
        let pred = predict_labels(model.as_ref(), test_x.view()).unwrap();
        println!("{:<17} | {:.3}", base.kind_name(), accuracy(&test_y, &pred));
    }

    let stack = train_stacked(train_x.view(), &train_y, 4, &spec, RngSeed(1)).unwrap();
    let pred = predict_labels(&stack, test_x.view()).unwrap();
    println!("{:<17} | {:.3}", "stacked ensemble", accuracy(&test_y, &pred));
    println!();
    println!(
        "base learners saw {} samples (D1); the meta-learner saw {} (D2)",
        stack.d1_indices.len(),
        stack.d2_indices.len()
    );

    // the meta-learner consumes one probability block per base learner
    let m = meta_features(&stack.base_models, test_x.slice(ndarray::s![..2, ..])).unwrap();
    println!("meta-feature width: {} (= 4 learners x 4 classes)", m.ncols());
    println!("first meta-feature row:");
    let row = m.row(0);
    for t in 0..4 {
        let block: Vec<String> = (0..4).map(|c| format!("{:.2}", row[t * 4 + c])).collect();
        println!("  {:<17} -> [{}]", spec.base[t].kind_name(), block.join(", "));
    }
}
