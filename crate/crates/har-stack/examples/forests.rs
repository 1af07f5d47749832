//! Bagging, random forest and extra trees side by side: accuracy and fit
//! time at equal ensemble size. Extra trees skip both the bootstrap and
//! the per-node sort, which is where their speed comes from.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example forests
//! ```

use std::time::Instant;

use har_stack::tree::{root_sample_indices, train_forest, ForestKind, ForestParams};
use har_stack::{accuracy, predict_labels, RngSeed, RngStream};
use ndarray::Array2;

fn structured_data(n: usize, d: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let mut rng = RngStream::new(RngSeed(seed), "forest_data", 0);
    let mut x = Array2::zeros((n, d));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 3;
        for j in 0..d {
            let signal = if j % 3 == class { 1.2 } else { 0.0 };
            x[[i, j]] = signal + rng.uniform(-1.0, 1.0);
        }
        y.push(class);
    }
    (x, y)
}

fn main() {
    let (train_x, train_y) = structured_data(2000, 40, 1);
    let (test_x, test_y) = structured_data(800, 40, 2);

    println!("model         | estimators | test acc | fit time");
    for (kind, label) in [
        (ForestKind::Bagging, "bagging"),
        (ForestKind::RandomForest, "random_forest"),
        (ForestKind::ExtraTrees, "extra_trees"),
    ] {
        let params = ForestParams {
            n_estimators: 60,
            ..ForestParams::default()
        };
        let start = Instant::now();
        let forest = train_forest(train_x.view(), &train_y, 3, kind, params, RngSeed(7)).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let pred = predict_labels(&forest, test_x.view()).unwrap();
        println!(
            "{label:<13} | {:>10} | {:>8.3} | {elapsed:>7.2}s",
            forest.trees.len(),
            accuracy(&test_y, &pred),
        );
    }
    println!();

    // bootstrap vs no bootstrap, visible through the root sample draws
    let bagged = root_sample_indices(ForestKind::RandomForest, 10, RngSeed(7), 0);
    let full = root_sample_indices(ForestKind::ExtraTrees, 10, RngSeed(7), 0);
    println!("random forest tree 0 samples (with replacement): {bagged:?}");
    println!("extra trees tree 0 samples (every index once):   {full:?}");
}
