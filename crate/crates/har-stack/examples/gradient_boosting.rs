//! Gradient boosting on multinomial deviance: watch the staged training
//! loss fall, and compare learning rates at a fixed stage budget.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example gradient_boosting
//! ```

use har_stack::boosting::{staged_train_loss, train_gradient_boosting, GradientBoostingParams};
use har_stack::{accuracy, predict_labels, RngSeed, RngStream};
use ndarray::Array2;

fn spiral_like(n: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let mut rng = RngStream::new(RngSeed(seed), "gbm_data", 0);
    let mut x = Array2::zeros((n, 3));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 3;
        let angle = class as f64 * 2.1 + rng.uniform(-0.6, 0.6);
        let radius = 1.0 + rng.uniform(-0.4, 0.4);
        x[[i, 0]] = radius * angle.cos();
        x[[i, 1]] = radius * angle.sin();
        x[[i, 2]] = rng.uniform(-1.0, 1.0); // pure noise column
        y.push(class);
    }
    (x, y)
}

fn main() {
    let (train_x, train_y) = spiral_like(600, 1);
    let (test_x, test_y) = spiral_like(300, 2);

    let params = GradientBoostingParams {
        n_estimators: 40,
        learning_rate: 0.2,
        max_depth: 3,
    };
    let model = train_gradient_boosting(train_x.view(), &train_y, 3, params, RngSeed(0)).unwrap();

    let losses = staged_train_loss(&model, train_x.view(), &train_y).unwrap();
    println!("stage | train deviance");
    for (stage, loss) in losses.iter().enumerate().step_by(5) {
        println!("{stage:>5} | {loss:.4}");
    }
    println!("(stage 0 is the prior-only model)");
    println!();

    let pred = predict_labels(&model, test_x.view()).unwrap();
    println!("test accuracy at 40 stages: {:.3}", accuracy(&test_y, &pred));
    println!();

    println!("learning rate | final train deviance");
    for lr in [0.05, 0.1, 0.2, 0.5] {
        let params = GradientBoostingParams {
            n_estimators: 40,
            learning_rate: lr,
            max_depth: 3,
        };
        let m = train_gradient_boosting(train_x.view(), &train_y, 3, params, RngSeed(0)).unwrap();
        let losses = staged_train_loss(&m, train_x.view(), &train_y).unwrap();
        println!("{lr:>13} | {:.4}", losses.last().unwrap());
    }
}
