//! K-nearest neighbors: probabilities are neighbor class frequencies, so
//! k trades off sharpness against stability.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example nearest_neighbors
//! ```

use har_stack::knn::train_knn;
use har_stack::{accuracy, predict_labels, RngSeed, RngStream, TrainedClassifier};
use ndarray::{arr2, Array2};

fn main() {
    // tie behaviour on a miniature example: the query sits exactly between
    // a class-1 and a class-0 point
    let x = arr2(&[[1.0], [-1.0], [50.0]]);
    let y = vec![1, 0, 2];
    let model = train_knn(x.view(), &y, 3, 2).unwrap();
    let proba = model.predict_proba(arr2(&[[0.0]]).view()).unwrap();
    println!(
        "equidistant k=2 query: p = [{:.2}, {:.2}, {:.2}] -> label {} (tie goes to the lower id)",
        proba[[0, 0]],
        proba[[0, 1]],
        proba[[0, 2]],
        predict_labels(&model, arr2(&[[0.0]]).view()).unwrap()[0]
    );
    println!();

    // accuracy across k on noisy blobs
    let gen = |n: usize, seed: u64| -> (Array2<f64>, Vec<usize>) {
        let mut rng = RngStream::new(RngSeed(seed), "knn_data", 0);
        let mut x = Array2::zeros((n, 2));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let class = i % 2;
            x[[i, 0]] = class as f64 * 2.0 + rng.uniform(-1.5, 1.5);
            x[[i, 1]] = rng.uniform(-1.0, 1.0);
            y.push(class);
        }
        (x, y)
    };
    let (train_x, train_y) = gen(400, 1);
    let (test_x, test_y) = gen(200, 2);

    println!("    k | test accuracy");
    for k in [1, 5, 25, 101, 400] {
        let model = train_knn(train_x.view(), &train_y, 2, k).unwrap();
        let pred = predict_labels(&model, test_x.view()).unwrap();
        println!("{k:>5} | {:.3}", accuracy(&test_y, &pred));
    }
    println!("(k = 400 is the whole training set: probabilities collapse to the class priors)");
}
