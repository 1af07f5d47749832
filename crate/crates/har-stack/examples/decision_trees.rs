//! A single CART tree: Gini-minimizing splits, the depth knob, and the
//! random-threshold splitter used by extra trees.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example decision_trees
//! ```

use har_stack::tree::{
    train_cart, CandidateFeatures, CartParams, ColumnMatrix, Splitter, TreeNode,
    extra_trees_node_split,
};
use har_stack::{accuracy, predict_labels, RngSeed, RngStream};
use ndarray::Array2;

fn noisy_rings(n: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let mut rng = RngStream::new(RngSeed(seed), "rings", 0);
    let mut x = Array2::zeros((n, 2));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let a = rng.uniform(-3.0, 3.0);
        let b = rng.uniform(-3.0, 3.0);
        x[[i, 0]] = a;
        x[[i, 1]] = b;
        let r = (a * a + b * b).sqrt() + rng.uniform(-0.2, 0.2);
        y.push(usize::from(r > 2.0));
    }
    (x, y)
}

fn main() {
    let (train_x, train_y) = noisy_rings(400, 3);
    let (test_x, test_y) = noisy_rings(200, 4);

    println!("depth | train acc | test acc | nodes");
    for depth in [1, 2, 4, 8, 0] {
        let params = CartParams {
            max_depth: if depth == 0 { None } else { Some(depth) },
            ..CartParams::default()
        };
        let tree = train_cart(train_x.view(), &train_y, 2, params, RngSeed(0)).unwrap();
        let train_acc = accuracy(&train_y, &predict_labels(&tree, train_x.view()).unwrap());
        let test_acc = accuracy(&test_y, &predict_labels(&tree, test_x.view()).unwrap());
        let label = if depth == 0 { "full".to_string() } else { depth.to_string() };
        println!(
            "{label:>5} | {train_acc:>9.3} | {test_acc:>8.3} | {:>5}",
            tree.nodes.len()
        );
    }
    println!();

    // the root split of the best-splitter tree
    let tree = train_cart(
        train_x.view(),
        &train_y,
        2,
        CartParams::default(),
        RngSeed(0),
    )
    .unwrap();
    if let TreeNode::Internal { feature, threshold, .. } = &tree.nodes[0] {
        println!("root split: feature {feature} at threshold {threshold:.3}");
    }

    // the extra-trees rule draws random thresholds on random features and
    // keeps the best of the candidates
    let columns = ColumnMatrix::from_rows(train_x.view());
    let samples: Vec<u32> = (0..train_x.nrows() as u32).collect();
    let mut rng = RngStream::new(RngSeed(9), "node_split", 0);
    let (feature, threshold) =
        extra_trees_node_split(&columns, &samples, &train_y, 2, 2, &mut rng).unwrap();
    println!("random-splitter pick: feature {feature} at threshold {threshold:.3}");

    // the same rule is available through CartParams for whole trees
    let random_tree = train_cart(
        train_x.view(),
        &train_y,
        2,
        CartParams {
            candidate_features: CandidateFeatures::Count(1),
            splitter: Splitter::Random,
            ..CartParams::default()
        },
        RngSeed(2),
    )
    .unwrap();
    let acc = accuracy(&test_y, &predict_labels(&random_tree, test_x.view()).unwrap());
    println!("single fully random tree test accuracy: {acc:.3}");
}
