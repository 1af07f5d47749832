//! Principal component analysis on correlated data: fit, inspect the
//! explained-variance spectrum, project, and reconstruct.
//!
//! Run with:
//! ```bash
//! cargo run --release -p har-stack --example pca_explained_variance
//! ```

use har_stack::pca::{fit_pca, pca_inverse_transform, pca_transform, proportion_of_variance};
use har_stack::{RngSeed, RngStream};
use ndarray::Array2;

fn main() {
    // 300 samples in 20 dimensions, but only 4 independent directions:
    // the rest is mixing plus a little noise.
    let n = 300;
    let d = 20;
    let latent = 4;
    let mut rng = RngStream::new(RngSeed(7), "pca_example", 0);
    let mixing: Vec<f64> = (0..d * latent).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let x = {
        let mut x = Array2::zeros((n, d));
        let mut z = vec![0.0; latent];
        for i in 0..n {
            for slot in z.iter_mut() {
                *slot = rng.uniform(-2.0, 2.0);
            }
            for (f, slot) in x.row_mut(i).iter_mut().enumerate() {
                let signal: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(j, &zj)| mixing[f * latent + j] * zj)
                    .sum();
                *slot = signal + 0.01 * rng.uniform(-1.0, 1.0);
            }
        }
        x
    };

    let model = fit_pca(x.view(), 8).unwrap();
    let pov = proportion_of_variance(&model);
    println!("component | variance   | cumulative PoV");
    for (i, (&var, &cum)) in model.explained_variance.iter().zip(&pov).enumerate() {
        println!("{:>9} | {:>10.5} | {:.5}", i + 1, var, cum);
    }
    println!();
    println!(
        "four components carry {:.2}% of the variance (the latent rank)",
        pov[3] * 100.0
    );

    // project to 4 dimensions and measure the reconstruction error
    let reduced = fit_pca(x.view(), 4).unwrap();
    let z = pca_transform(&reduced, x.view()).unwrap();
    let back = pca_inverse_transform(&reduced, z.view()).unwrap();
    let mse = (&x - &back).mapv(|v| v * v).mean().unwrap();
    println!("projected {:?} -> {:?}", x.dim(), z.dim());
    println!("reconstruction MSE from 4 components: {mse:.6}");
}
