//! Shared helpers for integration tests: a synthetic dataset generator
//! with HAR-like shape (561 features, 6 classes, values in [-1, 1]), a
//! writer that lays it out in the published HAR text format, and the
//! locator for the real dataset.
//!
//! Not every test target uses every helper.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use har_stack::data::HAR_FEATURES;
use har_stack::{Dataset, RngSeed, RngStream};
use ndarray::Array2;

pub const CLASS_NAMES: [&str; 6] = [
    "WALKING",
    "WALKING_UPSTAIRS",
    "WALKING_DOWNSTAIRS",
    "SITTING",
    "STANDING",
    "LAYING",
];

/// Low-rank class-structured data squashed into [-1, 1]: a latent class
/// mean plus noise, mixed through a shared random projection. Linear
/// models and tree ensembles both learn it well, and PCA concentrates
/// most variance in the leading components.
pub fn synthetic_har(n: usize, seed: u64, sample_tag: &str) -> Dataset {
    let d = HAR_FEATURES;
    let latent = 16;
    let classes = 6;

    let mut wgen = RngStream::new(RngSeed(seed), "gen_mixing", 0);
    let mixing: Vec<f64> = (0..d * latent).map(|_| wgen.uniform(-1.0, 1.0)).collect();
    let mut mgen = RngStream::new(RngSeed(seed), "gen_means", 0);
    let means: Vec<f64> = (0..classes * latent).map(|_| mgen.uniform(-1.6, 1.6)).collect();

    let mut sgen = RngStream::new(RngSeed(seed), sample_tag, 0);
    let mut x = Array2::zeros((n, d));
    let mut y = Vec::with_capacity(n);
    let mut z = vec![0.0f64; latent];
    for i in 0..n {
        let class = i % classes;
        y.push(class);
        for (j, slot) in z.iter_mut().enumerate() {
            *slot = means[class * latent + j] + sgen.uniform(-1.0, 1.0);
        }
        let mut row = x.row_mut(i);
        for (f, slot) in row.iter_mut().enumerate() {
            let mut v = 0.0;
            for (j, &zj) in z.iter().enumerate() {
                v += mixing[f * latent + j] * zj;
            }
            *slot = (v / (latent as f64).sqrt() + 0.05 * sgen.uniform(-1.0, 1.0)).tanh();
        }
    }
    Dataset::new(x, y, CLASS_NAMES.iter().map(|s| s.to_string()).collect()).unwrap()
}

/// Writes a dataset pair in the published HAR layout (train/ and test/
/// subdirectories plus activity_labels.txt at the root).
pub fn write_har_layout(dir: &Path, train: &Dataset, test: &Dataset) {
    let mut labels = String::new();
    for (i, name) in CLASS_NAMES.iter().enumerate() {
        writeln!(labels, "{} {}", i + 1, name).unwrap();
    }
    fs::write(dir.join("activity_labels.txt"), labels).unwrap();
    for (split, data) in [("train", train), ("test", test)] {
        let sub = dir.join(split);
        fs::create_dir_all(&sub).unwrap();
        let mut xs = String::new();
        let mut ys = String::new();
        for (row, &label) in data.x.outer_iter().zip(&data.y) {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.7e}")).collect();
            writeln!(xs, " {}", fields.join(" ")).unwrap();
            writeln!(ys, "{}", label + 1).unwrap();
        }
        fs::write(sub.join(format!("X_{split}.txt")), xs).unwrap();
        fs::write(sub.join(format!("y_{split}.txt")), ys).unwrap();
    }
}

/// Locates the real HAR dataset: `HAR_DATA_DIR`, then conventional
/// checkout locations. Returns `None` when unavailable.
pub fn real_har_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os("HAR_DATA_DIR") {
        let path = PathBuf::from(dir);
        if path.is_dir() {
            return Some(path);
        }
    }
    for candidate in ["data", "data/UCI HAR Dataset", "../data", "../../data"] {
        let path = PathBuf::from(candidate);
        if path.join("activity_labels.txt").is_file()
            || path.join("UCI HAR Dataset").join("activity_labels.txt").is_file()
        {
            return Some(path);
        }
    }
    None
}
