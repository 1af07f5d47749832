//! From-scratch ensemble learning toolkit built around two classifiers:
//! extremely randomized trees and a two-level stacked generalization
//! ensemble, plus the base learners they draw on (L1 logistic regression,
//! linear SVM, gradient boosting, CART forests, KNN) and the evaluation
//! machinery to compare them (repeated stratified cross validation,
//! confusion matrices, classification reports, one-vs-rest ROC/AUC, PCA
//! feature reduction).
//!
//! The crate doubles as an experiment runner for the UCI HAR dataset; see
//! the `examples/` directory for one runnable walkthrough per capability
//! and the `har-stack` binary for the three packaged experiments.

pub mod boosting;
pub mod classifier;
pub mod cv;
pub mod data;
pub mod error;
pub mod experiments;
pub mod knn;
pub mod learner;
pub mod linear;
mod math;
pub mod metrics;
pub mod pca;
pub mod random;
pub mod report;
pub mod stacking;
pub mod tree;

pub use classifier::{predict_labels, ClassLabel, ClassProbabilities, Learner, TrainedClassifier};
pub use data::{load_har_split, stratified_split, Dataset, Split, SplitPair};
pub use error::{Error, Result};
pub use math::accuracy;
pub use random::{RngSeed, RngStream};
