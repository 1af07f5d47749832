//! Uniform fit interface over every learner kind in the crate, so cross
//! validation, stacking and the experiment commands can treat them
//! interchangeably.

use ndarray::ArrayView2;

use crate::boosting::{train_gradient_boosting, GradientBoostingParams};
use crate::classifier::{ClassLabel, Learner, TrainedClassifier};
use crate::error::Result;
use crate::knn::train_knn;
use crate::linear::{train_linear_svm_ovr, train_logreg_ovr, LogisticParams, SvmParams};
use crate::random::RngSeed;
use crate::tree::{train_cart, train_forest, CartParams, ForestKind, ForestParams};

/// One configured base learner. Defaults for the logistic, SVM, boosting
/// and extra-trees kinds are the tuned stack settings (`C = 2`,
/// 50 boosting stages at rate 0.2, 100 depth-4 extra trees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseLearnerSpec {
    LogisticOvr(LogisticParams),
    LinearSvm(SvmParams),
    GradientBoosting(GradientBoostingParams),
    ExtraTrees(ForestParams),
    RandomForest(ForestParams),
    Bagging(ForestParams),
    Cart(CartParams),
    Knn { k: usize },
}

impl BaseLearnerSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            BaseLearnerSpec::LogisticOvr(_) => "logreg_ovr",
            BaseLearnerSpec::LinearSvm(_) => "linear_svm",
            BaseLearnerSpec::GradientBoosting(_) => "gradient_boosting",
            BaseLearnerSpec::ExtraTrees(_) => "extra_trees",
            BaseLearnerSpec::RandomForest(_) => "random_forest",
            BaseLearnerSpec::Bagging(_) => "bagging",
            BaseLearnerSpec::Cart(_) => "cart",
            BaseLearnerSpec::Knn { .. } => "knn",
        }
    }
}

impl Learner for BaseLearnerSpec {
    fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        y: &[ClassLabel],
        n_classes: usize,
        seed: RngSeed,
    ) -> Result<Box<dyn TrainedClassifier>> {
        Ok(match *self {
            BaseLearnerSpec::LogisticOvr(params) => {
                Box::new(train_logreg_ovr(x, y, n_classes, params)?)
            }
            BaseLearnerSpec::LinearSvm(params) => {
                Box::new(train_linear_svm_ovr(x, y, n_classes, params, seed)?)
            }
            BaseLearnerSpec::GradientBoosting(params) => {
                Box::new(train_gradient_boosting(x, y, n_classes, params, seed)?)
            }
            BaseLearnerSpec::ExtraTrees(params) => Box::new(train_forest(
                x,
                y,
                n_classes,
                ForestKind::ExtraTrees,
                params,
                seed,
            )?),
            BaseLearnerSpec::RandomForest(params) => Box::new(train_forest(
                x,
                y,
                n_classes,
                ForestKind::RandomForest,
                params,
                seed,
            )?),
            BaseLearnerSpec::Bagging(params) => Box::new(train_forest(
                x,
                y,
                n_classes,
                ForestKind::Bagging,
                params,
                seed,
            )?),
            BaseLearnerSpec::Cart(params) => Box::new(train_cart(x, y, n_classes, params, seed)?),
            BaseLearnerSpec::Knn { k } => Box::new(train_knn(x, y, n_classes, k)?),
        })
    }

    fn label(&self) -> String {
        self.kind_name().to_string()
    }
}
