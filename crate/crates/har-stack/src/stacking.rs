//! Stacked generalization: T base learners are fit on one half of a
//! stratified split (D1), their class-probability outputs over the other
//! half (D2) become meta-features, and a second-level learner fits the
//! meta-features. Exactly two levels are supported.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::classifier::{ClassLabel, Learner, TrainedClassifier};
use crate::data::stratified_partition_indices;
use crate::error::{Error, Result};
use crate::learner::BaseLearnerSpec;
use crate::linear::{LogisticParams, SvmParams};
use crate::random::{RngSeed, RngStream};

/// Configuration of a two-level stack.
#[derive(Debug, Clone)]
pub struct StackSpec {
    pub base: Vec<BaseLearnerSpec>,
    pub meta: BaseLearnerSpec,
    /// Fraction of the training data used for the base learners (D1).
    pub split_ratio: f64,
    /// Stacking depth; only 2 is accepted.
    pub levels: usize,
}

impl StackSpec {
    /// The tuned four-model roster: L1 logistic regression, linear SVM
    /// with `C = 2`, gradient boosting (50 stages, rate 0.2), and 100
    /// depth-4 extra trees, under a logistic meta-learner.
    pub fn default_roster() -> Self {
        StackSpec {
            base: vec![
                BaseLearnerSpec::LogisticOvr(LogisticParams::default()),
                BaseLearnerSpec::LinearSvm(SvmParams::default()),
                BaseLearnerSpec::GradientBoosting(Default::default()),
                BaseLearnerSpec::ExtraTrees(crate::tree::ForestParams {
                    n_estimators: 100,
                    max_depth: Some(4),
                    ..Default::default()
                }),
            ],
            meta: default_meta_spec(),
            split_ratio: 0.5,
            levels: 2,
        }
    }
}

/// Logistic regression with a light L1 penalty, the default meta-learner.
pub fn default_meta_spec() -> BaseLearnerSpec {
    BaseLearnerSpec::LogisticOvr(LogisticParams {
        l1_lambda: Some(1e-4),
        ..LogisticParams::default()
    })
}

/// A fitted stack, including the D1/D2 split recipe it was built from.
pub struct StackedModel {
    pub base_models: Vec<Box<dyn TrainedClassifier>>,
    pub meta_model: Box<dyn TrainedClassifier>,
    pub split_ratio: f64,
    pub seed: RngSeed,
    pub d1_indices: Vec<usize>,
    pub d2_indices: Vec<usize>,
    n_features: usize,
    n_classes: usize,
}

/// Concatenates each model's probability rows, learner order preserved:
/// shape `(rows, T * n_classes)`.
pub fn meta_features(
    base_models: &[Box<dyn TrainedClassifier>],
    x: ArrayView2<'_, f64>,
) -> Result<Array2<f64>> {
    if base_models.is_empty() {
        return Err(Error::validation("no base models"));
    }
    let n_classes = base_models[0].n_classes();
    if base_models.iter().any(|m| m.n_classes() != n_classes) {
        return Err(Error::shape(
            format!("all base models with {n_classes} classes"),
            "mixed class counts",
        ));
    }
    let mut out = Array2::zeros((x.nrows(), base_models.len() * n_classes));
    for (t, model) in base_models.iter().enumerate() {
        let block = model.predict_proba(x)?;
        if block.dim() != (x.nrows(), n_classes) {
            return Err(Error::shape(
                format!("({}, {n_classes}) probability block", x.nrows()),
                format!("{:?}", block.dim()),
            ));
        }
        out.slice_mut(ndarray::s![.., t * n_classes..(t + 1) * n_classes])
            .assign(&block);
    }
    Ok(out)
}

fn gather(x: ArrayView2<'_, f64>, y: &[ClassLabel], indices: &[usize]) -> (Array2<f64>, Vec<ClassLabel>) {
    let mut gx = Array2::zeros((indices.len(), x.ncols()));
    let mut gy = Vec::with_capacity(indices.len());
    for (row, &i) in indices.iter().enumerate() {
        gx.row_mut(row).assign(&x.row(i));
        gy.push(y[i]);
    }
    (gx, gy)
}

fn derived_seed(seed: RngSeed, tag: &str, index: u64) -> RngSeed {
    RngSeed(RngStream::new(seed, tag, index).next_u64())
}

/// Trains a stack: stratified D1/D2 split, base fits on D1 (in parallel),
/// meta-learner fit on the D2 meta-features.
pub fn train_stacked(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    spec: &StackSpec,
    seed: RngSeed,
) -> Result<StackedModel> {
    if spec.base.is_empty() {
        return Err(Error::validation("stack needs at least one base learner"));
    }
    if spec.levels != 2 {
        return Err(Error::validation(format!(
            "only 2-level stacks are supported, got {}",
            spec.levels
        )));
    }
    if !(spec.split_ratio > 0.0 && spec.split_ratio < 1.0) {
        return Err(Error::validation("split_ratio must be in (0, 1)"));
    }
    if x.nrows() != y.len() {
        return Err(Error::shape(
            format!("{} rows", x.nrows()),
            format!("{} labels", y.len()),
        ));
    }

    let split_seed = derived_seed(seed, "stack_split", 0);
    let (d1_indices, d2_indices) =
        stratified_partition_indices(y, n_classes, spec.split_ratio, split_seed)?;
    let (x1, y1) = gather(x, y, &d1_indices);
    let (x2, y2) = gather(x, y, &d2_indices);

    let base_models: Vec<Box<dyn TrainedClassifier>> = spec
        .base
        .par_iter()
        .enumerate()
        .map(|(t, spec)| {
            spec.fit(
                x1.view(),
                &y1,
                n_classes,
                derived_seed(seed, "stack_base", t as u64),
            )
            .map_err(|e| Error::BaseLearner {
                index: t,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let meta_matrix = meta_features(&base_models, x2.view())?;
    let meta_model = spec
        .meta
        .fit(
            meta_matrix.view(),
            &y2,
            n_classes,
            derived_seed(seed, "stack_meta", 0),
        )
        .map_err(|e| Error::BaseLearner {
            index: spec.base.len(),
            source: Box::new(e),
        })?;

    Ok(StackedModel {
        base_models,
        meta_model,
        split_ratio: spec.split_ratio,
        seed,
        d1_indices,
        d2_indices,
        n_features: x.ncols(),
        n_classes,
    })
}

impl TrainedClassifier for StackedModel {
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let m = meta_features(&self.base_models, x)?;
        if m.ncols() != self.meta_model.n_features_expected() {
            return Err(Error::shape(
                format!("{} meta-features", self.meta_model.n_features_expected()),
                format!("{}", m.ncols()),
            ));
        }
        self.meta_model.predict_proba(m.view())
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features_expected(&self) -> usize {
        self.n_features
    }
}

impl Learner for StackSpec {
    fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        y: &[ClassLabel],
        n_classes: usize,
        seed: RngSeed,
    ) -> Result<Box<dyn TrainedClassifier>> {
        Ok(Box::new(train_stacked(x, y, n_classes, self, seed)?))
    }

    fn label(&self) -> String {
        let names: Vec<&str> = self.base.iter().map(|s| s.kind_name()).collect();
        format!("stack[{}]", names.join("+"))
    }
}
