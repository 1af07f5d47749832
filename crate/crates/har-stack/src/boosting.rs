//! Multi-class gradient boosting on multinomial deviance.
//!
//! Scores start at the log class priors. Every stage fits one regression
//! tree per class to that class's residual `1{y=c} - p_c`, sets leaf
//! values by a one-step Newton update, and adds the tree scaled by the
//! learning rate. There is no subsampling, so fitting is fully
//! deterministic; per-class trees within a stage fit in parallel.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::classifier::{check_feature_width, ClassLabel, TrainedClassifier};
use crate::error::{Error, Result};
use crate::math::softmax_in_place;
use crate::random::RngSeed;
use crate::tree::ColumnMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum RegressionNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Regression tree stored as a flat arena, root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<RegressionNode>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = 0;
        loop {
            match &self.nodes[node] {
                RegressionNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] < *threshold { *left } else { *right };
                }
                RegressionNode::Leaf { value } => return *value,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientBoostingParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
}

impl Default for GradientBoostingParams {
    fn default() -> Self {
        GradientBoostingParams {
            n_estimators: 50,
            learning_rate: 0.2,
            max_depth: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GradientBoostingModel {
    /// `stages[m][c]` is the stage-`m` tree for class `c`.
    pub stages: Vec<Vec<RegressionTree>>,
    pub learning_rate: f64,
    /// Log class priors.
    pub initial_scores: Vec<f64>,
    pub max_depth: usize,
    pub n_features: usize,
}

const NEWTON_DENOM_GUARD: f64 = 1e-10;
const MIN_SPLIT_GAIN: f64 = 1e-12;

/// One feature pre-sorted: sample indices in value order plus the values
/// themselves, so the split scan reads sequentially.
struct SortedFeature {
    order: Vec<u32>,
    values: Vec<f64>,
}

/// Computed once per fit and shared by every tree (targets change across
/// stages, feature order does not).
fn presort_features(columns: &ColumnMatrix) -> Vec<SortedFeature> {
    (0..columns.n_cols())
        .into_par_iter()
        .map(|f| {
            let col = columns.column(f);
            let mut order: Vec<u32> = (0..col.len() as u32).collect();
            order.sort_unstable_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
            let values = order.iter().map(|&i| col[i as usize]).collect();
            SortedFeature { order, values }
        })
        .collect()
}

/// Level-order regression tree fit against squared error on `targets`.
/// Returns the tree plus each training sample's predicted value, so the
/// caller can update scores without re-routing.
fn fit_regression_tree(
    columns: &ColumnMatrix,
    presorted: &[SortedFeature],
    targets: &[f64],
    max_depth: usize,
    k_classes: usize,
) -> (RegressionTree, Vec<f64>) {
    let n = targets.len();
    let d = columns.n_cols();
    let mut arena: Vec<RegressionNode> = vec![RegressionNode::Leaf { value: 0.0 }];
    let mut node_of: Vec<u32> = vec![0; n];
    let mut active: Vec<usize> = vec![0];

    for _level in 0..max_depth {
        if active.is_empty() {
            break;
        }
        let n_slots = active.len();
        let mut arena_to_slot = vec![u32::MAX; arena.len()];
        for (slot, &aid) in active.iter().enumerate() {
            arena_to_slot[aid] = slot as u32;
        }

        let mut count = vec![0u32; n_slots];
        let mut sum = vec![0.0f64; n_slots];
        for (i, &aid) in node_of.iter().enumerate() {
            let slot = arena_to_slot[aid as usize];
            if slot != u32::MAX {
                count[slot as usize] += 1;
                sum[slot as usize] += targets[i];
            }
        }

        // best split per slot, keyed (-quality, feature, threshold) so the
        // lexicographic minimum maximizes quality with deterministic ties
        let mut best: Vec<Option<(f64, usize, f64)>> = vec![None; n_slots];
        let mut n_left = vec![0u32; n_slots];
        let mut sum_left = vec![0.0f64; n_slots];
        let mut prev_val = vec![0.0f64; n_slots];
        let mut seen = vec![false; n_slots];
        for f in 0..d {
            n_left.iter_mut().for_each(|v| *v = 0);
            sum_left.iter_mut().for_each(|v| *v = 0.0);
            seen.iter_mut().for_each(|v| *v = false);
            let feature = &presorted[f];
            for (&i, &v) in feature.order.iter().zip(&feature.values) {
                let i = i as usize;
                let slot = arena_to_slot[node_of[i] as usize];
                if slot == u32::MAX {
                    continue;
                }
                let slot = slot as usize;
                if seen[slot] && v > prev_val[slot] && n_left[slot] > 0 {
                    let nl = n_left[slot];
                    let nr = count[slot] - nl;
                    if nr > 0 {
                        let sl = sum_left[slot];
                        let sr = sum[slot] - sl;
                        let quality = sl * sl / nl as f64 + sr * sr / nr as f64;
                        let mut threshold = 0.5 * (prev_val[slot] + v);
                        if threshold <= prev_val[slot] {
                            threshold = v;
                        }
                        let key = (-quality, f, threshold);
                        if best[slot].map_or(true, |b| key < b) {
                            best[slot] = Some(key);
                        }
                    }
                }
                n_left[slot] += 1;
                sum_left[slot] += targets[i];
                prev_val[slot] = v;
                seen[slot] = true;
            }
        }

        // materialize splits with positive gain
        let mut split_of: Vec<Option<(usize, f64, usize, usize)>> = vec![None; arena.len()];
        let mut next_active = Vec::new();
        for (slot, &aid) in active.iter().enumerate() {
            let Some((neg_quality, feature, threshold)) = best[slot] else {
                continue;
            };
            let parent_term = sum[slot] * sum[slot] / count[slot] as f64;
            let gain = -neg_quality - parent_term;
            if gain <= MIN_SPLIT_GAIN {
                continue;
            }
            let left = arena.len();
            let right = arena.len() + 1;
            arena.push(RegressionNode::Leaf { value: 0.0 });
            arena.push(RegressionNode::Leaf { value: 0.0 });
            arena[aid] = RegressionNode::Internal {
                feature,
                threshold,
                left,
                right,
            };
            split_of[aid] = Some((feature, threshold, left, right));
            next_active.push(left);
            next_active.push(right);
        }
        if next_active.is_empty() {
            break;
        }
        for (i, aid) in node_of.iter_mut().enumerate() {
            if let Some((feature, threshold, left, right)) = split_of[*aid as usize] {
                let v = columns.column(feature)[i];
                *aid = if v < threshold { left as u32 } else { right as u32 };
            }
        }
        active = next_active;
    }

    // Newton leaf values: gamma = ((K-1)/K) * sum r / sum |r|(1-|r|)
    let mut num = vec![0.0f64; arena.len()];
    let mut den = vec![0.0f64; arena.len()];
    for (i, &aid) in node_of.iter().enumerate() {
        let r = targets[i];
        num[aid as usize] += r;
        den[aid as usize] += r.abs() * (1.0 - r.abs());
    }
    let factor = (k_classes as f64 - 1.0) / k_classes as f64;
    let mut leaf_value = vec![0.0f64; arena.len()];
    for (aid, node) in arena.iter_mut().enumerate() {
        if let RegressionNode::Leaf { value } = node {
            *value = factor * num[aid] / den[aid].max(NEWTON_DENOM_GUARD);
            leaf_value[aid] = *value;
        }
    }
    let fitted: Vec<f64> = node_of.iter().map(|&aid| leaf_value[aid as usize]).collect();
    (RegressionTree { nodes: arena }, fitted)
}

fn log_priors(y: &[ClassLabel], n_classes: usize) -> Vec<f64> {
    let n = y.len() as f64;
    let mut counts = vec![0usize; n_classes];
    for &label in y {
        counts[label] += 1;
    }
    counts
        .into_iter()
        .map(|c| ((c as f64 / n).max(1e-12)).ln())
        .collect()
}

/// Fits a gradient boosting classifier. `seed` is accepted for interface
/// uniformity but unused: with no subsampling the fit is deterministic.
pub fn train_gradient_boosting(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    params: GradientBoostingParams,
    _seed: RngSeed,
) -> Result<GradientBoostingModel> {
    let (n, d) = x.dim();
    if n == 0 || n != y.len() {
        return Err(Error::shape(
            format!("{n} rows"),
            format!("{} labels", y.len()),
        ));
    }
    let first = y[0];
    if y.iter().all(|&l| l == first) {
        return Err(Error::validation(
            "training labels contain fewer than 2 distinct classes",
        ));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::validation(format!(
            "label {bad} outside [0, {n_classes})"
        )));
    }
    if params.n_estimators == 0 {
        return Err(Error::validation("n_estimators must be >= 1"));
    }
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(Error::validation("learning_rate must be in (0, 1]"));
    }

    let columns = ColumnMatrix::from_rows(x);
    let presorted = presort_features(&columns);
    let initial_scores = log_priors(y, n_classes);

    let mut scores = Array2::zeros((n, n_classes));
    for mut row in scores.outer_iter_mut() {
        for (s, &init) in row.iter_mut().zip(&initial_scores) {
            *s = init;
        }
    }

    let mut stages = Vec::with_capacity(params.n_estimators);
    let mut proba = Array2::zeros((n, n_classes));
    for _stage in 0..params.n_estimators {
        proba.assign(&scores);
        for mut row in proba.outer_iter_mut() {
            softmax_in_place(row.as_slice_mut().expect("row-major layout"));
        }
        let stage_trees: Vec<(RegressionTree, Vec<f64>)> = (0..n_classes)
            .into_par_iter()
            .map(|c| {
                let targets: Vec<f64> = (0..n)
                    .map(|i| {
                        let indicator = if y[i] == c { 1.0 } else { 0.0 };
                        indicator - proba[[i, c]]
                    })
                    .collect();
                fit_regression_tree(&columns, &presorted, &targets, params.max_depth, n_classes)
            })
            .collect();
        let mut trees = Vec::with_capacity(n_classes);
        for (c, (tree, fitted)) in stage_trees.into_iter().enumerate() {
            for (i, &value) in fitted.iter().enumerate() {
                scores[[i, c]] += params.learning_rate * value;
            }
            trees.push(tree);
        }
        stages.push(trees);
    }

    Ok(GradientBoostingModel {
        stages,
        learning_rate: params.learning_rate,
        initial_scores,
        max_depth: params.max_depth,
        n_features: d,
    })
}

impl GradientBoostingModel {
    /// Accumulated raw scores (log-odds scale), shape `(n, n_classes)`.
    pub fn raw_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        check_feature_width(self.n_features, x)?;
        let n_classes = self.initial_scores.len();
        let mut scores = Array2::zeros((x.nrows(), n_classes));
        for (row, mut out) in x.outer_iter().zip(scores.outer_iter_mut()) {
            let row = row.as_slice().expect("row-major layout");
            for (c, slot) in out.iter_mut().enumerate() {
                let mut s = self.initial_scores[c];
                for stage in &self.stages {
                    s += self.learning_rate * stage[c].predict_row(row);
                }
                *slot = s;
            }
        }
        Ok(scores)
    }
}

impl TrainedClassifier for GradientBoostingModel {
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut scores = self.raw_scores(x)?;
        for mut row in scores.outer_iter_mut() {
            softmax_in_place(row.as_slice_mut().expect("row-major layout"));
        }
        Ok(scores)
    }

    fn n_classes(&self) -> usize {
        self.initial_scores.len()
    }

    fn n_features_expected(&self) -> usize {
        self.n_features
    }
}

/// Multinomial deviance (mean negative log-likelihood) of `(x, y)` after
/// each stage. Entry `0` is the prior-only model, entry `m` the model
/// truncated to `m` stages; length is `n_estimators + 1`.
pub fn staged_train_loss(
    model: &GradientBoostingModel,
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
) -> Result<Vec<f64>> {
    check_feature_width(model.n_features, x)?;
    if x.nrows() != y.len() {
        return Err(Error::shape(
            format!("{} rows", x.nrows()),
            format!("{} labels", y.len()),
        ));
    }
    let n = x.nrows();
    let n_classes = model.initial_scores.len();
    let mut scores = Array2::zeros((n, n_classes));
    for mut row in scores.outer_iter_mut() {
        for (s, &init) in row.iter_mut().zip(&model.initial_scores) {
            *s = init;
        }
    }
    let deviance = |scores: &Array2<f64>| -> f64 {
        let mut total = 0.0;
        for (row, &label) in scores.outer_iter().zip(y) {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + row.iter().map(|&s| (s - max).exp()).sum::<f64>().ln();
            total += lse - row[label];
        }
        total / n as f64
    };
    let mut losses = Vec::with_capacity(model.stages.len() + 1);
    losses.push(deviance(&scores));
    for stage in &model.stages {
        for (row, mut out) in x.outer_iter().zip(scores.outer_iter_mut()) {
            let row = row.as_slice().expect("row-major layout");
            for (c, slot) in out.iter_mut().enumerate() {
                *slot += model.learning_rate * stage[c].predict_row(row);
            }
        }
        losses.push(deviance(&scores));
    }
    Ok(losses)
}
