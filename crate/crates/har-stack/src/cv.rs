//! Repeated stratified k-fold cross validation and fit/predict timing.

use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{predict_labels, ClassLabel, Learner};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math::{accuracy, mean_and_population_variance};
use crate::random::{RngSeed, RngStream};

/// Fold accuracies of a repeated k-fold run, ordered by `(repeat, fold)`.
#[derive(Debug, Clone, Serialize)]
pub struct CVReport {
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    /// Population variance (divide by n) of the fold scores.
    pub variance: f64,
    pub seed: RngSeed,
    pub k: usize,
    pub repeats: usize,
}

/// Stratified fold assignment for repeat `r`: per class, indices are
/// shuffled by the `(seed, "cv_partition", r)` stream and dealt
/// round-robin, so per-fold class counts differ by at most one.
pub fn stratified_fold_indices(
    y: &[ClassLabel],
    n_classes: usize,
    k: usize,
    seed: RngSeed,
    repeat: usize,
) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::validation(format!("k must be >= 2, got {k}")));
    }
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &label) in y.iter().enumerate() {
        if label >= n_classes {
            return Err(Error::validation(format!(
                "label {label} outside [0, {n_classes})"
            )));
        }
        per_class[label].push(i);
    }
    if let Some(c) = per_class.iter().position(|v| v.len() < k) {
        return Err(Error::validation(format!(
            "class {c} has {} samples, fewer than k = {k}",
            per_class[c].len()
        )));
    }
    let mut stream = RngStream::new(seed, "cv_partition", repeat as u64);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (c, indices) in per_class.iter_mut().enumerate() {
        stream.shuffle(indices);
        // rotate the starting fold per class so remainders spread out
        for (pos, &i) in indices.iter().enumerate() {
            folds[(pos + c) % k].push(i);
        }
    }
    for fold in folds.iter_mut() {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Repeated stratified k-fold cross validation. Every fold gets a fresh
/// fit on the remaining folds; fold fits run in parallel and scores come
/// back indexed by `(repeat, fold)` regardless of completion order.
pub fn repeated_kfold_cv(
    learner: &dyn Learner,
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    k: usize,
    repeats: usize,
    seed: RngSeed,
) -> Result<CVReport> {
    if repeats == 0 {
        return Err(Error::validation("repeats must be >= 1"));
    }
    if x.nrows() != y.len() {
        return Err(Error::shape(
            format!("{} rows", x.nrows()),
            format!("{} labels", y.len()),
        ));
    }
    // materialize all partitions up front (cheap, and validates k)
    let mut partitions = Vec::with_capacity(repeats);
    for r in 0..repeats {
        partitions.push(stratified_fold_indices(y, n_classes, k, seed, r)?);
    }

    let fold_scores: Vec<f64> = (0..repeats * k)
        .into_par_iter()
        .map(|flat| -> Result<f64> {
            let r = flat / k;
            let f = flat % k;
            let holdout = &partitions[r][f];
            let mut train_indices: Vec<usize> = Vec::with_capacity(y.len() - holdout.len());
            for (other, fold) in partitions[r].iter().enumerate() {
                if other != f {
                    train_indices.extend_from_slice(fold);
                }
            }
            train_indices.sort_unstable();

            let d = x.ncols();
            let mut train_x = Array2::zeros((train_indices.len(), d));
            let mut train_y = Vec::with_capacity(train_indices.len());
            for (row, &i) in train_indices.iter().enumerate() {
                train_x.row_mut(row).assign(&x.row(i));
                train_y.push(y[i]);
            }
            let mut test_x = Array2::zeros((holdout.len(), d));
            let mut test_y = Vec::with_capacity(holdout.len());
            for (row, &i) in holdout.iter().enumerate() {
                test_x.row_mut(row).assign(&x.row(i));
                test_y.push(y[i]);
            }

            let fit_seed = RngSeed(RngStream::new(seed, "cv_fit", flat as u64).next_u64());
            let model = learner.fit(train_x.view(), &train_y, n_classes, fit_seed)?;
            let pred = predict_labels(model.as_ref(), test_x.view())?;
            Ok(accuracy(&test_y, &pred))
        })
        .collect::<Result<Vec<f64>>>()?;

    let (mean, variance) = mean_and_population_variance(&fold_scores);
    Ok(CVReport {
        fold_scores,
        mean,
        variance,
        seed,
        k,
        repeats,
    })
}

/// Wall-clock timings of one fit and one batch prediction.
#[derive(Debug, Clone, Serialize)]
pub struct TimingReport {
    pub fit_seconds: f64,
    pub predict_seconds: f64,
    pub model_label: String,
}

/// Fits on `train`, predicts on `test`, returns timings plus accuracy.
pub fn timed_fit_predict(
    learner: &dyn Learner,
    train: &Dataset,
    test: &Dataset,
    seed: RngSeed,
) -> Result<(TimingReport, f64)> {
    let n_classes = train.n_classes();
    let start = Instant::now();
    let model = learner.fit(train.x.view(), &train.y, n_classes, seed)?;
    let fit_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let pred = predict_labels(model.as_ref(), test.x.view())?;
    let predict_seconds = start.elapsed().as_secs_f64();
    Ok((
        TimingReport {
            fit_seconds,
            predict_seconds,
            model_label: learner.label(),
        },
        accuracy(&test.y, &pred),
    ))
}
