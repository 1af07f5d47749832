//! Flat linear learners: one-vs-rest logistic regression with an L1
//! penalty, and a one-vs-rest linear SVM trained by epoch-based
//! subgradient descent on the hinge loss.
//!
//! Both expose raw per-class decision scores `w . x + b`; class
//! probabilities are the softmax of the score row, which keeps the two
//! models comparable as stacking inputs.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::classifier::{check_feature_width, ClassLabel, TrainedClassifier};
use crate::error::{Error, Result};
use crate::math::{augmented_spectral_norm, dot, softmax_in_place};
use crate::random::{RngSeed, RngStream};

/// Logistic sigmoid `1 / (1 + e^-x)`, stable for |x| up to 700.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearKind {
    Logistic { l1_lambda: f64 },
    Svm { c: f64 },
}

/// One weight row and bias per class.
#[derive(Debug, Clone)]
pub struct LinearOvRModel {
    pub weights: Array2<f64>,
    pub biases: Vec<f64>,
    pub kind: LinearKind,
}

impl LinearOvRModel {
    pub fn n_classes(&self) -> usize {
        self.weights.nrows()
    }
}

/// Raw per-class scores `x W^T + b`, shape `(n, n_classes)`.
pub fn decision_scores(m: &LinearOvRModel, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    check_feature_width(m.weights.ncols(), x)?;
    let mut scores = x.dot(&m.weights.t());
    for mut row in scores.outer_iter_mut() {
        for (s, &b) in row.iter_mut().zip(&m.biases) {
            *s += b;
        }
    }
    Ok(scores)
}

impl TrainedClassifier for LinearOvRModel {
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut scores = decision_scores(self, x)?;
        for mut row in scores.outer_iter_mut() {
            softmax_in_place(row.as_slice_mut().expect("row-major layout"));
        }
        Ok(scores)
    }

    fn n_classes(&self) -> usize {
        self.weights.nrows()
    }

    fn n_features_expected(&self) -> usize {
        self.weights.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    /// L1 strength; `None` means `1 / n_samples`.
    pub l1_lambda: Option<f64>,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l1_lambda: None,
            max_iters: 500,
            tol: 1e-5,
        }
    }
}

fn check_two_classes(y: &[ClassLabel], n_classes: usize) -> Result<()> {
    if n_classes < 2 {
        return Err(Error::validation("need at least 2 classes"));
    }
    let first = y.first().copied();
    if y.is_empty() || y.iter().all(|&l| Some(l) == first) {
        return Err(Error::validation(
            "training labels contain fewer than 2 distinct classes",
        ));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::validation(format!(
            "label {bad} outside [0, {n_classes})"
        )));
    }
    Ok(())
}

/// Mean logistic loss and its gradient for binary targets in {0, 1}.
/// Returned as `(loss, grad_w, grad_b)`; the loss excludes the L1 term.
pub fn logistic_loss_and_grad(
    x: ArrayView2<'_, f64>,
    targets: &[f64],
    w: ArrayView1<'_, f64>,
    b: f64,
) -> (f64, Array1<f64>, f64) {
    let (n, d) = x.dim();
    let w_slice = w.as_slice().expect("contiguous");
    let mut grad_w = Array1::zeros(d);
    let grad_slice = grad_w.as_slice_mut().expect("contiguous");
    let mut grad_b = 0.0;
    let mut loss = 0.0;
    for (row, &t) in x.outer_iter().zip(targets) {
        let row = row.as_slice().expect("row-major layout");
        let z = dot(row, w_slice) + b;
        // log(1 + e^z) - t*z, computed without overflow
        loss += z.max(0.0) - t * z + (-z.abs()).exp().ln_1p();
        let err = sigmoid(z) - t;
        grad_b += err;
        for (g, &xj) in grad_slice.iter_mut().zip(row) {
            *g += err * xj;
        }
    }
    let inv_n = 1.0 / n as f64;
    loss *= inv_n;
    grad_b *= inv_n;
    grad_w *= inv_n;
    (loss, grad_w, grad_b)
}

#[inline]
fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Fits one-vs-rest L1-penalized logistic regression by accelerated
/// proximal gradient descent (soft-thresholding prox, fixed step `1/L`
/// from a spectral-norm bound, gradient-scheme restart). The bias is
/// unpenalized. Deterministic; per-class problems are fit in parallel.
pub fn train_logreg_ovr(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    params: LogisticParams,
) -> Result<LinearOvRModel> {
    let (n, d) = x.dim();
    if n == 0 || n != y.len() {
        return Err(Error::shape(
            format!("{n} rows"),
            format!("{} labels", y.len()),
        ));
    }
    check_two_classes(y, n_classes)?;
    let lambda = params.l1_lambda.unwrap_or(1.0 / n as f64);
    if lambda < 0.0 {
        return Err(Error::validation("l1_lambda must be >= 0"));
    }

    let sigma = augmented_spectral_norm(x, 40);
    let lipschitz = (sigma * sigma / (4.0 * n as f64)).max(1e-12);
    let step = 1.0 / lipschitz;

    let fits: Vec<(Array1<f64>, f64)> = (0..n_classes)
        .into_par_iter()
        .map(|class| {
            let targets: Vec<f64> = y.iter().map(|&l| if l == class { 1.0 } else { 0.0 }).collect();
            let mut w = Array1::<f64>::zeros(d);
            let mut zpt = w.clone(); // extrapolated point
            let mut b = 0.0;
            let mut b_z = 0.0;
            let mut theta: f64 = 1.0;
            for _ in 0..params.max_iters {
                let (_, grad_w, grad_b) = logistic_loss_and_grad(x, &targets, zpt.view(), b_z);
                let mut w_next = Array1::zeros(d);
                for ((next, &zv), &g) in w_next.iter_mut().zip(zpt.iter()).zip(grad_w.iter()) {
                    *next = soft_threshold(zv - step * g, step * lambda);
                }
                let b_next = b_z - step * grad_b;

                // stationarity of the composite gradient mapping at zpt
                let mut residual = (b_next - b_z).abs();
                for (nv, zv) in w_next.iter().zip(zpt.iter()) {
                    residual = residual.max((nv - zv).abs());
                }
                residual /= step;

                // restart momentum when it points uphill
                let mut uphill = (b_z - b_next) * (b_next - b);
                for ((zv, nv), wv) in zpt.iter().zip(w_next.iter()).zip(w.iter()) {
                    uphill += (zv - nv) * (nv - wv);
                }
                if uphill > 0.0 {
                    theta = 1.0;
                }

                let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
                let momentum = (theta - 1.0) / theta_next;
                for ((z, &nv), &wv) in zpt.iter_mut().zip(w_next.iter()).zip(w.iter()) {
                    *z = nv + momentum * (nv - wv);
                }
                b_z = b_next + momentum * (b_next - b);
                theta = theta_next;
                w = w_next;
                b = b_next;
                if residual <= params.tol {
                    break;
                }
            }
            (w, b)
        })
        .collect();

    let mut weights = Array2::zeros((n_classes, d));
    let mut biases = vec![0.0; n_classes];
    for (c, (w, b)) in fits.into_iter().enumerate() {
        weights.row_mut(c).assign(&w);
        biases[c] = b;
    }
    Ok(LinearOvRModel {
        weights,
        biases,
        kind: LinearKind::Logistic { l1_lambda: lambda },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    /// Hinge penalty weight in `0.5 ||w||^2 + C * sum hinge`.
    pub c: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { c: 2.0, epochs: 60 }
    }
}

/// Fits a one-vs-rest linear SVM per class by Pegasos-style subgradient
/// descent: step `eta_t = 1 / (lambda_eff * t)` with
/// `lambda_eff = 1 / (C * n)`, one pass per epoch over a seeded shuffle.
/// The bias follows the hinge subgradient and is not shrunk.
pub fn train_linear_svm_ovr(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    params: SvmParams,
    seed: RngSeed,
) -> Result<LinearOvRModel> {
    let (n, d) = x.dim();
    if n == 0 || n != y.len() {
        return Err(Error::shape(
            format!("{n} rows"),
            format!("{} labels", y.len()),
        ));
    }
    check_two_classes(y, n_classes)?;
    if !(params.c > 0.0) {
        return Err(Error::validation("C must be > 0"));
    }
    if params.epochs == 0 {
        return Err(Error::validation("epochs must be >= 1"));
    }

    let lambda = 1.0 / (params.c * n as f64);
    let fits: Vec<(Vec<f64>, f64)> = (0..n_classes)
        .into_par_iter()
        .map(|class| {
            let signs: Vec<f64> = y.iter().map(|&l| if l == class { 1.0 } else { -1.0 }).collect();
            let mut stream = RngStream::new(seed, "linear_svm", class as u64);
            let mut order: Vec<usize> = (0..n).collect();
            let mut w = vec![0.0f64; d];
            let mut b = 0.0f64;
            let mut t = 0u64;
            for _ in 0..params.epochs {
                stream.shuffle(&mut order);
                for &i in &order {
                    t += 1;
                    let eta = 1.0 / (lambda * t as f64);
                    let row = x.row(i);
                    let row = row.as_slice().expect("row-major layout");
                    let s = signs[i];
                    let margin = s * (dot(row, &w) + b);
                    let shrink = 1.0 - eta * lambda; // = 1 - 1/t
                    if margin < 1.0 {
                        for (wj, &xj) in w.iter_mut().zip(row) {
                            *wj = shrink * *wj + eta * s * xj;
                        }
                        // unshrunk bias on its own 1/t schedule; the w-side
                        // 1/(lambda t) step would let early noise persist
                        b += s / t as f64;
                    } else {
                        for wj in w.iter_mut() {
                            *wj *= shrink;
                        }
                    }
                }
            }
            (w, b)
        })
        .collect();

    let mut weights = Array2::zeros((n_classes, d));
    let mut biases = vec![0.0; n_classes];
    for (c, (w, b)) in fits.into_iter().enumerate() {
        weights.row_mut(c).assign(&Array1::from(w));
        biases[c] = b;
    }
    Ok(LinearOvRModel {
        weights,
        biases,
        kind: LinearKind::Svm { c: params.c },
    })
}

/// Objective `0.5 ||w||^2 + C * sum hinge(1 - s*(w.x+b))` for one class.
pub fn svm_objective(
    x: ArrayView2<'_, f64>,
    signs: &[f64],
    w: &[f64],
    b: f64,
    c: f64,
) -> f64 {
    let norm_sq: f64 = w.iter().map(|v| v * v).sum();
    let hinge: f64 = x
        .outer_iter()
        .zip(signs)
        .map(|(row, &s)| {
            let m = s * (dot(row.as_slice().expect("row-major"), w) + b);
            (1.0 - m).max(0.0)
        })
        .sum();
    0.5 * norm_sq + c * hinge
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::predict_labels;
    use crate::math::accuracy;
    use approx::assert_abs_diff_eq;

    fn two_blob_data(n_per: usize, gap: f64, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut r = RngStream::new(RngSeed(seed), "blobs", 0);
        let n = 2 * n_per;
        let mut x = Array2::zeros((n, 3));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let class = i % 2;
            let center = if class == 0 { -gap } else { gap };
            for j in 0..3 {
                x[[i, j]] = center + r.uniform(-1.0, 1.0) * if j == 2 { 0.1 } else { 1.0 };
            }
            y.push(class);
        }
        (x, y)
    }

    #[test]
    fn sigmoid_known_values() {
        assert_abs_diff_eq!(sigmoid(0.0), 0.5, epsilon = 1e-15);
        // direct evaluation of 1/(1+e^-2)
        assert_abs_diff_eq!(sigmoid(2.0), 0.8807970779778823, epsilon = 1e-12);
        for x in [0.1, 3.0, 30.0] {
            assert_abs_diff_eq!(sigmoid(x) + sigmoid(-x), 1.0, epsilon = 1e-12);
        }
        assert!(sigmoid(700.0) > 0.0 && sigmoid(700.0).is_finite());
        assert!(sigmoid(-700.0) >= 0.0 && sigmoid(-700.0).is_finite());
    }

    #[test]
    fn logistic_gradient_matches_central_differences() {
        let mut r = RngStream::new(RngSeed(77), "gradcheck", 0);
        for case in 0..5 {
            let n = 12;
            let d = 5;
            let x = Array2::from_shape_fn((n, d), |_| r.uniform(-2.0, 2.0));
            let targets: Vec<f64> = (0..n).map(|i| ((i + case) % 2) as f64).collect();
            let w = Array1::from_shape_fn(d, |_| r.uniform(-1.0, 1.0));
            let b = r.uniform(-1.0, 1.0);
            let (_, grad_w, grad_b) = logistic_loss_and_grad(x.view(), &targets, w.view(), b);
            let h = 1e-5;
            let mut fd = vec![0.0; d + 1];
            for j in 0..d {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += h;
                wm[j] -= h;
                let (lp, _, _) = logistic_loss_and_grad(x.view(), &targets, wp.view(), b);
                let (lm, _, _) = logistic_loss_and_grad(x.view(), &targets, wm.view(), b);
                fd[j] = (lp - lm) / (2.0 * h);
            }
            let (lp, _, _) = logistic_loss_and_grad(x.view(), &targets, w.view(), b + h);
            let (lm, _, _) = logistic_loss_and_grad(x.view(), &targets, w.view(), b - h);
            fd[d] = (lp - lm) / (2.0 * h);

            let analytic: Vec<f64> = grad_w.iter().copied().chain([grad_b]).collect();
            let norm: f64 = fd.iter().map(|v| v * v).sum::<f64>().sqrt();
            let diff: f64 = fd
                .iter()
                .zip(&analytic)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(diff / norm.max(1e-12) <= 1e-6, "case {case}: {}", diff / norm);
        }
    }

    #[test]
    fn separable_toy_reaches_full_training_accuracy() {
        let (x, y) = two_blob_data(40, 2.5, 5);
        let params = LogisticParams {
            l1_lambda: Some(1e-6),
            ..LogisticParams::default()
        };
        let model = train_logreg_ovr(x.view(), &y, 2, params).unwrap();
        let pred = predict_labels(&model, x.view()).unwrap();
        assert_abs_diff_eq!(accuracy(&y, &pred), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn huge_lambda_zeroes_weights_and_predicts_prior() {
        // 3:1 class imbalance so the prior argmax is class 0
        let mut x = Array2::zeros((40, 4));
        let mut r = RngStream::new(RngSeed(8), "imb", 0);
        let y: Vec<usize> = (0..40).map(|i| usize::from(i % 4 == 0)).collect();
        for v in x.iter_mut() {
            *v = r.uniform(-1.0, 1.0);
        }
        let params = LogisticParams {
            l1_lambda: Some(1e6),
            ..LogisticParams::default()
        };
        let model = train_logreg_ovr(x.view(), &y, 2, params).unwrap();
        assert!(model.weights.iter().all(|&w| w == 0.0));
        let pred = predict_labels(&model, x.view()).unwrap();
        assert!(pred.iter().all(|&p| p == 0));
    }

    #[test]
    fn l1_zero_count_grows_with_lambda() {
        let (x, y) = two_blob_data(60, 1.0, 13);
        let mut zero_counts = Vec::new();
        for lambda in [1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
            let params = LogisticParams {
                l1_lambda: Some(lambda),
                ..LogisticParams::default()
            };
            let model = train_logreg_ovr(x.view(), &y, 2, params).unwrap();
            zero_counts.push(model.weights.iter().filter(|&&w| w == 0.0).count());
        }
        for w in zero_counts.windows(2) {
            assert!(w[1] >= w[0], "zero counts not monotone: {zero_counts:?}");
        }
    }

    #[test]
    fn single_class_labels_rejected() {
        let x = Array2::zeros((10, 2));
        let y = vec![1usize; 10];
        assert!(train_logreg_ovr(x.view(), &y, 2, LogisticParams::default()).is_err());
        assert!(
            train_linear_svm_ovr(x.view(), &y, 2, SvmParams::default(), RngSeed(0)).is_err()
        );
    }

    #[test]
    fn svm_separable_toy_reaches_full_training_accuracy() {
        let (x, y) = two_blob_data(40, 3.0, 6);
        let params = SvmParams { c: 2.0, epochs: 80 };
        let model = train_linear_svm_ovr(x.view(), &y, 2, params, RngSeed(4)).unwrap();
        let pred = predict_labels(&model, x.view()).unwrap();
        assert_abs_diff_eq!(accuracy(&y, &pred), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn svm_hinge_violations_non_increasing_in_c() {
        // noisy 50-point toy; brute-force count of margin violations per C
        let (x, y) = two_blob_data(25, 0.8, 42);
        let mut violation_counts = Vec::new();
        for c in [0.5, 1.0, 2.0] {
            let model =
                train_linear_svm_ovr(x.view(), &y, 2, SvmParams { c, epochs: 150 }, RngSeed(11))
                    .unwrap();
            let signs: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
            let w: Vec<f64> = model.weights.row(1).to_vec();
            let b = model.biases[1];
            let violations = x
                .outer_iter()
                .zip(&signs)
                .filter(|(row, &s)| {
                    s * (dot(row.as_slice().unwrap(), &w) + b) < 1.0
                })
                .count();
            violation_counts.push(violations);
        }
        for w in violation_counts.windows(2) {
            assert!(w[1] <= w[0], "violations not monotone: {violation_counts:?}");
        }
    }

    #[test]
    fn svm_objective_settles_under_diminishing_steps() {
        // Epoch-end objective under the 1/(lambda t) schedule: the level
        // drops from the early epochs and the oscillation amplitude decays
        // with the step size. (Strict per-epoch monotonicity does not hold
        // for stochastic subgradient descent.)
        let (x, y) = two_blob_data(25, 2.0, 3);
        let signs: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let c = 1.0;
        let mut objectives = Vec::new();
        for epochs in 1..=60 {
            let model =
                train_linear_svm_ovr(x.view(), &y, 2, SvmParams { c, epochs }, RngSeed(2)).unwrap();
            let w: Vec<f64> = model.weights.row(1).to_vec();
            objectives.push(svm_objective(x.view(), &signs, &w, model.biases[1], c));
        }
        let window = |range: std::ops::Range<usize>| {
            let slice = &objectives[range];
            let lo = slice.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi, hi - lo)
        };
        let (early_min, _, early_amp) = window(0..10);
        let (_, late_max, late_amp) = window(50..60);
        assert!(
            late_max <= early_min + 1e-6 || late_max < objectives[0],
            "objective did not decrease: first {} late max {late_max}",
            objectives[0]
        );
        assert!(
            late_amp <= 0.5 * early_amp,
            "oscillation did not decay: early {early_amp} late {late_amp}"
        );
    }

    #[test]
    fn zero_weight_scores_give_uniform_probabilities() {
        let model = LinearOvRModel {
            weights: Array2::zeros((4, 3)),
            biases: vec![0.0; 4],
            kind: LinearKind::Svm { c: 1.0 },
        };
        let x = Array2::zeros((2, 3));
        let proba = model.predict_proba(x.view()).unwrap();
        for &p in proba.iter() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn raising_a_score_raises_its_probability() {
        let mut model = LinearOvRModel {
            weights: Array2::zeros((3, 2)),
            biases: vec![0.0, 0.0, 0.0],
            kind: LinearKind::Svm { c: 1.0 },
        };
        let x = Array2::zeros((1, 2));
        let before = model.predict_proba(x.view()).unwrap()[[0, 1]];
        model.biases[1] = 0.3;
        let after = model.predict_proba(x.view()).unwrap()[[0, 1]];
        assert!(after > before);
    }

    #[test]
    fn probability_rows_sum_to_one() {
        let (x, y) = two_blob_data(30, 1.5, 19);
        let model = train_logreg_ovr(x.view(), &y, 2, LogisticParams::default()).unwrap();
        let proba = model.predict_proba(x.view()).unwrap();
        for row in proba.outer_iter() {
            assert_abs_diff_eq!(row.sum(), 1.0, epsilon = 1e-9);
            assert!(row.iter().all(|&p| p >= 0.0));
        }
    }
}
