//! Classification metrics: confusion matrix, per-class precision/recall/
//! F1 report, and one-vs-rest ROC curves with trapezoid AUC.

use ndarray::ArrayView2;
use serde::Serialize;

use crate::classifier::ClassLabel;
use crate::error::{Error, Result};

/// Row = true class, column = predicted class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    n_classes: usize,
}

impl ConfusionMatrix {
    pub fn from_labels(
        y_true: &[ClassLabel],
        y_pred: &[ClassLabel],
        n_classes: usize,
    ) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::validation(format!(
                "{} true labels vs {} predictions",
                y_true.len(),
                y_pred.len()
            )));
        }
        let mut counts = vec![0u64; n_classes * n_classes];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            if t >= n_classes || p >= n_classes {
                return Err(Error::validation(format!(
                    "label ({t}, {p}) outside [0, {n_classes})"
                )));
            }
            counts[t * n_classes + p] += 1;
        }
        Ok(ConfusionMatrix { counts, n_classes })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn get(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class * self.n_classes + predicted]
    }

    /// Number of true samples of `class` (row sum).
    pub fn support(&self, class: usize) -> u64 {
        self.row(class).iter().sum()
    }

    pub fn row(&self, true_class: usize) -> &[u64] {
        &self.counts[true_class * self.n_classes..(true_class + 1) * self.n_classes]
    }

    fn col_sum(&self, predicted: usize) -> u64 {
        (0..self.n_classes).map(|i| self.get(i, predicted)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes).map(|i| self.get(i, i)).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.n_classes).map(|i| self.row(i).to_vec()).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
}

/// Precision, recall and F1 per class plus macro and support-weighted
/// averages. Empty columns/rows score zero rather than NaN.
pub fn classification_report(cm: &ConfusionMatrix) -> Result<ClassificationReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::validation("empty confusion matrix"));
    }
    let k = cm.n_classes();
    let mut per_class = Vec::with_capacity(k);
    for c in 0..k {
        let tp = cm.get(c, c) as f64;
        let col = cm.col_sum(c) as f64;
        let row = cm.support(c) as f64;
        let precision = if col > 0.0 { tp / col } else { 0.0 };
        let recall = if row > 0.0 { tp / row } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.push(ClassMetrics {
            precision,
            recall,
            f1,
            support: cm.support(c),
        });
    }
    let kf = k as f64;
    let totalf = total as f64;
    let macro_precision = per_class.iter().map(|m| m.precision).sum::<f64>() / kf;
    let macro_recall = per_class.iter().map(|m| m.recall).sum::<f64>() / kf;
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / kf;
    let weighted = |f: fn(&ClassMetrics) -> f64| {
        per_class
            .iter()
            .map(|m| f(m) * m.support as f64)
            .sum::<f64>()
            / totalf
    };
    Ok(ClassificationReport {
        accuracy: cm.trace() as f64 / totalf,
        macro_precision,
        macro_recall,
        macro_f1,
        weighted_precision: weighted(|m| m.precision),
        weighted_recall: weighted(|m| m.recall),
        weighted_f1: weighted(|m| m.f1),
        per_class,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRoc {
    /// `(fpr, tpr)` points, fpr non-decreasing, from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RocCurve {
    /// Per-class curves; `None` when the class has no positives or no
    /// negatives in `y_true` (AUC undefined).
    pub per_class: Vec<Option<ClassRoc>>,
    /// Unweighted mean over the defined per-class AUCs.
    pub macro_auc: Option<f64>,
}

/// One-vs-rest ROC sweep per class. Thresholds are the distinct scores
/// (descending) with ties grouped, so the trapezoid AUC is invariant
/// under strictly monotone score transforms.
pub fn roc_ovr(y_true: &[ClassLabel], scores: ArrayView2<'_, f64>) -> Result<RocCurve> {
    let n = y_true.len();
    if scores.nrows() != n {
        return Err(Error::shape(
            format!("{n} score rows"),
            format!("{}", scores.nrows()),
        ));
    }
    let k = scores.ncols();
    if let Some(&bad) = y_true.iter().find(|&&l| l >= k) {
        return Err(Error::validation(format!("label {bad} outside [0, {k})")));
    }
    let mut per_class = Vec::with_capacity(k);
    for c in 0..k {
        let pos = y_true.iter().filter(|&&l| l == c).count();
        let neg = n - pos;
        if pos == 0 || neg == 0 {
            per_class.push(None);
            continue;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| scores[[b, c]].total_cmp(&scores[[a, c]]));
        let mut points = vec![(0.0, 0.0)];
        let mut tp = 0u64;
        let mut fp = 0u64;
        let mut i = 0;
        while i < n {
            let cutoff = scores[[order[i], c]];
            while i < n && scores[[order[i], c]] == cutoff {
                if y_true[order[i]] == c {
                    tp += 1;
                } else {
                    fp += 1;
                }
                i += 1;
            }
            points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        }
        let mut auc = 0.0;
        for w in points.windows(2) {
            auc += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * 0.5;
        }
        per_class.push(Some(ClassRoc { points, auc }));
    }
    let defined: Vec<f64> = per_class
        .iter()
        .filter_map(|c| c.as_ref().map(|r| r.auc))
        .collect();
    let macro_auc = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    Ok(RocCurve {
        per_class,
        macro_auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::accuracy;
    use crate::random::{RngSeed, RngStream};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    /// Pairwise-comparison (Mann-Whitney) AUC: ties credit one half.
    fn mann_whitney_auc(y: &[usize], scores: &[f64], class: usize) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            if yi != class {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == class {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn perfect_predictions_give_diagonal_matrix() {
        let y = vec![0, 1, 1, 2, 2, 2];
        let cm = ConfusionMatrix::from_labels(&y, &y, 3).unwrap();
        assert_eq!(cm.get(0, 0), 1);
        assert_eq!(cm.get(1, 1), 2);
        assert_eq!(cm.get(2, 2), 3);
        assert_eq!(cm.trace(), 6);
        assert_eq!(cm.total(), 6);
        let report = classification_report(&cm).unwrap();
        assert_abs_diff_eq!(report.accuracy, 1.0, epsilon = 1e-15);
        for m in &report.per_class {
            assert_abs_diff_eq!(m.f1, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(ConfusionMatrix::from_labels(&[0, 1], &[0], 2).is_err());
    }

    #[test]
    fn report_matches_hand_computed_six_class_matrix() {
        // six-class matrix with known row/column structure
        let rows: Vec<Vec<u64>> = vec![
            vec![489, 5, 2, 0, 0, 0],
            vec![39, 429, 3, 0, 0, 0],
            vec![6, 12, 402, 0, 0, 0],
            vec![0, 0, 0, 437, 54, 0],
            vec![0, 0, 0, 9, 523, 0],
            vec![0, 0, 0, 0, 0, 537],
        ];
        let mut y_true = Vec::new();
        let mut y_pred = Vec::new();
        for (t, row) in rows.iter().enumerate() {
            for (p, &count) in row.iter().enumerate() {
                for _ in 0..count {
                    y_true.push(t);
                    y_pred.push(p);
                }
            }
        }
        let cm = ConfusionMatrix::from_labels(&y_true, &y_pred, 6).unwrap();
        assert_eq!(cm.to_rows(), rows);
        let report = classification_report(&cm).unwrap();
        // walking precision = 489 / (489 + 39 + 6)
        assert_abs_diff_eq!(report.per_class[0].precision, 489.0 / 534.0, epsilon = 1e-12);
        assert!((report.per_class[0].precision - 0.92).abs() < 0.005);
        // laying is perfectly separated
        assert_abs_diff_eq!(report.per_class[5].precision, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(report.per_class[5].recall, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(report.per_class[5].f1, 1.0, epsilon = 1e-15);
        // metric identities
        assert_abs_diff_eq!(
            report.accuracy,
            accuracy(&y_true, &y_pred),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(report.weighted_recall, report.accuracy, epsilon = 1e-12);
    }

    #[test]
    fn all_zero_matrix_rejected() {
        let cm = ConfusionMatrix::from_labels(&[], &[], 3).unwrap();
        assert!(classification_report(&cm).is_err());
    }

    #[test]
    fn perfectly_separating_scores_have_unit_auc() {
        let y = vec![0, 0, 1, 1, 2, 2];
        let mut scores = Array2::zeros((6, 3));
        for (i, &label) in y.iter().enumerate() {
            scores[[i, label]] = 10.0 + i as f64;
        }
        let roc = roc_ovr(&y, scores.view()).unwrap();
        for curve in roc.per_class.iter() {
            let curve = curve.as_ref().unwrap();
            assert_abs_diff_eq!(curve.auc, 1.0, epsilon = 1e-12);
            assert_eq!(*curve.points.first().unwrap(), (0.0, 0.0));
            assert_eq!(*curve.points.last().unwrap(), (1.0, 1.0));
        }
        assert_abs_diff_eq!(roc.macro_auc.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_scores_give_half_auc_with_single_sweep_point() {
        let y = vec![0, 1, 0, 1, 1];
        let scores = Array2::from_elem((5, 2), 0.25);
        let roc = roc_ovr(&y, scores.view()).unwrap();
        let c0 = roc.per_class[0].as_ref().unwrap();
        assert_eq!(c0.points.len(), 2); // (0,0) then the single tie group at (1,1)
        assert_abs_diff_eq!(c0.auc, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn absent_class_excluded_from_macro() {
        let y = vec![0, 0, 1, 1];
        let mut scores = Array2::zeros((4, 3));
        scores[[2, 1]] = 1.0;
        scores[[3, 1]] = 1.0;
        let roc = roc_ovr(&y, scores.view()).unwrap();
        assert!(roc.per_class[2].is_none());
        assert!(roc.macro_auc.is_some());
    }

    #[test]
    fn trapezoid_auc_equals_mann_whitney_oracle() {
        let mut r = RngStream::new(RngSeed(55), "roc_oracle", 0);
        for case in 0..6u64 {
            let n = 120 + 10 * case as usize;
            let k = 3;
            let y: Vec<usize> = (0..n).map(|_| r.below(k)).collect();
            // quantized scores force plenty of ties
            let scores = Array2::from_shape_fn((n, k), |_| (r.next_f64() * 8.0).round() / 8.0);
            let roc = roc_ovr(&y, scores.view()).unwrap();
            for c in 0..k {
                let col: Vec<f64> = (0..n).map(|i| scores[[i, c]]).collect();
                let oracle = mann_whitney_auc(&y, &col, c);
                let got = roc.per_class[c].as_ref().unwrap().auc;
                assert_abs_diff_eq!(got, oracle, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn random_scores_hover_near_half_auc() {
        let mut r = RngStream::new(RngSeed(58), "roc_random", 0);
        let n = 2000;
        let y: Vec<usize> = (0..n).map(|_| r.below(2)).collect();
        let scores = Array2::from_shape_fn((n, 2), |_| r.next_f64());
        let roc = roc_ovr(&y, scores.view()).unwrap();
        for curve in roc.per_class.iter() {
            let auc = curve.as_ref().unwrap().auc;
            assert!((auc - 0.5).abs() <= 0.03, "auc {auc}");
        }
    }

    #[test]
    fn auc_invariant_under_monotone_transform() {
        let mut r = RngStream::new(RngSeed(57), "roc_mono", 0);
        let n = 150;
        let y: Vec<usize> = (0..n).map(|_| r.below(2)).collect();
        let scores = Array2::from_shape_fn((n, 2), |_| r.next_f64());
        let transformed = scores.mapv(|s| (3.0 * s).exp() / (1.0 + (3.0 * s).exp()));
        let a = roc_ovr(&y, scores.view()).unwrap();
        let b = roc_ovr(&y, transformed.view()).unwrap();
        for (ca, cb) in a.per_class.iter().zip(&b.per_class) {
            assert_abs_diff_eq!(
                ca.as_ref().unwrap().auc,
                cb.as_ref().unwrap().auc,
                epsilon = 1e-12
            );
        }
    }
}
