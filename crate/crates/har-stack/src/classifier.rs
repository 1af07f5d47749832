//! Shared classifier contract: anything fitted exposes per-class
//! probability scores over a feature matrix, and labels fall out by argmax.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::random::RngSeed;

/// Zero-based contiguous class id.
///
/// For the HAR dataset the order is fixed: walking=0, walking-upstairs=1,
/// walking-downstairs=2, sitting=3, standing=4, laying=5.
pub type ClassLabel = usize;

/// A validated probability vector over classes: non-negative entries that
/// sum to one within `1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbabilities(Vec<f64>);

impl ClassProbabilities {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::validation("empty probability vector"));
        }
        if p.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::validation("negative or NaN probability"));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(ClassProbabilities(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Index of the largest entry; ties go to the lowest class id.
    pub fn argmax(&self) -> ClassLabel {
        argmax_row(&self.0)
    }
}

#[inline]
pub(crate) fn argmax_row(row: &[f64]) -> usize {
    let mut best = 0;
    let mut best_v = row[0];
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

/// A fitted model. Implementations are immutable after fitting and
/// deterministic: identical input rows produce identical probability rows.
pub trait TrainedClassifier: Send + Sync {
    /// Per-row class probabilities; shape `(n_rows, n_classes)`, each row
    /// non-negative and summing to one within 1e-9.
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>>;

    fn n_classes(&self) -> usize;

    /// Feature width the model was fitted on.
    fn n_features_expected(&self) -> usize;
}

/// Argmax labels for a batch, ties broken by the lowest class id.
pub fn predict_labels(model: &dyn TrainedClassifier, x: ArrayView2<'_, f64>) -> Result<Vec<ClassLabel>> {
    let proba = model.predict_proba(x)?;
    Ok(proba
        .outer_iter()
        .map(|row| argmax_row(row.as_slice().expect("row-major layout")))
        .collect())
}

pub(crate) fn check_feature_width(expected: usize, x: ArrayView2<'_, f64>) -> Result<()> {
    if x.ncols() != expected {
        return Err(Error::shape(
            format!("{expected} feature columns"),
            format!("{} columns", x.ncols()),
        ));
    }
    Ok(())
}

/// Anything that can fit a fresh [`TrainedClassifier`] from data. Cross
/// validation and the stacking layer train through this interface.
pub trait Learner: Send + Sync {
    fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        y: &[ClassLabel],
        n_classes: usize,
        seed: RngSeed,
    ) -> Result<Box<dyn TrainedClassifier>>;

    /// Short label for reports and timings.
    fn label(&self) -> String;
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    struct FixedProba(Array2<f64>);

    impl TrainedClassifier for FixedProba {
        fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
            check_feature_width(self.n_features_expected(), x)?;
            Ok(self.0.clone())
        }
        fn n_classes(&self) -> usize {
            self.0.ncols()
        }
        fn n_features_expected(&self) -> usize {
            2
        }
    }

    #[test]
    fn argmax_picks_largest() {
        let m = FixedProba(arr2(&[[0.1, 0.9]]));
        let labels = predict_labels(&m, arr2(&[[0.0, 0.0]]).view()).unwrap();
        assert_eq!(labels, vec![1]);
    }

    #[test]
    fn argmax_tie_breaks_to_lowest_id() {
        let m = FixedProba(arr2(&[[0.5, 0.5]]));
        let labels = predict_labels(&m, arr2(&[[0.0, 0.0]]).view()).unwrap();
        assert_eq!(labels, vec![0]);
    }

    #[test]
    fn batch_preserves_order() {
        let m = FixedProba(arr2(&[[0.9, 0.1], [0.2, 0.8], [0.6, 0.4]]));
        let x = Array2::zeros((3, 2));
        let labels = predict_labels(&m, x.view()).unwrap();
        assert_eq!(labels, vec![0, 1, 0]);
    }

    #[test]
    fn feature_width_mismatch_is_shape_error() {
        let m = FixedProba(arr2(&[[1.0, 0.0]]));
        let err = predict_labels(&m, arr2(&[[0.0, 0.0, 0.0]]).view()).unwrap_err();
        assert!(matches!(err, Error::Shape { .. }));
    }

    #[test]
    fn class_probabilities_validate() {
        assert!(ClassProbabilities::new(vec![0.5, 0.5]).is_ok());
        assert!(ClassProbabilities::new(vec![0.5, 0.6]).is_err());
        assert!(ClassProbabilities::new(vec![-0.1, 1.1]).is_err());
        assert!(ClassProbabilities::new(vec![]).is_err());
        assert_eq!(ClassProbabilities::new(vec![0.5, 0.5]).unwrap().argmax(), 0);
    }
}
