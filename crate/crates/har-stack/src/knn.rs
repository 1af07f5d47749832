//! Brute-force k-nearest-neighbors over Euclidean distance.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::classifier::{check_feature_width, ClassLabel, TrainedClassifier};
use crate::error::{Error, Result};
use crate::math::dot;

/// Stores the training set; prediction scans it per query.
#[derive(Debug, Clone)]
pub struct KnnModel {
    x: Array2<f64>,
    y: Vec<ClassLabel>,
    n_classes: usize,
    pub k: usize,
}

pub fn train_knn(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    k: usize,
) -> Result<KnnModel> {
    if x.nrows() != y.len() {
        return Err(Error::shape(
            format!("{} rows", x.nrows()),
            format!("{} labels", y.len()),
        ));
    }
    if k == 0 || k > x.nrows() {
        return Err(Error::validation(format!(
            "k must be in [1, {}], got {k}",
            x.nrows()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::validation(format!(
            "label {bad} outside [0, {n_classes})"
        )));
    }
    Ok(KnnModel {
        x: x.to_owned(),
        y: y.to_vec(),
        n_classes,
        k,
    })
}

impl KnnModel {
    fn proba_one(&self, query: &[f64], scratch: &mut Vec<(f64, u32)>) -> Vec<f64> {
        scratch.clear();
        for (i, row) in self.x.outer_iter().enumerate() {
            let row = row.as_slice().expect("row-major layout");
            let d2 = dot(row, row) - 2.0 * dot(row, query) + dot(query, query);
            scratch.push((d2, i as u32));
        }
        // ties at the k-th distance go to the lower training index
        let k = self.k;
        scratch.select_nth_unstable_by(k - 1, |a, b| {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        });
        let mut counts = vec![0.0; self.n_classes];
        for &(_, idx) in scratch[..k].iter() {
            counts[self.y[idx as usize]] += 1.0;
        }
        for c in counts.iter_mut() {
            *c /= k as f64;
        }
        counts
    }
}

impl TrainedClassifier for KnnModel {
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        check_feature_width(self.x.ncols(), x)?;
        let n = x.nrows();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map_init(Vec::new, |scratch, i| {
                let row = x.row(i);
                self.proba_one(row.as_slice().expect("row-major layout"), scratch)
            })
            .collect();
        let mut out = Array2::zeros((n, self.n_classes));
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                out[[i, j]] = v;
            }
        }
        Ok(out)
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features_expected(&self) -> usize {
        self.x.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::arr2;

    #[test]
    fn self_query_at_k1_is_certain() {
        let x = arr2(&[[0.0, 0.0], [5.0, 5.0], [9.0, 0.0]]);
        let y = vec![2, 0, 1];
        let m = train_knn(x.view(), &y, 3, 1).unwrap();
        let p = m.predict_proba(x.view()).unwrap();
        assert_abs_diff_eq!(p[[0, 2]], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[[1, 0]], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[[2, 1]], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn equidistant_tie_splits_and_label_goes_low() {
        use crate::classifier::predict_labels;
        // classes 0 and 1 at distance 1 from the query, third point far
        let x = arr2(&[[1.0], [-1.0], [50.0]]);
        let y = vec![1, 0, 2];
        let m = train_knn(x.view(), &y, 3, 2).unwrap();
        let q = arr2(&[[0.0]]);
        let p = m.predict_proba(q.view()).unwrap();
        assert_abs_diff_eq!(p[[0, 0]], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[[0, 1]], 0.5, epsilon = 1e-15);
        assert_eq!(predict_labels(&m, q.view()).unwrap(), vec![0]);
    }

    #[test]
    fn k_equal_to_n_yields_class_priors() {
        let x = arr2(&[[0.0], [1.0], [2.0], [3.0], [4.0]]);
        let y = vec![0, 0, 0, 1, 1];
        let m = train_knn(x.view(), &y, 2, 5).unwrap();
        let p = m.predict_proba(arr2(&[[100.0]]).view()).unwrap();
        assert_abs_diff_eq!(p[[0, 0]], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(p[[0, 1]], 0.4, epsilon = 1e-15);
    }

    #[test]
    fn k_out_of_range_rejected() {
        let x = arr2(&[[0.0], [1.0]]);
        let y = vec![0, 1];
        assert!(train_knn(x.view(), &y, 2, 0).is_err());
        assert!(train_knn(x.view(), &y, 2, 3).is_err());
    }

    #[test]
    fn kth_distance_tie_prefers_lower_index() {
        // three training points at identical distance; k=2 must take the
        // two lowest indices
        let x = arr2(&[[1.0], [-1.0], [1.0]]);
        let y = vec![0, 1, 2];
        let m = train_knn(x.view(), &y, 3, 2).unwrap();
        let p = m.predict_proba(arr2(&[[0.0]]).view()).unwrap();
        assert_abs_diff_eq!(p[[0, 0]], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[[0, 1]], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[[0, 2]], 0.0, epsilon = 1e-15);
    }
}
