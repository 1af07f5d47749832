//! Small shared numeric helpers.

use ndarray::ArrayView2;

use crate::random::{RngSeed, RngStream};

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Numerically stable softmax over one row, in place.
pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Estimates the largest singular value of the augmented matrix `[X | 1]`
/// (data columns plus an all-ones bias column) by power iteration on
/// `A^T A`. Used for Lipschitz step sizing.
pub(crate) fn augmented_spectral_norm(x: ArrayView2<'_, f64>, iters: usize) -> f64 {
    let (n, d) = x.dim();
    let width = d + 1;
    let mut v = vec![0.0; width];
    let mut stream = RngStream::new(RngSeed(0x5eed), "power_iter", 0);
    for entry in v.iter_mut() {
        *entry = stream.uniform(-1.0, 1.0);
    }
    let mut av = vec![0.0; n];
    let mut sigma_sq = 0.0;
    for _ in 0..iters {
        // av = A v
        for (i, row) in x.outer_iter().enumerate() {
            let row = row.as_slice().expect("row-major layout");
            av[i] = dot(row, &v[..d]) + v[d];
        }
        // v = A^T av
        v.iter_mut().for_each(|e| *e = 0.0);
        for (i, row) in x.outer_iter().enumerate() {
            let row = row.as_slice().expect("row-major layout");
            let w = av[i];
            for (vj, &xj) in v[..d].iter_mut().zip(row) {
                *vj += w * xj;
            }
            v[d] += w;
        }
        let norm = dot(&v, &v).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        sigma_sq = norm;
        for entry in v.iter_mut() {
            *entry /= norm;
        }
    }
    sigma_sq.sqrt()
}

/// Fraction of positions where `pred == truth`.
pub fn accuracy(truth: &[usize], pred: &[usize]) -> f64 {
    assert_eq!(truth.len(), pred.len());
    if truth.is_empty() {
        return 0.0;
    }
    let hits = truth.iter().zip(pred).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Mean and population variance (divide by n) of a slice.
pub(crate) fn mean_and_population_variance(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::arr2;

    #[test]
    fn softmax_of_zeros_is_uniform() {
        let mut row = [0.0; 4];
        softmax_in_place(&mut row);
        for &p in &row {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn softmax_handles_large_scores() {
        let mut row = [800.0, 0.0, -800.0];
        softmax_in_place(&mut row);
        assert!(row.iter().all(|p| p.is_finite()));
        assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(row[0] > 0.999);
    }

    #[test]
    fn spectral_norm_matches_known_matrix() {
        // [X | 1] with X = diag-ish toy; compare against direct SVD of the
        // 2x2 case computed by hand: A = [[3, 1], [0, 1]] has squared
        // singular values eigvals of A^T A = [[9,3],[3,2]] -> 10.541..
        let x = arr2(&[[3.0], [0.0]]);
        let sigma = augmented_spectral_norm(x.view(), 200);
        let expected = ((11.0 + (49.0f64 + 36.0).sqrt()) / 2.0).sqrt();
        assert_abs_diff_eq!(sigma, expected, epsilon = 1e-6);
    }

    #[test]
    fn population_variance_definition() {
        let (m, v) = mean_and_population_variance(&[1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(m, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 1.25, epsilon = 1e-15);
    }
}
