//! Principal component analysis over mean-centered data.
//!
//! The covariance matrix (denominator `n - 1`) is eigendecomposed with a
//! cyclic Jacobi sweep, which is accurate to machine precision for the
//! symmetric matrices that arise here. Component orientation follows a
//! fixed sign convention so fits are reproducible: the largest-magnitude
//! entry of every component is positive.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// A fitted PCA basis.
#[derive(Debug, Clone)]
pub struct PcaModel {
    /// Feature means of the training data, length `d`.
    pub mean: Array1<f64>,
    /// Principal axes as rows, shape `(k, d)`, pairwise orthonormal.
    pub components: Array2<f64>,
    /// Sample variance along each component, non-increasing, length `k`.
    pub explained_variance: Vec<f64>,
    /// Trace of the covariance matrix (sum of all feature variances).
    pub total_variance: f64,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.components.ncols()
    }

    /// Model restricted to the first `k` components.
    pub fn truncated(&self, k: usize) -> Result<PcaModel> {
        if k == 0 || k > self.n_components() {
            return Err(Error::validation(format!(
                "k must be in [1, {}], got {k}",
                self.n_components()
            )));
        }
        Ok(PcaModel {
            mean: self.mean.clone(),
            components: self.components.slice(ndarray::s![..k, ..]).to_owned(),
            explained_variance: self.explained_variance[..k].to_vec(),
            total_variance: self.total_variance,
        })
    }
}

/// Fits the top-`k` principal components of `x`.
pub fn fit_pca(x: ArrayView2<'_, f64>, k: usize) -> Result<PcaModel> {
    let (n, d) = x.dim();
    if n < 2 {
        return Err(Error::validation("PCA needs at least 2 rows"));
    }
    let max_k = (n - 1).min(d);
    if k == 0 || k > max_k {
        return Err(Error::validation(format!(
            "k must be in [1, {max_k}], got {k}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("non-finite entry in PCA input"));
    }

    let mut mean = Array1::zeros(d);
    for row in x.outer_iter() {
        mean += &row;
    }
    mean /= n as f64;
    let mean_slice = mean.as_slice().expect("contiguous");

    // Upper triangle of sum((x - mean)(x - mean)^T), accumulated row by row.
    let mut cov = vec![0.0f64; d * d];
    let mut centered = vec![0.0f64; d];
    for row in x.outer_iter() {
        let row = row.as_slice().expect("row-major layout");
        for ((c, &v), &m) in centered.iter_mut().zip(row).zip(mean_slice) {
            *c = v - m;
        }
        for i in 0..d {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            let dst = &mut cov[i * d + i..(i + 1) * d];
            for (slot, &cj) in dst.iter_mut().zip(&centered[i..]) {
                *slot += ci * cj;
            }
        }
    }
    let scale = 1.0 / (n as f64 - 1.0);
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] * scale;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    let total_variance: f64 = (0..d).map(|i| cov[i * d + i]).sum();

    let (mut eigenvalues, eigenvectors) = jacobi_eigen_symmetric(&mut cov, d);

    // Sort descending by eigenvalue; clamp the tiny negatives Jacobi can
    // leave on rank-deficient inputs.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    for v in eigenvalues.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }

    let mut components = Array2::zeros((k, d));
    let mut explained_variance = Vec::with_capacity(k);
    for (row, &src) in order[..k].iter().enumerate() {
        explained_variance.push(eigenvalues[src]);
        let comp = components.row_mut(row).into_slice().expect("contiguous");
        for (j, slot) in comp.iter_mut().enumerate() {
            *slot = eigenvectors[j * d + src];
        }
        orient_component(comp);
    }

    Ok(PcaModel {
        mean,
        components,
        explained_variance,
        total_variance,
    })
}

/// Flips the row so its largest-magnitude entry is positive.
fn orient_component(comp: &mut [f64]) {
    let mut lead = 0;
    let mut best = comp[0].abs();
    for (j, &v) in comp.iter().enumerate().skip(1) {
        if v.abs() > best {
            best = v.abs();
            lead = j;
        }
    }
    if comp[lead] < 0.0 {
        for v in comp.iter_mut() {
            *v = -*v;
        }
    }
}

/// Projects rows of `x` onto the fitted axes: `(x - mean) @ components^T`.
pub fn pca_transform(m: &PcaModel, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if x.ncols() != m.n_features() {
        return Err(Error::shape(
            format!("{} feature columns", m.n_features()),
            format!("{} columns", x.ncols()),
        ));
    }
    let centered = &x - &m.mean;
    Ok(centered.dot(&m.components.t()))
}

/// Maps projected rows back to feature space: `z @ components + mean`.
pub fn pca_inverse_transform(m: &PcaModel, z: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if z.ncols() != m.n_components() {
        return Err(Error::shape(
            format!("{} component columns", m.n_components()),
            format!("{} columns", z.ncols()),
        ));
    }
    Ok(z.dot(&m.components) + &m.mean)
}

/// Cumulative explained-variance ratios, one entry per component.
pub fn proportion_of_variance(m: &PcaModel) -> Vec<f64> {
    let mut acc = 0.0;
    m.explained_variance
        .iter()
        .map(|&v| {
            acc += v;
            if m.total_variance > 0.0 {
                acc / m.total_variance
            } else {
                0.0
            }
        })
        .collect()
}

/// In-place cyclic Jacobi eigendecomposition of a symmetric matrix stored
/// row-major in `a`. Returns `(eigenvalues, eigenvectors)` with
/// eigenvector `j` in column `j` of the returned row-major matrix.
fn jacobi_eigen_symmetric(a: &mut [f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0f64; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    if d == 1 {
        return (vec![a[0]], v);
    }
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = (frob * 1e-14).max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[p * d + q] * a[p * d + q];
            }
        }
        if (2.0 * off).sqrt() <= stop {
            break;
        }
        for p in 0..d - 1 {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq.abs() <= stop / (d as f64) {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                a[p * d + p] = app - t * apq;
                a[q * d + q] = aqq + t * apq;
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for j in 0..d {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[j * d + p];
                    let ajq = a[j * d + q];
                    let np = c * ajp - s * ajq;
                    let nq = s * ajp + c * ajq;
                    a[j * d + p] = np;
                    a[p * d + j] = np;
                    a[j * d + q] = nq;
                    a[q * d + j] = nq;
                }
                for j in 0..d {
                    let vjp = v[j * d + p];
                    let vjq = v[j * d + q];
                    v[j * d + p] = c * vjp - s * vjq;
                    v[j * d + q] = s * vjp + c * vjq;
                }
            }
        }
    }

    let eigenvalues: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    (eigenvalues, v)
}
