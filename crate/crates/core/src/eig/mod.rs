//! Dense complex non-Hermitian eigensolver.
//!
//! Pipeline: balancing (eigenvalue isolation, radix-2 scaling), Householder
//! reduction to Hessenberg form, single-shift complex QR with Wilkinson
//! shifts and Ahues–Tisseur deflation, eigenvectors by back-substitution on
//! the triangular Schur factor. Any
//! eigenpair whose residual on the original matrix misses the contract gets
//! up to three steps of inverse iteration.
//!
//! At exceptional points the matrix is defective; the returned vectors for a
//! coalescing pair are then nearly parallel. Nothing tries to build Jordan
//! chains.

mod balance;
mod hessenberg;
mod schur;

use std::cmp::Ordering;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use schur::SWEEPS_PER_DIM;

/// Residual contract: `‖H v − λ v‖ ≤ RESIDUAL_TOL · max(1, ‖H‖_F)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

const INVERSE_ITERATION_STEPS: usize = 3;

/// Eigenpairs of a dense complex matrix in canonical order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<Complex64>,
    /// Unit right eigenvectors stored as columns.
    vectors: Array2<Complex64>,
    residuals: Vec<f64>,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Right eigenvector `i` (unit norm, largest entry real positive).
    pub fn vector(&self, i: usize) -> ArrayView1<'_, Complex64> {
        self.vectors.column(i)
    }

    /// All right eigenvectors as matrix columns.
    pub fn vectors(&self) -> ArrayView2<'_, Complex64> {
        self.vectors.view()
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Relative tolerance under which two real parts count as tied.
const TIE_TOL: f64 = 1e-9;

/// Canonical eigenvalue order: ascending real part, ties (real parts equal
/// within a relative `1e-9`) broken by ascending imaginary part.
pub fn canonical_order(values: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a]
            .re
            .partial_cmp(&values[b].re)
            .unwrap_or(Ordering::Equal)
            .then(values[a].im.partial_cmp(&values[b].im).unwrap_or(Ordering::Equal))
    });
    // regroup runs of tied real parts by imaginary part
    let mut start = 0;
    while start < idx.len() {
        let anchor = values[idx[start]].re;
        let tol = TIE_TOL * anchor.abs().max(1.0);
        let mut end = start + 1;
        while end < idx.len() && (values[idx[end]].re - anchor).abs() <= tol {
            end += 1;
        }
        idx[start..end].sort_by(|&a, &b| {
            values[a]
                .im
                .partial_cmp(&values[b].im)
                .unwrap_or(Ordering::Equal)
                .then(values[a].re.partial_cmp(&values[b].re).unwrap_or(Ordering::Equal))
        });
        start = end;
    }
    idx
}

/// Sorts values into canonical order.
pub fn sort_canonical(values: &mut Vec<Complex64>) {
    let order = canonical_order(values);
    *values = order.into_iter().map(|i| values[i]).collect();
}

pub fn frobenius_norm(a: &ArrayView2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn vec_norm(v: &ArrayView1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖A v − λ v‖₂`.
pub fn residual(a: &ArrayView2<Complex64>, lambda: Complex64, v: &ArrayView1<Complex64>) -> f64 {
    let av = a.dot(v);
    av.iter()
        .zip(v.iter())
        .map(|(x, y)| (x - lambda * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Scales to unit norm and rotates so the largest-magnitude entry is real
/// positive (first such entry on exact ties).
pub fn normalize_phase(v: &mut Array1<Complex64>) {
    let norm = vec_norm(&v.view());
    if norm == 0.0 {
        return;
    }
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best = i;
            best_mag = m;
        }
    }
    let phase = v[best].conj() / best_mag;
    v.mapv_inplace(|z| z * phase / norm);
    // exact zero imaginary part on the pivot entry
    v[best] = Complex64::new(v[best].norm(), 0.0);
}

fn check_input(a: &ArrayView2<Complex64>) -> Result<()> {
    let (r, c) = a.dim();
    if r != c {
        return Err(Error::NotSquare { rows: r, cols: c });
    }
    if r == 0 {
        return Err(Error::EmptyMatrix);
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Eigenvalues only, in canonical order. Follows the same arithmetic as
/// [`eig`], so both return bit-identical eigenvalues.
pub fn eig_values_only(a: &ArrayView2<Complex64>) -> Result<Vec<Complex64>> {
    check_input(a)?;
    let mut h = a.to_owned();
    balance::balance(&mut h);
    hessenberg::reduce(&mut h, None);
    schur::schur(&mut h, None)?;
    let mut values: Vec<Complex64> = h.diag().to_vec();
    sort_canonical(&mut values);
    Ok(values)
}

/// Full eigendecomposition in canonical order.
pub fn eig(a: &ArrayView2<Complex64>) -> Result<EigenDecomposition> {
    check_input(a)?;
    let n = a.nrows();
    let mut t = a.to_owned();
    let balancing = balance::balance(&mut t);
    let mut z = Array2::from_diag_elem(n, Complex64::new(1.0, 0.0));
    hessenberg::reduce(&mut t, Some(&mut z));
    schur::schur(&mut t, Some(&mut z))?;

    let x = triangular_eigenvectors(&t);
    let mut vectors = balancing.back_transform(&z.dot(&x));

    let values: Vec<Complex64> = t.diag().to_vec();
    let norm_a = frobenius_norm(a);
    let bound = RESIDUAL_TOL * norm_a.max(1.0);
    let mut residuals = Vec::with_capacity(n);
    for (j, &lambda) in values.iter().enumerate() {
        let mut v = vectors.column(j).to_owned();
        normalize_phase(&mut v);
        let mut res = residual(a, lambda, &v.view());
        if res > bound {
            if let Some((w, r)) = inverse_iteration(a, lambda, &v, norm_a) {
                if r < res {
                    v = w;
                    res = r;
                }
            }
        }
        vectors.column_mut(j).assign(&v);
        residuals.push(res);
    }

    let order = canonical_order(&values);
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let residuals = order.iter().map(|&i| residuals[i]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| vectors[[r, order[c]]]);
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
        residuals,
    })
}

/// Columns are eigenvectors of upper-triangular `t` (back-substitution with
/// perturbed small pivots, as in LAPACK's `ztrevc`).
fn triangular_eigenvectors(t: &Array2<Complex64>) -> Array2<Complex64> {
    let n = t.nrows();
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let tnorm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let big = 1e150;
    let mut x = Array2::<Complex64>::zeros((n, n));
    for k in 0..n {
        let lambda = t[[k, k]];
        let smin = (ulp * lambda.norm()).max(ulp * tnorm * 1e-3).max(smlnum);
        let mut col = vec![Complex64::new(0.0, 0.0); k + 1];
        col[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut rhs = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                rhs -= t[[i, j]] * col[j];
            }
            let mut d = t[[i, i]] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            col[i] = rhs / d;
            let mag = col[i].norm();
            if mag > big {
                let f = 1.0 / mag;
                for c in col.iter_mut() {
                    *c *= f;
                }
            }
        }
        for (i, c) in col.into_iter().enumerate() {
            x[[i, k]] = c;
        }
    }
    x
}

/// Inverse iteration `(A − μ I) y = v` from a starting vector; returns the
/// best normalized vector and its residual.
fn inverse_iteration(
    a: &ArrayView2<Complex64>,
    lambda: Complex64,
    start: &Array1<Complex64>,
    norm_a: f64,
) -> Option<(Array1<Complex64>, f64)> {
    let n = a.nrows();
    let mut shifted = a.to_owned();
    let eps = f64::EPSILON * norm_a.max(1.0);
    let mu = lambda + Complex64::new(eps, 0.0);
    for i in 0..n {
        shifted[[i, i]] -= mu;
    }
    let lu = Lu::factor(shifted, eps)?;
    let mut best: Option<(Array1<Complex64>, f64)> = None;
    let mut v = start.clone();
    for _ in 0..INVERSE_ITERATION_STEPS {
        let mut y = lu.solve(&v);
        if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            break;
        }
        normalize_phase(&mut y);
        let r = residual(a, lambda, &y.view());
        if best.as_ref().is_none_or(|(_, br)| r < *br) {
            best = Some((y.clone(), r));
        }
        v = y;
    }
    best
}

/// LU with partial pivoting; tiny pivots are replaced by `floor`.
struct Lu {
    lu: Array2<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Array2<Complex64>, floor: f64) -> Option<Self> {
        let n = a.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, a[[i, k]].norm()))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal))?;
            if p != k {
                for j in 0..n {
                    a.swap([k, j], [p, j]);
                }
                perm.swap(k, p);
            }
            if pmag < floor {
                a[[k, k]] = Complex64::new(floor, 0.0);
            }
            let pivot = a[[k, k]];
            for i in k + 1..n {
                let f = a[[i, k]] / pivot;
                a[[i, k]] = f;
                if f != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = a[[k, j]];
                        a[[i, j]] -= f * u;
                    }
                }
            }
        }
        Some(Lu { lu: a, perm })
    }

    fn solve(&self, b: &Array1<Complex64>) -> Array1<Complex64> {
        let n = self.lu.nrows();
        let mut x: Array1<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[[i, j]];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[[i, j]];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[[i, i]];
        }
        x
    }
}
