//! Balancing: a symmetric permutation that isolates eigenvalues already
//! exposed by zero rows or columns, then a diagonal similarity scaling
//! (Parlett–Reinsch) of the remaining block with radix-2 factors, so the
//! scaling itself introduces no rounding.
//!
//! Isolated eigenvalues end up on the diagonal outside `ilo..=ihi` and are
//! returned exactly; a triangular input is fully isolated.

use ndarray::Array2;
use num_complex::Complex64;

const RADIX: f64 = 2.0;

/// `B = D⁻¹ Pᵀ A P D` with `(P e_i) = e_{perm[i]}`.
#[derive(Debug, Clone)]
pub(crate) struct Balancing {
    pub perm: Vec<usize>,
    pub scale: Vec<f64>,
}

impl Balancing {
    /// Maps eigenvectors of `B` (columns of `x`) to eigenvectors of `A`.
    pub fn back_transform(&self, x: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros(x.raw_dim());
        for (i, &p) in self.perm.iter().enumerate() {
            let s = self.scale[i];
            for j in 0..x.ncols() {
                out[[p, j]] = x[[i, j]] * s;
            }
        }
        out
    }
}

fn swap(a: &mut Array2<Complex64>, perm: &mut [usize], i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.nrows();
    for c in 0..n {
        a.swap([i, c], [j, c]);
    }
    for r in 0..n {
        a.swap([r, i], [r, j]);
    }
    perm.swap(i, j);
}

/// Balances `a` in place.
pub(crate) fn balance(a: &mut Array2<Complex64>) -> Balancing {
    let n = a.nrows();
    let zero = Complex64::new(0.0, 0.0);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut ilo = 0;
    let mut ihi = n - 1;

    // rows with no off-diagonal entries in the active columns go to the bottom
    'rows: while ihi > 0 {
        for j in (0..=ihi).rev() {
            if (0..=ihi).all(|c| c == j || a[[j, c]] == zero) {
                swap(a, &mut perm, j, ihi);
                ihi -= 1;
                continue 'rows;
            }
        }
        break;
    }
    // columns with no off-diagonal entries in the active rows go to the top
    while ilo < ihi {
        let lo = ilo;
        match (lo..=ihi).find(|&j| (lo..=ihi).all(|r| r == j || a[[r, j]] == zero)) {
            Some(j) => {
                swap(a, &mut perm, j, ilo);
                ilo += 1;
            }
            None => break,
        }
    }

    let mut scale = vec![1.0; n];
    let radix2 = RADIX * RADIX;
    let mut changed = ilo < ihi;
    while changed {
        changed = false;
        for i in ilo..=ihi {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in ilo..=ihi {
                if j != i {
                    c += a[[j, i]].norm();
                    r += a[[i, j]].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= radix2;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= radix2;
            }
            if (c + r) / f < 0.95 * s {
                changed = true;
                scale[i] *= f;
                for j in 0..n {
                    a[[i, j]] /= f;
                    a[[j, i]] *= f;
                }
            }
        }
    }
    Balancing { perm, scale }
}
