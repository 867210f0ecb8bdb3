//! Single-shift complex QR iteration on an upper Hessenberg matrix.
//!
//! The whole matrix is updated on every sweep (not just the active window),
//! so the eigenvalue path is bit-identical with and without accumulation of
//! the Schur vectors.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sweeps allowed per unit of dimension.
pub const SWEEPS_PER_DIM: usize = 30;

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Rotation `[c, s; -conj(s), c]` with real `c`, mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    if y == zero {
        return (1.0, zero, x);
    }
    if x == zero {
        let ny = y.norm();
        return (0.0, y.conj() / ny, Complex64::new(ny, 0.0));
    }
    let nx = x.norm();
    let norm = nx.hypot(y.norm());
    let phase = x / nx;
    (nx / norm, phase * y.conj() / norm, phase * norm)
}

/// Reduces Hessenberg `h` to upper triangular Schur form in place.
pub(crate) fn schur(h: &mut Array2<Complex64>, mut z: Option<&mut Array2<Complex64>>) -> Result<()> {
    let n = h.nrows();
    if n <= 1 {
        return Ok(());
    }
    let ulp = f64::EPSILON;
    let safmin = f64::MIN_POSITIVE;
    let smlnum = safmin * (n as f64 / ulp);
    let budget = SWEEPS_PER_DIM * n;
    let zero = Complex64::new(0.0, 0.0);

    let mut total = 0usize;
    let mut ihi = n - 1;
    let mut its = 0usize;
    loop {
        // look for a negligible subdiagonal in rows 1..=ihi
        let mut l = 0;
        let mut k = ihi;
        while k > 0 {
            let sub = cabs1(h[[k, k - 1]]);
            if sub <= smlnum {
                l = k;
                break;
            }
            let mut tst = cabs1(h[[k - 1, k - 1]]) + cabs1(h[[k, k]]);
            if tst == 0.0 {
                if k >= 2 {
                    tst += h[[k - 1, k - 2]].re.abs();
                }
                if k < ihi {
                    tst += h[[k + 1, k]].re.abs();
                }
            }
            if sub <= ulp * tst {
                // Ahues & Tisseur refinement
                let up = cabs1(h[[k - 1, k]]);
                let ab = sub.max(up);
                let ba = sub.min(up);
                let d1 = cabs1(h[[k, k]]);
                let d2 = cabs1(h[[k - 1, k - 1]] - h[[k, k]]);
                let aa = d1.max(d2);
                let bb = d1.min(d2);
                let s = aa + ab;
                if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                    l = k;
                    break;
                }
            }
            k -= 1;
        }
        if l > 0 {
            h[[l, l - 1]] = zero;
        }
        if l == ihi {
            // 1x1 block converged
            if ihi == 0 {
                break;
            }
            ihi -= 1;
            its = 0;
            continue;
        }

        total += 1;
        its += 1;
        if total > budget {
            return Err(Error::NoConvergence {
                block_start: l,
                block_end: ihi,
                iterations: total - 1,
            });
        }

        let shift = if its % 10 == 0 && its % 20 != 0 {
            h[[l, l]] + h[[l + 1, l]].re.abs() * 0.75
        } else if its % 20 == 0 {
            h[[ihi, ihi]] + h[[ihi, ihi - 1]].re.abs() * 0.75
        } else {
            wilkinson(h, ihi)
        };

        if ihi == l + 1 {
            split_2x2(h, z.as_deref_mut(), l);
            continue;
        }

        // implicit single-shift sweep over the active block [l, ihi]
        let mut x = h[[l, l]] - shift;
        let mut y = h[[l + 1, l]];
        for k in l..ihi {
            if k > l {
                x = h[[k, k - 1]];
                y = h[[k + 1, k - 1]];
            }
            let (c, s, r) = givens(x, y);
            if k > l {
                h[[k, k - 1]] = r;
                h[[k + 1, k - 1]] = zero;
            }
            rotate(h, z.as_deref_mut(), k, (k + 2).min(ihi), c, s);
        }
    }
    Ok(())
}

/// Applies the rotation to rows and columns `k, k+1`; columns are updated in
/// rows `0..=row_end`.
fn rotate(
    h: &mut Array2<Complex64>,
    z: Option<&mut Array2<Complex64>>,
    k: usize,
    row_end: usize,
    c: f64,
    s: Complex64,
) {
    let n = h.nrows();
    for j in k..n {
        let a = h[[k, j]];
        let b = h[[k + 1, j]];
        h[[k, j]] = a * c + s * b;
        h[[k + 1, j]] = -s.conj() * a + b * c;
    }
    for i in 0..=row_end {
        let a = h[[i, k]];
        let b = h[[i, k + 1]];
        h[[i, k]] = a * c + s.conj() * b;
        h[[i, k + 1]] = -s * a + b * c;
    }
    if let Some(z) = z {
        for i in 0..n {
            let a = z[[i, k]];
            let b = z[[i, k + 1]];
            z[[i, k]] = a * c + s.conj() * b;
            z[[i, k + 1]] = -s * a + b * c;
        }
    }
}

/// Triangularizes the isolated 2x2 block at `l` with one rotation onto an
/// eigenvector. Shifted QR stalls on nearly defective blocks.
fn split_2x2(h: &mut Array2<Complex64>, z: Option<&mut Array2<Complex64>>, l: usize) {
    let lam = wilkinson(h, l + 1);
    let (a, b) = (h[[l, l]], h[[l, l + 1]]);
    let (c, d) = (h[[l + 1, l]], h[[l + 1, l + 1]]);
    let p = (b, lam - a);
    let q = (lam - d, c);
    let v = if cabs1(p.0) + cabs1(p.1) >= cabs1(q.0) + cabs1(q.1) { p } else { q };
    if cabs1(v.0) + cabs1(v.1) > 0.0 {
        let (cs, sn, _) = givens(v.0, v.1);
        rotate(h, z, l, l + 1, cs, sn);
    }
    h[[l + 1, l]] = Complex64::new(0.0, 0.0);
}

/// Eigenvalue of the trailing 2x2 block closer to `h[ihi, ihi]`.
fn wilkinson(h: &Array2<Complex64>, i: usize) -> Complex64 {
    let mut t = h[[i, i]];
    let u = h[[i - 1, i]].sqrt() * h[[i, i - 1]].sqrt();
    let s = cabs1(u);
    if s != 0.0 {
        let x = (h[[i - 1, i - 1]] - t) * 0.5;
        let sx = cabs1(x);
        let s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_annihilates() {
        let cases = [
            (Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)),
            (Complex64::new(0.0, 0.0), Complex64::new(3.0, -1.0)),
            (Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)),
        ];
        for (x, y) in cases {
            let (c, s, r) = givens(x, y);
            let top = x * c + s * y;
            let bottom = -s.conj() * x + y * c;
            assert!((top - r).norm() < 1e-15);
            assert!(bottom.norm() < 1e-15);
            assert!((c * c + s.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn jordan_block_converges() {
        let mut h = Array2::from_shape_vec(
            (3, 3),
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, 0.0),
            ],
        )
        .unwrap();
        schur(&mut h, None).unwrap();
        for i in 0..3 {
            assert!((h[[i, i]] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        }
    }
}
