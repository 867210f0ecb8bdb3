//! Detuned two-level PT model `[[Δ+ig, t], [t, −Δ−ig]]` and its Riemann
//! sheets.

use ndarray::{array, Array2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bands::linspace;
use crate::error::{Error, Result};

const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Clone)]
pub struct TwoLevel {
    pub matrix: Array2<Complex64>,
    /// `[E₊, E₋]` with `E± = ±√((Δ+ig)² + t²)`, principal root.
    pub eigenvalues: [Complex64; 2],
    /// Unit eigenvectors matching `eigenvalues`.
    pub vectors: [[Complex64; 2]; 2],
}

fn unit(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Eigenvector of `[[a, t], [t, −a]]` at `e`, from whichever of the two
/// null-space candidates is larger.
fn vector_for(a: Complex64, t: f64, e: Complex64, fallback: usize) -> [Complex64; 2] {
    let tc = Complex64::new(t, 0.0);
    let v1 = [tc, e - a];
    let v2 = [e + a, tc];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    if n1.max(n2) == 0.0 {
        let mut v = [Complex64::new(0.0, 0.0); 2];
        v[fallback] = Complex64::new(1.0, 0.0);
        return v;
    }
    unit(if n1 >= n2 { v1 } else { v2 })
}

pub fn two_level_model(delta: f64, g: f64, t: f64) -> TwoLevel {
    let a = Complex64::new(delta, g);
    let tc = Complex64::new(t, 0.0);
    let e = (a * a + tc * tc).sqrt();
    TwoLevel {
        matrix: array![[a, tc], [tc, -a]],
        eigenvalues: [e, -e],
        vectors: [vector_for(a, t, e, 0), vector_for(a, t, -e, 1)],
    }
}

/// One mesh node of the sheets.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SheetPoint {
    pub delta: f64,
    pub g: f64,
    pub re_upper: f64,
    pub re_lower: f64,
    pub im_upper: f64,
    pub im_lower: f64,
}

/// Real- and imaginary-part sheets on a `resolution × resolution` mesh.
///
/// Each sheet takes the upper or lower of `±Re E` (and `±Im E`), which is
/// continuous everywhere; the sheets meet where `Re E = 0` (`Δ = 0, |g| ≥ t`)
/// and where `Im E = 0` (`Δ = 0, |g| ≤ t`).
pub fn riemann_sheet_grid(
    delta_range: (f64, f64),
    g_range: (f64, f64),
    t: f64,
    resolution: usize,
) -> Result<Vec<SheetPoint>> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let ds = linspace(delta_range.0, delta_range.1, resolution);
    let gs = linspace(g_range.0, g_range.1, resolution);
    Ok(gs
        .par_iter()
        .flat_map_iter(|&g| {
            ds.iter().map(move |&delta| {
                let e = two_level_model(delta, g, t).eigenvalues[0];
                SheetPoint {
                    delta,
                    g,
                    re_upper: e.re.abs(),
                    re_lower: -e.re.abs(),
                    im_upper: e.im.abs(),
                    im_lower: -e.im.abs(),
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_pairs(m: &TwoLevel) {
        for (e, v) in m.eigenvalues.iter().zip(&m.vectors) {
            let r0 = m.matrix[[0, 0]] * v[0] + m.matrix[[0, 1]] * v[1] - e * v[0];
            let r1 = m.matrix[[1, 0]] * v[0] + m.matrix[[1, 1]] * v[1] - e * v[1];
            assert!(r0.norm() < 1e-12 && r1.norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_cases() {
        let ep = two_level_model(0.0, 1.0, 1.0);
        assert!(ep.eigenvalues[0].norm() < 1e-15 && ep.eigenvalues[1].norm() < 1e-15);
        let herm = two_level_model(0.0, 0.0, 1.0);
        assert!((herm.eigenvalues[0] - 1.0).norm() < 1e-15);
        assert!((herm.eigenvalues[1] + 1.0).norm() < 1e-15);
        let diab = two_level_model(0.3, 0.4, 0.0);
        assert!((diab.eigenvalues[0] - Complex64::new(0.3, 0.4)).norm() < 1e-15);
        for m in [&herm, &diab, &two_level_model(-0.7, 0.2, 0.9)] {
            check_pairs(m);
        }
        // diabolic point: distinct basis vectors
        let dp = two_level_model(0.0, 0.0, 0.0);
        let ov = dp.vectors[0][0].conj() * dp.vectors[1][0] + dp.vectors[0][1].conj() * dp.vectors[1][1];
        assert!(ov.norm() < 1e-15);
    }

    #[test]
    fn sheets_touch_on_the_cuts() {
        let t = 1.0;
        let grid = riemann_sheet_grid((-1.0, 1.0), (-2.0, 2.0), t, 17).unwrap();
        for p in grid.iter().filter(|p| p.delta == 0.0) {
            if p.g.abs() < t {
                assert_eq!(p.im_upper, 0.0);
                assert!(p.re_upper > 0.0);
            } else if p.g.abs() > t {
                assert_eq!(p.re_upper, 0.0);
                assert!(p.im_upper > 0.0);
            }
        }
        assert!(riemann_sheet_grid((-1.0, 1.0), (-1.0, 1.0), t, 8).is_err());
    }

    #[test]
    fn far_field() {
        let e = two_level_model(1e4, 0.5, 1.0).eigenvalues[0];
        assert!((e - Complex64::new(1e4, 0.5)).norm() < 1e-3);
    }
}
