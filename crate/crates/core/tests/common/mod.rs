//! Independent oracles shared by the integration tests. Nothing here calls
//! into the eigensolver.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |_| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> Array2<Complex64> {
    let a = random_matrix(rng, n);
    let ah = a.t().mapv(|z| z.conj());
    (&a + &ah).mapv(|z| z * 0.5)
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(a: &Array2<Complex64>) -> Complex64 {
    let n = a.nrows();
    match n {
        0 => c(1.0, 0.0),
        1 => a[[0, 0]],
        2 => a[[0, 0]] * a[[1, 1]] - a[[0, 1]] * a[[1, 0]],
        _ => {
            let mut det = c(0.0, 0.0);
            for j in 0..n {
                let minor = Array2::from_shape_fn((n - 1, n - 1), |(r, s)| {
                    a[[r + 1, if s < j { s } else { s + 1 }]]
                });
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                det += a[[0, j]] * cofactor_det(&minor) * sign;
            }
            det
        }
    }
}

/// Monic characteristic polynomial coefficients by Faddeev–LeVerrier:
/// returns `[1, c_{n-1}, ..., c_0]` for `λ^n + c_{n-1} λ^{n-1} + ... + c_0`.
pub fn char_poly(a: &Array2<Complex64>) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![c(1.0, 0.0)];
    let identity = Array2::from_diag_elem(n, c(1.0, 0.0));
    let mut m = Array2::<Complex64>::zeros((n, n));
    let mut ck = c(1.0, 0.0);
    for k in 1..=n {
        m = a.dot(&m) + identity.mapv(|z| z * ck);
        let am = a.dot(&m);
        let tr: Complex64 = am.diag().iter().sum();
        ck = -tr / k as f64;
        coeffs.push(ck);
    }
    coeffs
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().fold(c(0.0, 0.0), |acc, &a| acc * z + a)
}

fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    p.iter()
        .take(n)
        .enumerate()
        .map(|(i, &a)| a * (n - i) as f64)
        .collect()
}

/// Roots of a monic polynomial by Durand–Kerner, polished with Newton.
pub fn poly_roots(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let radius = 1.0 + p.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * radius / 2.0).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = horner(p, roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let dp = derivative(p);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = horner(&dp, *r);
            if d.norm() > 0.0 {
                *r -= horner(p, *r) / d;
            }
        }
    }
    roots
}

/// Largest distance under a greedy nearest-neighbour pairing of two
/// multisets (adequate when points are well separated compared with the
/// tolerance being tested).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn lu_det(a: &Array2<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = c(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[[i, col]].norm().total_cmp(&m[[j, col]].norm()))
            .unwrap();
        if m[[piv, col]].norm() == 0.0 {
            return c(0.0, 0.0);
        }
        if piv != col {
            for j in 0..n {
                m.swap([piv, j], [col, j]);
            }
            det = -det;
        }
        let p = m[[col, col]];
        det *= p;
        for r in col + 1..n {
            let f = m[[r, col]] / p;
            for j in col..n {
                let v = m[[col, j]];
                m[[r, j]] -= f * v;
            }
        }
    }
    det
}

/// Composite Simpson rule on `[a, b]` with `intervals` (even) subintervals.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, intervals: usize) -> Complex64 {
    assert!(intervals % 2 == 0);
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + i as f64 * h) * w;
    }
    s * (h / 3.0)
}

/// `⟨φ_m| −∂² + V |φ_n⟩` for `V = V0 [cos x + iτ cos(x/2)]` and
/// `φ_m = sin(m x/2)/√π` on `[0, 2π]`, by quadrature.
pub fn dirichlet_by_quadrature(v0: f64, tau: f64, n: usize) -> Array2<Complex64> {
    let pi = std::f64::consts::PI;
    let pot = |x: f64| c(v0 * x.cos(), v0 * tau * (x / 2.0).cos());
    Array2::from_shape_fn((n, n), |(i, j)| {
        let (m, l) = ((i + 1) as f64, (j + 1) as f64);
        let kinetic = if i == j { (m / 2.0).powi(2) } else { 0.0 };
        let v = simpson(
            |x| pot(x) * ((m * x / 2.0).sin() * (l * x / 2.0).sin() / pi),
            0.0,
            2.0 * pi,
            4096,
        );
        v + kinetic
    })
}
