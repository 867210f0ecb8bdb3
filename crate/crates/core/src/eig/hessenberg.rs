use ndarray::Array2;
use num_complex::Complex64;

/// Householder reduction to upper Hessenberg form, `A = Q H Qᴴ`.
///
/// `a` is overwritten with `H`; when `q` is given it is right-multiplied by
/// the accumulated reflectors.
pub(crate) fn reduce(a: &mut Array2<Complex64>, mut q: Option<&mut Array2<Complex64>>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|i| a[[i, k]].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[[k + 1, k]];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[[i, k]];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut().skip(k + 1) {
            *vi /= vnorm;
        }

        // A <- (I - 2 v vᴴ) A
        for j in k..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * a[[i, j]]).sum();
            if s != zero {
                for i in k + 1..n {
                    a[[i, j]] -= v[i] * s * 2.0;
                }
            }
        }
        // A <- A (I - 2 v vᴴ)
        for i in 0..n {
            let s: Complex64 = (k + 1..n).map(|j| a[[i, j]] * v[j]).sum();
            if s != zero {
                for j in k + 1..n {
                    a[[i, j]] -= s * v[j].conj() * 2.0;
                }
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let s: Complex64 = (k + 1..n).map(|j| q[[i, j]] * v[j]).sum();
                if s != zero {
                    for j in k + 1..n {
                        q[[i, j]] -= s * v[j].conj() * 2.0;
                    }
                }
            }
        }
        a[[k + 1, k]] = alpha;
        for i in k + 2..n {
            a[[i, k]] = zero;
        }
    }
}
