//! Plane-wave coefficient diagnostics: real-space reconstruction,
//! participation ratio and tail-shape fits.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::float17;

/// Magnitude below which coefficients are excluded from tail fits.
pub const TAIL_FLOOR: f64 = 1e-13;
const MIN_TAIL_POINTS: usize = 5;

/// `(Σ|a|²)² / Σ|a|⁴`, in `[1, len]`.
pub fn participation_ratio(coeffs: &[Complex64]) -> Result<f64> {
    let s2: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    if s2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s4: f64 = coeffs.iter().map(|z| z.norm_sqr().powi(2)).sum();
    if !s4.is_finite() || s4 == 0.0 {
        return Err(Error::NonFinite);
    }
    Ok((s2 * s2 / s4).clamp(1.0, coeffs.len() as f64))
}

/// `ψ(x) = e^{ikx} Σ_m a_m e^{imx}` with `coeffs` indexed by `m ∈ [−M, M]`.
pub fn reconstruct_wavefunction(coeffs: &[Complex64], k: f64, x_grid: &[f64]) -> Vec<Complex64> {
    let half = (coeffs.len() / 2) as f64;
    x_grid
        .iter()
        .map(|&x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * Complex64::from_polar(1.0, (i as f64 - half + k) * x))
                .sum()
        })
        .collect()
}

/// Scales to unit peak magnitude and rotates the peak sample onto the
/// positive real axis.
pub fn align_peak(samples: &[Complex64]) -> Vec<Complex64> {
    let peak = samples
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()));
    match peak {
        Some(p) if p.norm() > 0.0 => {
            let rot = p.conj() / (p.norm() * p.norm());
            samples.iter().map(|z| z * rot).collect()
        }
        _ => samples.to_vec(),
    }
}

/// Shape of `ln|a_m|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailVerdict {
    SuperExponential,
    NotSuperExponential,
    Inconclusive,
}

/// Least-squares fit `ln|a_m| ≈ c + b·m + q·m²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailFit {
    pub quadratic_coeff: f64,
    pub linear_coeff: f64,
    pub constant: f64,
    /// Fit residual per included harmonic, `(m, ln|a_m| − fit)`.
    pub residuals: Vec<(i32, f64)>,
    pub rms_residual: f64,
    /// Harmonic at the peak of the fitted parabola.
    pub vertex: Option<f64>,
    pub points: usize,
    pub verdict: TailVerdict,
}

pub fn tail_profile(coeffs: &[Complex64]) -> Result<TailFit> {
    if coeffs.len() < 9 {
        return Err(Error::InvalidArgument(format!(
            "tail fit needs at least 9 coefficients, got {}",
            coeffs.len()
        )));
    }
    let half = (coeffs.len() / 2) as i32;
    let scale = half.max(1) as f64;
    let pts: Vec<(i32, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > TAIL_FLOOR)
        .map(|(i, a)| (i as i32 - half, a.norm().ln()))
        .collect();
    if pts.len() < MIN_TAIL_POINTS {
        return Ok(TailFit {
            quadratic_coeff: f64::NAN,
            linear_coeff: f64::NAN,
            constant: f64::NAN,
            residuals: Vec::new(),
            rms_residual: f64::NAN,
            vertex: None,
            points: pts.len(),
            verdict: TailVerdict::Inconclusive,
        });
    }
    // normal equations in u = m / M
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(m, y) in &pts {
        let u = m as f64 / scale;
        let row = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let c = solve3(ata, atb).ok_or_else(|| Error::FitRefused("singular tail fit".into()))?;
    let constant = c[0];
    let linear = c[1] / scale;
    let quad = c[2] / (scale * scale);
    let residuals: Vec<(i32, f64)> = pts
        .iter()
        .map(|&(m, y)| {
            let mf = m as f64;
            (m, y - (constant + linear * mf + quad * mf * mf))
        })
        .collect();
    let rms = (residuals.iter().map(|r| r.1 * r.1).sum::<f64>() / residuals.len() as f64).sqrt();
    let verdict = if quad < 0.0 && quad.abs() > linear.abs() / scale {
        TailVerdict::SuperExponential
    } else {
        TailVerdict::NotSuperExponential
    };
    Ok(TailFit {
        quadratic_coeff: quad,
        linear_coeff: linear,
        constant,
        residuals,
        rms_residual: rms,
        vertex: (quad != 0.0).then(|| -linear / (2.0 * quad)),
        points: pts.len(),
        verdict,
    })
}

/// Gaussian elimination with partial pivoting on a 3×3 system.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[r].iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// CSV with columns `x,re_psi,im_psi,abs_psi`.
pub fn write_wavefunction_csv<W: Write>(mut w: W, x: &[f64], psi: &[Complex64]) -> Result<()> {
    writeln!(w, "x,re_psi,im_psi,abs_psi")?;
    for (x, z) in x.iter().zip(psi) {
        writeln!(
            w,
            "{},{},{},{}",
            float17(*x),
            float17(z.re),
            float17(z.im),
            float17(z.norm())
        )?;
    }
    Ok(())
}
