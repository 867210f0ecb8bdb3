//! Power-law fits of the band-pair gap near an EP.
//!
//! Gaps come from the gauge-equivalent symmetric matrix whenever the
//! potential admits one. It is an exact similarity of the truncated `H_k`,
//! but its eigenvalues do not carry the `√ε` amplification that the
//! strongly non-normal `H_k` has near a defective point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BandPair, EpConfig};
use crate::eig::eig_values_only;
use crate::error::{Error, Result};
use crate::gauge::equivalence;
use crate::model::{build_bloch, PotentialFamily, PotentialSpec};

const SAMPLES: usize = 12;
const DELTA_MIN: f64 = 1e-4;
const DELTA_MAX: f64 = 1e-1;
/// Gaps at or below this are excluded from fits.
pub const GAP_FLOOR: f64 = 1e-12;

/// Which side of the EP parameter to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Below,
    Above,
}

impl Side {
    pub fn apply(self, x: f64, delta: f64) -> f64 {
        match self {
            Side::Below => x - delta,
            Side::Above => x + delta,
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "below" | "-" => Ok(Side::Below),
            "above" | "+" => Ok(Side::Above),
            _ => Err(Error::InvalidArgument(format!("side must be below or above, got '{s}'"))),
        }
    }
}

/// `gap ≈ A·|δ|^p` fitted in log-log space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionFit {
    pub exponent: f64,
    pub stderr: f64,
    pub prefactor: f64,
    pub side: Side,
    /// `(δ, gap)` for every sample, including those excluded from the fit.
    pub samples: Vec<(f64, f64)>,
}

fn log_spaced() -> Vec<f64> {
    let (a, b) = (DELTA_MIN.ln(), DELTA_MAX.ln());
    (0..SAMPLES)
        .map(|i| (a + (b - a) * i as f64 / (SAMPLES - 1) as f64).exp())
        .collect()
}

/// Potential whose truncated `H_k` is similar to that of `p`, preferring the
/// gauge-symmetrized form.
fn well_conditioned(p: &PotentialSpec) -> PotentialSpec {
    match equivalence(p) {
        Ok(eq) if eq.eligible => eq.transformed_potential.unwrap_or_else(|| p.clone()),
        _ => p.clone(),
    }
}

fn gap_at(p: &PotentialSpec, k: f64, pair: BandPair, m: usize) -> Result<f64> {
    let h = build_bloch(&well_conditioned(p), k, m)?;
    let v = eig_values_only(&h.matrix().view()).map_err(|e| e.at_k(k))?;
    pair.check(v.len())?;
    let (i, j) = pair.indices();
    Ok((v[j] - v[i]).norm())
}

fn fit(samples: Vec<(f64, f64)>, side: Side) -> Result<DispersionFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, g)| *g > GAP_FLOOR)
        .map(|&(d, g)| (d.ln(), g.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::FitRefused(format!(
            "only {} of {} gaps above {GAP_FLOOR:e}",
            pts.len(),
            samples.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(DispersionFit {
        exponent: slope,
        stderr,
        prefactor: intercept.exp(),
        side,
        samples,
    })
}

/// Gap exponent in `τ` at fixed `k`, sampling `τ_ep ± δ` on one side.
pub fn dispersion_exponent(
    family: &PotentialFamily,
    k: f64,
    pair: BandPair,
    tau_ep: f64,
    side: Side,
    config: &EpConfig,
) -> Result<DispersionFit> {
    let samples = log_spaced()
        .par_iter()
        .map(|&d| Ok((d, gap_at(&family.at(side.apply(tau_ep, d)), k, pair, config.truncation)?)))
        .collect::<Result<Vec<_>>>()?;
    fit(samples, side)
}

/// Gap exponent in `k` at fixed potential, sampling `k_ep ± δ` on one side.
pub fn k_dispersion_exponent(
    potential: &PotentialSpec,
    pair: BandPair,
    k_ep: f64,
    side: Side,
    config: &EpConfig,
) -> Result<DispersionFit> {
    let samples = log_spaced()
        .par_iter()
        .map(|&d| Ok((d, gap_at(potential, side.apply(k_ep, d), pair, config.truncation)?)))
        .collect::<Result<Vec<_>>>()?;
    fit(samples, side)
}
