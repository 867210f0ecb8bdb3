//! Band structures over the Brillouin zone.
//!
//! [`band_sweep`] diagonalizes the plane-wave Bloch Hamiltonian at each
//! k-point (in parallel). Energies are stored in canonical order; a separate
//! connectivity table follows each band through near-degeneracies by
//! eigenvector overlap with the previous k-point.

mod fd;
mod wave;

use std::io::Write;

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eig::{eig, eig_values_only};
use crate::error::{Error, Result};
use crate::format::float17;
use crate::model::{build_bloch, PotentialSpec, DEFAULT_TRUNCATION};

pub use fd::{fd_band_oracle, fd_band_oracle_with, fd_matrix, FdGrid, FdOptions};
pub use wave::{
    align_peak, participation_ratio, reconstruct_wavefunction, tail_profile,
    write_wavefunction_csv, TailFit, TailVerdict,
};

/// Convergence target for [`converge_truncation`].
pub const TRUNCATION_TOL: f64 = 1e-10;
const MAX_TRUNCATION: usize = 256;

/// Complex band energies over a k-grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandStructure {
    k_grid: Vec<f64>,
    band_count: usize,
    /// `energies[ik][n]`, canonical order at each k.
    energies: Vec<Vec<Complex64>>,
    /// `tracked[ik][label]` is the canonical index of the band continued
    /// from label `label` at the first k-point.
    tracked: Vec<Vec<usize>>,
    #[serde(skip)]
    vectors: Option<Vec<Array2<Complex64>>>,
}

impl BandStructure {
    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn band_count(&self) -> usize {
        self.band_count
    }

    /// Energies at k-point `ik`, canonical order.
    pub fn energies_at(&self, ik: usize) -> &[Complex64] {
        &self.energies[ik]
    }

    pub fn energies(&self) -> &[Vec<Complex64>] {
        &self.energies
    }

    /// Energy of band `band` (1-based) at k-point `ik`.
    pub fn energy(&self, ik: usize, band: usize) -> Complex64 {
        self.energies[ik][band - 1]
    }

    /// Momentum-space eigenvector of band `band` (1-based) at k-point `ik`,
    /// indexed by `m ∈ [-M, M]`.
    pub fn vector(&self, ik: usize, band: usize) -> Option<ArrayView1<'_, Complex64>> {
        self.vectors
            .as_ref()
            .map(|v| v[ik].column(band - 1))
    }

    /// Band energies re-ordered by overlap continuation from the first k.
    pub fn tracked_energies(&self, ik: usize) -> Vec<Complex64> {
        self.tracked[ik]
            .iter()
            .map(|&i| self.energies[ik][i])
            .collect()
    }

    pub fn connectivity(&self) -> &[Vec<usize>] {
        &self.tracked
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.energies
            .iter()
            .flatten()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|ω_n(k) − ω'_n(k)|` between two structures on the same grid.
    pub fn max_deviation(&self, other: &BandStructure) -> f64 {
        assert_eq!(self.k_grid.len(), other.k_grid.len());
        let bands = self.band_count.min(other.band_count);
        self.energies
            .iter()
            .zip(&other.energies)
            .flat_map(|(a, b)| (0..bands).map(move |n| (a[n] - b[n]).norm()))
            .fold(0.0, f64::max)
    }

    /// CSV with columns `k,band,re_omega,im_omega`, one row per (k, band).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,band,re_omega,im_omega")?;
        for (k, row) in self.k_grid.iter().zip(&self.energies) {
            for (n, z) in row.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{}",
                    float17(*k),
                    n + 1,
                    float17(z.re),
                    float17(z.im)
                )?;
            }
        }
        Ok(())
    }
}

/// `count` evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..count)
            .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn check_band_count(n_bands: usize, truncation: usize) -> Result<()> {
    if n_bands == 0 || n_bands + 2 > 2 * truncation {
        return Err(Error::InvalidArgument(format!(
            "band count {n_bands} must lie in 1..={} for M = {truncation}",
            (2 * truncation).saturating_sub(2)
        )));
    }
    Ok(())
}

/// Lowest `n_bands` energies at one k-point, canonical order.
pub fn bands_at(
    potential: &PotentialSpec,
    k: f64,
    truncation: usize,
    n_bands: usize,
) -> Result<Vec<Complex64>> {
    check_band_count(n_bands, truncation)?;
    let h = build_bloch(potential, k, truncation)?;
    let mut values = eig_values_only(&h.matrix().view()).map_err(|e| e.at_k(k))?;
    values.truncate(n_bands);
    Ok(values)
}

/// Band structure of `potential` on `k_grid`.
pub fn band_sweep(
    potential: &PotentialSpec,
    k_grid: &[f64],
    truncation: usize,
    n_bands: usize,
) -> Result<BandStructure> {
    check_band_count(n_bands, truncation)?;
    if k_grid.is_empty() {
        return Err(Error::InvalidArgument("empty k-grid".into()));
    }
    let per_k: Vec<(Vec<Complex64>, Array2<Complex64>)> = k_grid
        .par_iter()
        .map(|&k| {
            let h = build_bloch(potential, k, truncation)?;
            let d = eig(&h.matrix().view()).map_err(|e| e.at_k(k))?;
            let values = d.eigenvalues()[..n_bands].to_vec();
            let vecs = d.vectors().slice(ndarray::s![.., ..n_bands]).to_owned();
            Ok((values, vecs))
        })
        .collect::<Result<_>>()?;

    let (energies, vectors): (Vec<_>, Vec<_>) = per_k.into_iter().unzip();
    let tracked = track_by_overlap(&vectors);
    Ok(BandStructure {
        k_grid: k_grid.to_vec(),
        band_count: n_bands,
        energies,
        tracked,
        vectors: Some(vectors),
    })
}

/// Greedy maximal-overlap assignment between consecutive k-points.
fn track_by_overlap(vectors: &[Array2<Complex64>]) -> Vec<Vec<usize>> {
    let n = vectors.first().map_or(0, |v| v.ncols());
    let mut tracked = Vec::with_capacity(vectors.len());
    let mut current: Vec<usize> = (0..n).collect();
    tracked.push(current.clone());
    for w in vectors.windows(2) {
        let (prev, next) = (&w[0], &w[1]);
        let mut pairs = Vec::with_capacity(n * n);
        for (label, &pi) in current.iter().enumerate() {
            for j in 0..n {
                let ov: Complex64 = prev
                    .column(pi)
                    .iter()
                    .zip(next.column(j).iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                pairs.push((ov.norm(), label, j));
            }
        }
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut assigned = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        for (_, label, j) in pairs {
            if assigned[label] == usize::MAX && !taken[j] {
                assigned[label] = j;
                taken[j] = true;
            }
        }
        current = assigned;
        tracked.push(current.clone());
    }
    tracked
}

/// Doubles `M` from `start` until the lowest `n_bands` energies at `k`
/// change by less than [`TRUNCATION_TOL`]. Returns the converged `M`.
pub fn converge_truncation(
    potential: &PotentialSpec,
    k: f64,
    n_bands: usize,
    start: usize,
) -> Result<usize> {
    let mut m = start.max(potential.bandwidth()).max(1).max(n_bands.div_ceil(2) + 1);
    let mut prev = bands_at(potential, k, m, n_bands)?;
    while m < MAX_TRUNCATION {
        let next_m = 2 * m;
        let next = bands_at(potential, k, next_m, n_bands)?;
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change < TRUNCATION_TOL {
            return Ok(m);
        }
        m = next_m;
        prev = next;
    }
    Err(Error::InvalidArgument(format!(
        "band energies not converged up to M = {MAX_TRUNCATION}"
    )))
}

/// [`converge_truncation`] from the default `M = 32`.
pub fn default_truncation(potential: &PotentialSpec, k: f64, n_bands: usize) -> Result<usize> {
    converge_truncation(potential, k, n_bands, DEFAULT_TRUNCATION)
}
