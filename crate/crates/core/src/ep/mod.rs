//! Exceptional points in the hybrid (k, τ) plane.
//!
//! An EP is located by minimizing the gap of a band pair over τ at fixed k,
//! confirmed by eigenvector coalescence (overlap → 1, phase rigidity → 0),
//! and classified by what happens to the pair on either side: a PT
//! transition (complex pair on exactly one side) marks a conventional EP,
//! reality on both sides marks a Dirac EP.

mod dispersion;
mod encircle;
mod truncated;
mod two_level;

use ndarray::ArrayView2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eig::{eig, eig_values_only, vec_norm};
use crate::error::{Error, Result};
use crate::model::{build_bloch, PotentialFamily, DEFAULT_TRUNCATION};

pub use dispersion::{dispersion_exponent, k_dispersion_exponent, DispersionFit, Side};
pub use encircle::{encircle, LoopPath, LoopResult};
pub use truncated::{h3_discriminant, truncated_model, ModelName, ModelOverrides, TruncatedModel};
pub use two_level::{riemann_sheet_grid, two_level_model, SheetPoint, TwoLevel};

/// Adjacent band pair `(n, n+1)` with 1-based `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct BandPair {
    lower: usize,
}

impl BandPair {
    pub fn new(lower: usize) -> Result<Self> {
        if lower == 0 {
            return Err(Error::InvalidArgument("bands are numbered from 1".into()));
        }
        Ok(Self { lower })
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.lower + 1
    }

    /// Zero-based canonical indices of the pair.
    pub fn indices(&self) -> (usize, usize) {
        (self.lower - 1, self.lower)
    }

    fn check(&self, len: usize) -> Result<()> {
        if self.upper() > len {
            return Err(Error::BandOutOfRange(self.lower, self.upper(), len));
        }
        Ok(())
    }
}

impl TryFrom<(usize, usize)> for BandPair {
    type Error = Error;

    fn try_from((a, b): (usize, usize)) -> Result<Self> {
        if b != a + 1 {
            return Err(Error::InvalidArgument(format!(
                "band pair ({a}, {b}) is not adjacent"
            )));
        }
        BandPair::new(a)
    }
}

impl From<BandPair> for (usize, usize) {
    fn from(p: BandPair) -> Self {
        (p.lower(), p.upper())
    }
}

impl std::str::FromStr for BandPair {
    type Err = Error;

    /// `"2"` or `"2,3"` / `"2-3"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([',', '-']).map(str::trim).collect();
        let parse = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad band index '{x}'")))
        };
        match parts.as_slice() {
            [a] => BandPair::new(parse(a)?),
            [a, b] => BandPair::try_from((parse(a)?, parse(b)?)),
            _ => Err(Error::InvalidArgument(format!("bad band pair '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Conventional,
    Dirac,
    Diabolic,
    Inconclusive,
}

/// Decision thresholds for EP claims and classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// EP claim: overlap strictly above this.
    pub overlap: f64,
    /// EP claim: phase rigidity strictly below this.
    pub rigidity: f64,
    /// Diabolic: overlap strictly below this with a closed gap.
    pub diabolic_overlap: f64,
    /// Gap regarded as closed.
    pub gap_tol: f64,
    /// `|Im Δω|` above this marks the broken side.
    pub broken_im: f64,
    /// `|Im ω|` at or below this counts as real.
    pub real_im: f64,
    /// Offsets from the EP sampled by the classifier.
    pub deltas: Vec<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            overlap: 0.999,
            rigidity: 0.02,
            diabolic_overlap: 0.5,
            gap_tol: 1e-4,
            broken_im: 1e-6,
            real_im: 1e-9,
            deltas: vec![0.01, 0.02, 0.05],
        }
    }
}

/// Truncation and thresholds shared by the scan routines.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EpConfig {
    pub truncation: usize,
    pub thresholds: Thresholds,
    /// Coarse samples before the golden-section refinement.
    pub coarse_points: usize,
    /// Golden-section stopping width in τ.
    pub tau_tol: f64,
}

impl Default for EpConfig {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            thresholds: Thresholds::default(),
            coarse_points: 41,
            tau_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoalescenceMetrics {
    pub gap: f64,
    pub overlap: f64,
    pub phase_rigidity: f64,
}

/// Gap, right-eigenvector overlap and phase rigidity of a band pair.
pub fn coalescence_metrics(h: &ArrayView2<Complex64>, pair: BandPair) -> Result<CoalescenceMetrics> {
    let right = eig(h)?;
    pair.check(right.len())?;
    let (i, j) = pair.indices();
    let (li, lj) = (right.eigenvalues()[i], right.eigenvalues()[j]);
    let (vi, vj) = (right.vector(i), right.vector(j));
    let overlap: Complex64 = vi.iter().zip(vj.iter()).map(|(a, b)| a.conj() * b).sum();

    // left eigenvectors: right eigenvectors of Hᴴ at conj(λ)
    let hh = h.t().mapv(|z| z.conj());
    let left = eig(&hh.view())?;
    let target = li.conj();
    let li_idx = (0..left.len())
        .min_by(|&a, &b| {
            (left.eigenvalues()[a] - target)
                .norm()
                .total_cmp(&(left.eigenvalues()[b] - target).norm())
        })
        .ok_or(Error::EmptyMatrix)?;
    let vl = left.vector(li_idx);
    let lr: Complex64 = vl.iter().zip(vi.iter()).map(|(a, b)| a.conj() * b).sum();
    let rigidity = lr.norm() / (vec_norm(&vl) * vec_norm(&vi));

    Ok(CoalescenceMetrics {
        gap: (lj - li).norm(),
        overlap: overlap.norm().min(1.0),
        phase_rigidity: rigidity.min(1.0),
    })
}

/// Energies of `pair` for the family at `(k, τ)`.
fn pair_energies(
    family: &PotentialFamily,
    k: f64,
    tau: f64,
    pair: BandPair,
    truncation: usize,
) -> Result<(Complex64, Complex64)> {
    let h = build_bloch(&family.at(tau), k, truncation)?;
    let values = eig_values_only(&h.matrix().view()).map_err(|e| e.at_k(k))?;
    pair.check(values.len())?;
    let (i, j) = pair.indices();
    Ok((values[i], values[j]))
}

fn pair_gap(family: &PotentialFamily, k: f64, tau: f64, pair: BandPair, m: usize) -> Result<f64> {
    let (a, b) = pair_energies(family, k, tau, pair, m)?;
    Ok((b - a).norm())
}

/// Outcome of sampling both sides of a candidate EP.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyOutcome {
    pub classification: Classification,
    /// Side with a complex pair (conventional EPs only).
    pub broken_side: Option<Side>,
    pub samples: Vec<SideSample>,
    pub diagnostics: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SideSample {
    pub side: Side,
    pub delta: f64,
    pub tau: f64,
    /// `|Im(ω_{n+1} − ω_n)|`.
    pub im_splitting: f64,
    /// `max(|Im ω_n|, |Im ω_{n+1}|)`.
    pub max_abs_im: f64,
}

/// Conventional vs Dirac by the behaviour of the pair at `τ_ep ± δ`.
pub fn classify_ep(
    family: &PotentialFamily,
    k: f64,
    pair: BandPair,
    tau_ep: f64,
    config: &EpConfig,
) -> Result<ClassifyOutcome> {
    let th = &config.thresholds;
    let jobs: Vec<(Side, f64)> = th
        .deltas
        .iter()
        .flat_map(|&d| [(Side::Below, d), (Side::Above, d)])
        .collect();
    let samples: Vec<SideSample> = jobs
        .par_iter()
        .map(|&(side, delta)| {
            let tau = side.apply(tau_ep, delta);
            let (a, b) = pair_energies(family, k, tau, pair, config.truncation)?;
            Ok(SideSample {
                side,
                delta,
                tau,
                im_splitting: (b - a).im.abs(),
                max_abs_im: a.im.abs().max(b.im.abs()),
            })
        })
        .collect::<Result<_>>()?;

    let side_max = |side: Side, f: fn(&SideSample) -> f64| {
        samples
            .iter()
            .filter(|s| s.side == side)
            .map(f)
            .fold(0.0, f64::max)
    };
    let below_split = side_max(Side::Below, |s| s.im_splitting);
    let above_split = side_max(Side::Above, |s| s.im_splitting);
    let max_im = side_max(Side::Below, |s| s.max_abs_im).max(side_max(Side::Above, |s| s.max_abs_im));

    let broken_below = below_split > th.broken_im;
    let broken_above = above_split > th.broken_im;
    let (classification, broken_side, diagnostics) = if broken_below != broken_above {
        let side = if broken_below { Side::Below } else { Side::Above };
        (Classification::Conventional, Some(side), None)
    } else if max_im <= th.real_im {
        (Classification::Dirac, None, None)
    } else {
        let note = format!(
            "max |Im Δω| below {below_split:.3e}, above {above_split:.3e}; max |Im ω| {max_im:.3e}"
        );
        (Classification::Inconclusive, None, Some(note))
    };
    Ok(ClassifyOutcome {
        classification,
        broken_side,
        samples,
        diagnostics,
    })
}

/// Result of a gap-minimization scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpReport {
    pub family: PotentialFamily,
    pub k: f64,
    pub tau: f64,
    pub band_pair: BandPair,
    pub min_gap: f64,
    pub overlap_at_min: f64,
    pub phase_rigidity_at_min: f64,
    pub classification: Classification,
    pub dispersion_exponent: Option<DispersionFit>,
    pub diagnostics: Vec<String>,
}

impl EpReport {
    /// Whether the coalescence thresholds for an EP claim are met.
    pub fn is_ep(&self, thresholds: &Thresholds) -> bool {
        self.overlap_at_min > thresholds.overlap && self.phase_rigidity_at_min < thresholds.rigidity
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const DENSE_STEP: f64 = 1e-4;

/// Locates the gap minimum of `pair` over `τ ∈ window` at fixed `k`, then
/// measures coalescence there and classifies.
pub fn ep_scan(
    family: &PotentialFamily,
    k: f64,
    pair: BandPair,
    window: (f64, f64),
    config: &EpConfig,
) -> Result<EpReport> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!("bad τ window ({lo}, {hi})")));
    }
    let m = config.truncation;
    let gap = |tau: f64| pair_gap(family, k, tau, pair, m);
    let mut diagnostics = Vec::new();

    let bracket = match coarse_bracket(&gap, lo, hi, config.coarse_points.max(5))? {
        Some(b) => Some(b),
        None => {
            diagnostics.push("coarse scan failed to bracket; dense scan".to_string());
            let count = (((hi - lo) / DENSE_STEP).ceil() as usize + 1).max(5);
            coarse_bracket(&gap, lo, hi, count)?
        }
    };

    let Some((a, b)) = bracket else {
        let (tau, g) = edge_min(&gap, lo, hi)?;
        diagnostics.push("no interior gap minimum in window".to_string());
        let metrics = metrics_at(family, k, tau, pair, m)?;
        return Ok(EpReport {
            family: *family,
            k,
            tau,
            band_pair: pair,
            min_gap: g,
            overlap_at_min: metrics.overlap,
            phase_rigidity_at_min: metrics.phase_rigidity,
            classification: Classification::Inconclusive,
            dispersion_exponent: None,
            diagnostics,
        });
    };

    let (tau, min_gap) = golden_section(&gap, a, b, config.tau_tol)?;
    let metrics = metrics_at(family, k, tau, pair, m)?;
    let th = &config.thresholds;
    let mut report = EpReport {
        family: *family,
        k,
        tau,
        band_pair: pair,
        min_gap,
        overlap_at_min: metrics.overlap,
        phase_rigidity_at_min: metrics.phase_rigidity,
        classification: Classification::Inconclusive,
        dispersion_exponent: None,
        diagnostics,
    };

    if report.is_ep(th) {
        let outcome = classify_ep(family, k, pair, tau, config)?;
        report.classification = outcome.classification;
        if let Some(d) = outcome.diagnostics {
            report.diagnostics.push(d);
        }
        let side = match outcome.classification {
            Classification::Conventional => outcome.broken_side,
            Classification::Dirac => Some(Side::Below),
            _ => None,
        };
        if let Some(side) = side {
            match dispersion_exponent(family, k, pair, tau, side, config) {
                Ok(fit) => report.dispersion_exponent = Some(fit),
                Err(e) => report.diagnostics.push(format!("dispersion fit: {e}")),
            }
        }
    } else if min_gap < th.gap_tol && metrics.overlap < th.diabolic_overlap {
        report.classification = Classification::Diabolic;
    } else {
        report.diagnostics.push(format!(
            "coalescence thresholds not met (overlap {:.6}, rigidity {:.3e})",
            metrics.overlap, metrics.phase_rigidity
        ));
    }
    Ok(report)
}

fn metrics_at(
    family: &PotentialFamily,
    k: f64,
    tau: f64,
    pair: BandPair,
    m: usize,
) -> Result<CoalescenceMetrics> {
    let h = build_bloch(&family.at(tau), k, m)?;
    coalescence_metrics(&h.matrix().view(), pair).map_err(|e| e.at_k(k))
}

/// Samples `count` points and returns the neighbours of an interior minimum.
fn coarse_bracket<F>(f: &F, lo: f64, hi: f64, count: usize) -> Result<Option<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let taus = crate::bands::linspace(lo, hi, count);
    let values: Vec<f64> = taus.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let (imin, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidArgument("empty scan".into()))?;
    if imin == 0 || imin == count - 1 {
        return Ok(None);
    }
    Ok(Some((taus[imin - 1], taus[imin + 1])))
}

fn edge_min<F>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (a, b) = (f(lo)?, f(hi)?);
    Ok(if a <= b { (lo, a) } else { (hi, b) })
}

/// Golden-section minimization on `[a, b]` down to width `tol`.
fn golden_section<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}
