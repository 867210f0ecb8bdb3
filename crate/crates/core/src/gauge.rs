//! Imaginary (and complex) gauge transformations in momentum space.
//!
//! Multiplying the plane-wave coefficient `a_m` by `e^{imθ}` maps
//! `H_k → G H_k G⁻¹` with `G = diag(e^{imθ})`. The diagonal `(m + k)²` is
//! untouched while the coupling at harmonic distance `d` picks up
//! `e^{idθ} = s^d`. Choosing `s = √(c₋₁ / c₊₁)` makes the nearest-neighbour
//! couplings symmetric; next-nearest-neighbour couplings follow along only
//! when `c₋₂ = s⁴ c₊₂`.

use std::f64::consts::FRAC_PI_2;

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pt_symmetric, BlochHamiltonian, PotentialSpec};

/// Relative tolerance of the NNN condition `c₋₂ = s⁴ c₊₂`.
pub const NNN_CONDITION_TOL: f64 = 1e-12;

/// Which kind of transformation the angle represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeRegime {
    /// `t₋ t₊ > 0` (τ < 1): purely imaginary θ.
    Imaginary,
    /// `t₋ t₊ < 0` (τ > 1): `Re θ = π/2`.
    Complex,
    /// `t₋ = 0` (τ = 1): no transformation exists.
    Undefined,
}

/// Gauge angle `θ = (i/2) ln(t₊/t₋)`, with `Re θ = +π/2` on the complex branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeAngle {
    theta: Option<Complex64>,
    regime: GaugeRegime,
}

impl GaugeAngle {
    pub fn identity() -> Self {
        GaugeAngle {
            theta: Some(Complex64::new(0.0, 0.0)),
            regime: GaugeRegime::Imaginary,
        }
    }

    /// Angle from the ratio `c₋₁ / c₊₁` of (possibly complex) couplings.
    pub fn from_ratio(ratio: Complex64) -> Self {
        if ratio.norm() == 0.0 {
            return GaugeAngle {
                theta: None,
                regime: GaugeRegime::Undefined,
            };
        }
        let s = ratio.sqrt();
        // θ = -i ln s
        let theta = Complex64::new(0.0, -1.0) * s.ln();
        let regime = if ratio.im == 0.0 && ratio.re < 0.0 {
            GaugeRegime::Complex
        } else {
            GaugeRegime::Imaginary
        };
        GaugeAngle {
            theta: Some(theta),
            regime,
        }
    }

    /// `None` in the undefined regime.
    pub fn theta(&self) -> Option<Complex64> {
        self.theta
    }

    pub fn regime(&self) -> GaugeRegime {
        self.regime
    }

    /// `s = e^{iθ}`, the per-harmonic scale factor.
    pub fn scale(&self) -> Result<Complex64> {
        let theta = self.theta.ok_or(Error::UndefinedGauge)?;
        Ok((Complex64::new(0.0, 1.0) * theta).exp())
    }

    /// `e^{imθ}`.
    pub fn factor(&self, m: i32) -> Result<Complex64> {
        let theta = self.theta.ok_or(Error::UndefinedGauge)?;
        Ok((Complex64::new(0.0, m as f64) * theta).exp())
    }
}

/// Gauge angle that symmetrizes real couplings `t₋` (above the diagonal)
/// and `t₊` (below it).
pub fn gauge_angle(t_minus: f64, t_plus: f64) -> Result<GaugeAngle> {
    if t_plus == 0.0 || !t_plus.is_finite() || !t_minus.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_+ must be finite and nonzero (t_- = {t_minus}, t_+ = {t_plus})"
        )));
    }
    if t_minus == 0.0 {
        return Ok(GaugeAngle {
            theta: None,
            regime: GaugeRegime::Undefined,
        });
    }
    let ratio = t_plus / t_minus;
    let (theta, regime) = if ratio > 0.0 {
        (Complex64::new(0.0, 0.5 * ratio.ln()), GaugeRegime::Imaginary)
    } else {
        (
            Complex64::new(FRAC_PI_2, 0.5 * (-ratio).ln()),
            GaugeRegime::Complex,
        )
    };
    Ok(GaugeAngle {
        theta: Some(theta),
        regime,
    })
}

/// `G H G⁻¹`. The diagonal is copied verbatim.
pub fn apply_gauge(h: &BlochHamiltonian, angle: &GaugeAngle) -> Result<BlochHamiltonian> {
    if angle.regime() == GaugeRegime::Undefined {
        return Err(Error::UndefinedGauge);
    }
    let src = h.matrix();
    let n = h.dim();
    let m_max = h.truncation() as i32;
    // e^{idθ} for every harmonic distance d ∈ [-2M, 2M]
    let factors: Vec<Complex64> = (-2 * m_max..=2 * m_max)
        .map(|d| angle.factor(d))
        .collect::<Result<_>>()?;
    let offset = (2 * m_max) as isize;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let a = src[[i, j]];
            if i == j {
                out[[i, j]] = a;
            } else if a != zero {
                let d = i as isize - j as isize;
                out[[i, j]] = a * factors[(d + offset) as usize];
            }
        }
    }
    Ok(BlochHamiltonian::from_parts(h.k(), h.truncation(), out))
}

/// `G v`: component `m` of a momentum-space vector times `e^{imθ}`.
/// `v` is indexed by `m ∈ [-M, M]` with `M = (len - 1) / 2`.
pub fn gauge_vector(v: &ArrayView1<Complex64>, angle: &GaugeAngle) -> Result<Array1<Complex64>> {
    let half = (v.len() / 2) as i32;
    let mut out = Array1::zeros(v.len());
    for (i, &a) in v.iter().enumerate() {
        out[i] = a * angle.factor(i as i32 - half)?;
    }
    Ok(out)
}

/// `G⁻¹ v`.
pub fn inverse_gauge_vector(
    v: &ArrayView1<Complex64>,
    angle: &GaugeAngle,
) -> Result<Array1<Complex64>> {
    let half = (v.len() / 2) as i32;
    let mut out = Array1::zeros(v.len());
    for (i, &a) in v.iter().enumerate() {
        out[i] = a * angle.factor(half - i as i32)?;
    }
    Ok(out)
}

/// Angle read off a potential's nearest-neighbour harmonics.
pub fn potential_angle(potential: &PotentialSpec) -> Result<GaugeAngle> {
    let cp = potential.coefficient(1);
    let cm = potential.coefficient(-1);
    if cp.norm() == 0.0 {
        return Err(Error::InvalidPotential(
            "c_{+1} must be nonzero to define a gauge angle".into(),
        ));
    }
    if cp.im == 0.0 && cm.im == 0.0 {
        gauge_angle(cm.re, cp.re)
    } else {
        Ok(GaugeAngle::from_ratio(cm / cp))
    }
}

/// Why a potential is (not) eligible.
fn eligibility(potential: &PotentialSpec) -> Result<std::result::Result<GaugeAngle, String>> {
    let bw = potential.bandwidth();
    if bw > 2 {
        return Err(Error::UnsupportedBandwidth(bw));
    }
    let cp1 = potential.coefficient(1);
    let cm1 = potential.coefficient(-1);
    if cp1.norm() == 0.0 {
        return Err(Error::InvalidPotential(
            "symmetrization needs a nonzero c_{+1}".into(),
        ));
    }
    if cm1.norm() == 0.0 {
        return Ok(Err(
            "c_{-1} = 0 (tau = 1): the gauge angle is undefined".into()
        ));
    }
    let angle = potential_angle(potential)?;
    let s = angle.scale()?;
    let cp2 = potential.coefficient(2);
    let cm2 = potential.coefficient(-2);
    let target = s.powi(4) * cp2;
    let scale = cm2.norm().max(target.norm());
    if scale > 0.0 && (cm2 - target).norm() > NNN_CONDITION_TOL * scale {
        return Ok(Err(format!(
            "NNN couplings violate c_(-2) = s^4 c_(+2): c_(-2) = {cm2}, s^4 c_(+2) = {target}"
        )));
    }
    Ok(Ok(angle))
}

/// Whether the momentum-space gauge makes every coupling symmetric.
/// Only bandwidth ≤ 2 is supported.
pub fn symmetrizable(potential: &PotentialSpec) -> Result<bool> {
    Ok(eligibility(potential)?.is_ok())
}

/// Character of the gauge-equivalent potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Character {
    /// All coefficients real and symmetric: a real potential.
    RealHermitian,
    /// All coefficients purely imaginary.
    PurelyImaginary,
    /// Symmetric but with both real and imaginary coefficients.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceResult {
    pub eligible: bool,
    /// Failed condition when not eligible.
    pub reason: Option<String>,
    pub angle: Option<GaugeAngle>,
    pub transformed_potential: Option<PotentialSpec>,
    pub character: Option<Character>,
}

/// Eligibility check plus, when eligible, the gauge-equivalent potential.
/// Never fails on ineligibility; see [`hermitian_equivalent`] for the
/// refusing variant.
pub fn equivalence(potential: &PotentialSpec) -> Result<EquivalenceResult> {
    let angle = match eligibility(potential)? {
        Ok(angle) => angle,
        Err(reason) => {
            return Ok(EquivalenceResult {
                eligible: false,
                reason: Some(reason),
                angle: None,
                transformed_potential: None,
                character: None,
            })
        }
    };
    let s = angle.scale()?;
    let mut coeffs = Vec::new();
    let c0 = potential.coefficient(0);
    if c0.norm() > 0.0 {
        coeffs.push((0, c0));
    }
    for d in 1..=2 {
        let c = potential.coefficient(d);
        if c.norm() == 0.0 {
            continue;
        }
        let symmetric = s.powi(d) * c;
        coeffs.push((d, symmetric));
        coeffs.push((-d, symmetric));
    }
    let scale = coeffs.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let tol = 1e-14 * scale.max(1.0);
    let all_real = coeffs.iter().all(|(_, c)| c.im.abs() <= tol);
    let all_imag = coeffs.iter().all(|(_, c)| c.re.abs() <= tol);
    let character = if all_real {
        for (_, c) in coeffs.iter_mut() {
            c.im = 0.0;
        }
        Character::RealHermitian
    } else if all_imag {
        for (_, c) in coeffs.iter_mut() {
            c.re = 0.0;
        }
        Character::PurelyImaginary
    } else {
        Character::Mixed
    };
    let transformed = PotentialSpec::with_period(
        format!("gauge-equivalent of {}", potential.label()),
        potential.period(),
        coeffs,
    )?;
    Ok(EquivalenceResult {
        eligible: true,
        reason: None,
        angle: Some(angle),
        transformed_potential: Some(transformed),
        character: Some(character),
    })
}

/// The symmetric-coupling potential equivalent to `potential`, or an
/// [`Error::Ineligible`] naming the failed condition.
pub fn hermitian_equivalent(potential: &PotentialSpec) -> Result<EquivalenceResult> {
    let result = equivalence(potential)?;
    if !result.eligible {
        return Err(Error::Ineligible(result.reason.unwrap_or_default()));
    }
    Ok(result)
}

/// An asymmetric coupling pair at harmonic distance `order`:
/// `t_minus` above the diagonal, `t_plus` below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPair {
    pub order: u32,
    pub t_minus: f64,
    pub t_plus: f64,
}

impl CouplingPair {
    pub fn is_symmetric(&self) -> bool {
        self.t_minus == self.t_plus
    }
}

/// A PT-symmetric potential rewritten as on-site energy plus asymmetric
/// hoppings in momentum space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonalForm {
    pub onsite: f64,
    pub couplings: Vec<CouplingPair>,
}

impl OffDiagonalForm {
    pub fn pair(&self, order: u32) -> Option<&CouplingPair> {
        self.couplings.iter().find(|p| p.order == order)
    }
}

/// Reads the coupling pairs `(c₋d, c₊d)` off a PT-symmetric potential.
pub fn off_diagonal_form(potential: &PotentialSpec) -> Result<OffDiagonalForm> {
    if !pt_symmetric(potential) {
        return Err(Error::InvalidPotential(
            "off-diagonal form needs a PT-symmetric potential (all c_m real)".into(),
        ));
    }
    let bw = potential.bandwidth() as u32;
    let couplings = (1..=bw)
        .filter_map(|d| {
            let tp = potential.coefficient(d as i32).re;
            let tm = potential.coefficient(-(d as i32)).re;
            (tp != 0.0 || tm != 0.0).then_some(CouplingPair {
                order: d,
                t_minus: tm,
                t_plus: tp,
            })
        })
        .collect();
    Ok(OffDiagonalForm {
        onsite: potential.coefficient(0).re,
        couplings,
    })
}

/// Hamiltonian of `V(x) = V0 [cos x + iτ cos(x/2)]` on `[0, 2π]` with
/// Dirichlet walls, in the standing-wave basis `sin(m x / 2)`, `m = 1..=n`.
pub fn dirichlet_negative_control(v0: f64, tau: f64, n: usize) -> Result<Array2<Complex64>> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "standing-wave basis needs at least 4 modes, got {n}"
        )));
    }
    let v = v0 / 2.0;
    let nn = Complex64::new(0.0, tau * v);
    let nnn = Complex64::new(v, 0.0);
    let mut h = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        let m = (i + 1) as f64;
        h[[i, i]] = Complex64::new((m / 2.0).powi(2), 0.0);
        if i + 1 < n {
            h[[i, i + 1]] = nn;
            h[[i + 1, i]] = nn;
        }
        if i + 2 < n {
            h[[i, i + 2]] = nnn;
            h[[i + 2, i]] = nnn;
        }
    }
    // sin²(x/2) overlaps with cos x
    h[[0, 0]] -= v;
    Ok(h)
}

/// Exact entrywise `H[i, j] == H[j, i]`.
pub fn couplings_symmetric(h: &Array2<Complex64>) -> bool {
    let n = h.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| h[[i, j]] == h[[j, i]]))
}
