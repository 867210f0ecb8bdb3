//! Periodic complex potentials and their truncated momentum-space Bloch
//! Hamiltonians.
//!
//! A potential is stored as its Fourier series
//!
//! ```text
//! V(x) = Σ_m c_m exp(i m G x),    G = 2π / period
//! ```
//!
//! and the Bloch Hamiltonian at crystal momentum `k` (in units of `G`) acts on
//! the plane-wave coefficients `a_m`, `m ∈ [-M, M]`:
//!
//! ```text
//! H_k[m, m] = ((m + k) G)^2 + c_0
//! H_k[m, m'] = c_{m - m'}
//! ```
//!
//! For the default period `2π` this is the familiar tight-binding-like matrix
//! with `H_k[m, m-1] = c_{+1}` (written `t_+` for the `V_1` family) and
//! `H_k[m, m+1] = c_{-1}` (`t_-`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use log::warn;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default plane-wave truncation `M` (matrix dimension `2M + 1`).
pub const DEFAULT_TRUNCATION: usize = 32;

/// Coefficients with modulus below this are exact zeros and get pruned.
pub const PRUNE_THRESHOLD: f64 = 1e-300;

/// Tolerance on imaginary parts for the PT-symmetry predicate.
pub const PT_TOLERANCE: f64 = 1e-14;

/// A periodic potential given by finitely many Fourier harmonics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialDoc", into = "PotentialDoc")]
pub struct PotentialSpec {
    coefficients: BTreeMap<i32, Complex64>,
    period: f64,
    label: String,
}

impl PotentialSpec {
    /// Builds a potential with period `2π` from `(m, c_m)` pairs. Repeated
    /// harmonics are summed; exact zeros are pruned afterwards.
    pub fn new<I>(label: impl Into<String>, coefficients: I) -> Self
    where
        I: IntoIterator<Item = (i32, Complex64)>,
    {
        Self::with_period(label, 2.0 * PI, coefficients)
            .expect("2π is a valid period")
    }

    pub fn with_period<I>(label: impl Into<String>, period: f64, coefficients: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, Complex64)>,
    {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        let mut map = BTreeMap::new();
        for (m, c) in coefficients {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidPotential(format!(
                    "coefficient c_{m} is not finite"
                )));
            }
            *map.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
        Ok(Self {
            coefficients: map,
            period,
            label: label.into(),
        })
    }

    /// The zero potential (free particle).
    pub fn free() -> Self {
        Self::new("free", [])
    }

    /// `V_n(x) = V0 (cos nx + i τ sin nx)`: `c_{+n} = V0(1+τ)/2`, `c_{-n} = V0(1-τ)/2`.
    pub fn harmonic(n: i32, v0: f64, tau: f64) -> Self {
        assert!(n > 0, "harmonic order must be positive");
        Self::new(
            format!("V{n}(V0={v0},tau={tau})"),
            [
                (n, Complex64::new(v0 * (1.0 + tau) / 2.0, 0.0)),
                (-n, Complex64::new(v0 * (1.0 - tau) / 2.0, 0.0)),
            ],
        )
    }

    pub fn v1(v0: f64, tau: f64) -> Self {
        Self::harmonic(1, v0, tau)
    }

    pub fn v2(v0: f64, tau: f64) -> Self {
        Self::harmonic(2, v0, tau)
    }

    /// `V_1 + V_2`, whose NN and NNN couplings are the same pair `t_±`.
    pub fn v1_plus_v2(v0: f64, tau: f64) -> Self {
        Self::v1(v0, tau)
            .add(&Self::v2(v0, tau))
            .relabel(format!("V1+V2(V0={v0},tau={tau})"))
    }

    /// `V_1 + V0[(1+τ²) cos 2x + 2iτ sin 2x]`, i.e. NNN couplings
    /// `c_{±2} = V0 (1±τ)² / 2`.
    pub fn fig5(v0: f64, tau: f64) -> Self {
        let nnn = Self::new(
            "",
            [
                (2, Complex64::new(v0 * (1.0 + tau).powi(2) / 2.0, 0.0)),
                (-2, Complex64::new(v0 * (1.0 - tau).powi(2) / 2.0, 0.0)),
            ],
        );
        Self::v1(v0, tau)
            .add(&nnn)
            .relabel(format!("fig5(V0={v0},tau={tau})"))
    }

    /// `A cos(n x)` for a complex amplitude `A`.
    pub fn cosine(n: i32, amplitude: Complex64) -> Self {
        assert!(n > 0, "harmonic order must be positive");
        Self::new(
            format!("{amplitude}*cos({n}x)"),
            [(n, amplitude / 2.0), (-n, amplitude / 2.0)],
        )
    }

    /// Sum of two potentials. The periods must agree.
    pub fn add(&self, other: &PotentialSpec) -> Self {
        assert!(
            (self.period - other.period).abs() <= 1e-12 * self.period,
            "cannot add potentials with different periods"
        );
        Self::with_period(
            format!("{}+{}", self.label, other.label),
            self.period,
            self.coefficients
                .iter()
                .chain(other.coefficients.iter())
                .map(|(&m, &c)| (m, c)),
        )
        .expect("inputs already validated")
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Reciprocal lattice constant `2π / period`.
    pub fn reciprocal(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn coefficients(&self) -> &BTreeMap<i32, Complex64> {
        &self.coefficients
    }

    /// `c_m`, zero when the harmonic is absent.
    pub fn coefficient(&self, m: i32) -> Complex64 {
        self.coefficients
            .get(&m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Largest `|m|` among the harmonics (0 for a constant or zero potential).
    pub fn bandwidth(&self) -> usize {
        self.coefficients
            .keys()
            .map(|m| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `V(x)` in position space.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let g = self.reciprocal();
        self.coefficients
            .iter()
            .map(|(&m, &c)| c * Complex64::from_polar(1.0, m as f64 * g * x))
            .sum()
    }

    /// `c_{-m} = conj(c_m)` for every harmonic, i.e. `V(x)` is real.
    pub fn is_hermitian(&self) -> bool {
        self.coefficients.iter().all(|(&m, &c)| {
            let partner = self.coefficient(-m).conj();
            (c - partner).norm() <= PT_TOLERANCE * (1.0 + c.norm())
        })
    }
}

/// `V(x) = V*(-x)`, which for a Fourier series means every `c_m` is real.
pub fn pt_symmetric(potential: &PotentialSpec) -> bool {
    potential
        .coefficients
        .values()
        .all(|c| c.im.abs() <= PT_TOLERANCE)
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

#[derive(Serialize, Deserialize)]
struct PotentialDoc {
    label: String,
    period: f64,
    coefficients: Vec<CoefficientDoc>,
}

#[derive(Serialize, Deserialize)]
struct CoefficientDoc {
    m: i32,
    re: f64,
    im: f64,
}

impl TryFrom<PotentialDoc> for PotentialSpec {
    type Error = Error;

    fn try_from(doc: PotentialDoc) -> Result<Self> {
        PotentialSpec::with_period(
            doc.label,
            doc.period,
            doc.coefficients
                .into_iter()
                .map(|c| (c.m, Complex64::new(c.re, c.im))),
        )
    }
}

impl From<PotentialSpec> for PotentialDoc {
    fn from(p: PotentialSpec) -> Self {
        PotentialDoc {
            label: p.label,
            period: p.period,
            coefficients: p
                .coefficients
                .into_iter()
                .map(|(m, c)| CoefficientDoc {
                    m,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

/// One-parameter families `V(V0, τ)` used in the exceptional-point analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PotentialFamily {
    V1 { v0: f64 },
    V1PlusV2 { v0: f64 },
    Fig5 { v0: f64 },
}

impl PotentialFamily {
    pub fn at(&self, tau: f64) -> PotentialSpec {
        match *self {
            PotentialFamily::V1 { v0 } => PotentialSpec::v1(v0, tau),
            PotentialFamily::V1PlusV2 { v0 } => PotentialSpec::v1_plus_v2(v0, tau),
            PotentialFamily::Fig5 { v0 } => PotentialSpec::fig5(v0, tau),
        }
    }

    pub fn v0(&self) -> f64 {
        match *self {
            PotentialFamily::V1 { v0 }
            | PotentialFamily::V1PlusV2 { v0 }
            | PotentialFamily::Fig5 { v0 } => v0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialFamily::V1 { .. } => "V1",
            PotentialFamily::V1PlusV2 { .. } => "V1+V2",
            PotentialFamily::Fig5 { .. } => "fig5",
        }
    }
}

/// A parsed `NAME:V0[,tau]` shorthand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shorthand {
    pub family: PotentialFamily,
    pub tau: Option<f64>,
}

impl Shorthand {
    /// The concrete potential; fails when no `τ` was given.
    pub fn potential(&self) -> Result<PotentialSpec> {
        let tau = self.tau.ok_or_else(|| {
            Error::InvalidPotential(format!(
                "shorthand {} needs a tau value (NAME:V0,tau)",
                self.family.name()
            ))
        })?;
        Ok(self.family.at(tau))
    }
}

impl FromStr for Shorthand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidPotential(format!(
                "cannot parse potential shorthand {s:?}; expected V1:V0,tau | V1+V2:V0,tau | fig5:V0,tau"
            ))
        };
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let nums = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let (v0, tau) = match nums.as_slice() {
            [v0] => (*v0, None),
            [v0, tau] => (*v0, Some(*tau)),
            _ => return Err(bad()),
        };
        let family = match name.trim().to_ascii_lowercase().as_str() {
            "v1" => PotentialFamily::V1 { v0 },
            "v1+v2" => PotentialFamily::V1PlusV2 { v0 },
            "fig5" => PotentialFamily::Fig5 { v0 },
            _ => return Err(bad()),
        };
        Ok(Shorthand { family, tau })
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Shorthand>()?.potential()
    }
}

/// Folds `k` into the first Brillouin zone `[-0.5, 0.5]`.
pub fn fold_momentum(k: f64) -> f64 {
    if (-0.5..=0.5).contains(&k) {
        k
    } else {
        let folded = k - k.round();
        // k - round(k) lands in [-0.5, 0.5]; keep +0.5 for exact half-integers
        if (folded + 0.5).abs() < f64::EPSILON && k > 0.0 {
            0.5
        } else {
            folded
        }
    }
}

/// Truncated Bloch Hamiltonian over plane waves `m ∈ [-M, M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochHamiltonian {
    k: f64,
    truncation: usize,
    matrix: Array2<Complex64>,
}

impl BlochHamiltonian {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        2 * self.truncation + 1
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.matrix
    }

    /// Row/column index of plane wave `m`.
    pub fn index_of(&self, m: i32) -> Option<usize> {
        let idx = m + self.truncation as i32;
        (0..self.dim() as i32).contains(&idx).then_some(idx as usize)
    }

    /// Plane-wave index of row/column `i`.
    pub fn harmonic_of(&self, i: usize) -> i32 {
        i as i32 - self.truncation as i32
    }

    /// Plane-wave indices in matrix order.
    pub fn harmonics(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.dim()).map(|i| self.harmonic_of(i))
    }

    /// Wraps an already-assembled matrix (used by the gauge transform).
    pub(crate) fn from_parts(k: f64, truncation: usize, matrix: Array2<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), 2 * truncation + 1);
        Self {
            k,
            truncation,
            matrix,
        }
    }
}

/// Assembles `H_k` for `potential` at crystal momentum `k` with plane waves
/// `m ∈ [-truncation, truncation]`.
pub fn build_bloch(
    potential: &PotentialSpec,
    k: f64,
    truncation: usize,
) -> Result<BlochHamiltonian> {
    let bandwidth = potential.bandwidth();
    if truncation < bandwidth.max(1) {
        return Err(Error::TruncationTooSmall {
            truncation,
            bandwidth: bandwidth.max(1),
        });
    }
    if !k.is_finite() {
        return Err(Error::InvalidArgument(format!("k must be finite, got {k}")));
    }
    let folded = fold_momentum(k);
    if folded != k {
        warn!("k = {k} lies outside [-0.5, 0.5]; folded to {folded}");
    }

    let dim = 2 * truncation + 1;
    let g = potential.reciprocal();
    let c0 = potential.coefficient(0);
    let mut matrix = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        let m = i as f64 - truncation as f64;
        let q = (m + folded) * g;
        matrix[[i, i]] = Complex64::new(q * q, 0.0) + c0;
    }
    for (&d, &c) in potential.coefficients() {
        if d == 0 {
            continue;
        }
        // row m, column m' = m - d
        for i in 0..dim {
            let j = i as i64 - d as i64;
            if (0..dim as i64).contains(&j) {
                matrix[[i, j as usize]] = c;
            }
        }
    }
    Ok(BlochHamiltonian {
        k: folded,
        truncation,
        matrix,
    })
}
