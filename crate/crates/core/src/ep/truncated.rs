//! Few-mode truncations of `H_k` around the EPs, with closed-form spectra
//! where they exist.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::sort_canonical;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelName {
    /// Two modes at the zone edge.
    H2,
    /// Three modes at the zone centre.
    H3,
    /// `H3` with next-nearest couplings, `ω = V₀/2` (solvable variant).
    #[serde(rename = "H3_nnn")]
    H3Nnn,
    /// `H3` with next-nearest couplings, `ω = 1` (value at `k = 0`).
    #[serde(rename = "H3_nnn_physical")]
    H3NnnPhysical,
    /// Four modes at the zone edge with next-nearest couplings.
    H4,
}

impl ModelName {
    pub const ALL: [ModelName; 5] = [
        ModelName::H2,
        ModelName::H3,
        ModelName::H3Nnn,
        ModelName::H3NnnPhysical,
        ModelName::H4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::H2 => "H2",
            ModelName::H3 => "H3",
            ModelName::H3Nnn => "H3_nnn",
            ModelName::H3NnnPhysical => "H3_nnn_physical",
            ModelName::H4 => "H4",
        }
    }
}

impl std::str::FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown truncated model '{s}'")))
    }
}

/// Replacement diagonal energies.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct ModelOverrides {
    pub omega: Option<f64>,
    pub omega_prime: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncatedModel {
    pub name: ModelName,
    pub v0: f64,
    pub tau: f64,
    pub omega: f64,
    pub omega_prime: Option<f64>,
    pub t_minus: f64,
    pub t_plus: f64,
    #[serde(skip)]
    pub matrix: Array2<Complex64>,
    /// Canonically ordered, when a closed form is known.
    pub closed_form: Option<Vec<Complex64>>,
}

impl TruncatedModel {
    /// `t = √(t₋t₊)`, imaginary in the broken phase.
    pub fn t(&self) -> Complex64 {
        Complex64::new(self.t_minus * self.t_plus, 0.0).sqrt()
    }
}

/// `ω² + 8t²`: the `H3` pair `ω, (ω + √(ω² + 8t²))/2` is real iff this is
/// non-negative.
pub fn h3_discriminant(omega: f64, v0: f64, tau: f64) -> f64 {
    let t2 = 0.25 * v0 * v0 * (1.0 - tau * tau);
    omega * omega + 8.0 * t2
}

fn default_omega(name: ModelName, v0: f64) -> f64 {
    match name {
        ModelName::H2 | ModelName::H4 => 0.25,
        ModelName::H3 | ModelName::H3NnnPhysical => 1.0,
        ModelName::H3Nnn => 0.5 * v0,
    }
}

pub fn truncated_model(
    name: ModelName,
    v0: f64,
    tau: f64,
    overrides: ModelOverrides,
) -> Result<TruncatedModel> {
    if !(v0.is_finite() && tau.is_finite()) {
        return Err(Error::NonFinite);
    }
    let omega = overrides.omega.unwrap_or_else(|| default_omega(name, v0));
    let omega_prime = (name == ModelName::H4).then(|| overrides.omega_prime.unwrap_or(2.25));
    let tm = 0.5 * v0 * (1.0 - tau);
    let tp = 0.5 * v0 * (1.0 + tau);
    let c = |x: f64| Complex64::new(x, 0.0);
    let (w, m, p) = (c(omega), c(tm), c(tp));
    let z = c(0.0);
    let rows: Vec<Vec<Complex64>> = match name {
        ModelName::H2 => vec![vec![w, m], vec![p, w]],
        ModelName::H3 => vec![vec![w, m, z], vec![p, z, m], vec![z, p, w]],
        ModelName::H3Nnn | ModelName::H3NnnPhysical => {
            vec![vec![w, m, m], vec![p, z, m], vec![p, p, w]]
        }
        ModelName::H4 => {
            let wp = c(omega_prime.unwrap_or(2.25));
            vec![
                vec![wp, m, m, z],
                vec![p, w, m, m],
                vec![p, p, w, m],
                vec![z, p, p, wp],
            ]
        }
    };
    let n = rows.len();
    let matrix = Array2::from_shape_vec((n, n), rows.into_iter().flatten().collect())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let t = Complex64::new(tm * tp, 0.0).sqrt();
    let closed = match name {
        ModelName::H2 => Some(vec![w - t, w + t]),
        ModelName::H3 => {
            let r = (w * w + 8.0 * t * t).sqrt();
            Some(vec![w, (w + r) / 2.0, (w - r) / 2.0])
        }
        ModelName::H3Nnn | ModelName::H3NnnPhysical => {
            let solvable = (omega - 0.5 * v0).abs() <= 1e-15 * omega.abs().max(1.0);
            solvable.then(|| vec![c(0.0), w + 3f64.sqrt() * t, w - 3f64.sqrt() * t])
        }
        ModelName::H4 => None,
    };
    let closed_form = closed.map(|mut v| {
        sort_canonical(&mut v);
        v
    });
    Ok(TruncatedModel {
        name,
        v0,
        tau,
        omega,
        omega_prime,
        t_minus: tm,
        t_plus: tp,
        matrix,
        closed_form,
    })
}
