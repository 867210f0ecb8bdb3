//! Adiabatic continuation of eigenstates around closed parameter loops.

use std::f64::consts::TAU;

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::eig;
use crate::error::{Error, Result};

const MIN_STEPS: usize = 256;
const CONTINUITY_FLOOR: f64 = 0.9;
const REFINEMENTS: usize = 2;

/// Closed loop in a two-parameter plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "shape")]
pub enum LoopPath {
    /// Counter-clockwise, starting at `center + (radius, 0)`.
    Circle { center: (f64, f64), radius: f64 },
    /// Vertices of a closed polygon; the last vertex joins the first.
    Polyline { vertices: Vec<(f64, f64)> },
}

impl LoopPath {
    pub fn circle(center: (f64, f64), radius: f64) -> Self {
        LoopPath::Circle { center, radius }
    }

    /// Point at arc-length fraction `s ∈ [0, 1]`.
    pub fn point(&self, s: f64) -> (f64, f64) {
        match self {
            LoopPath::Circle { center, radius } => {
                let a = TAU * s;
                (center.0 + radius * a.cos(), center.1 + radius * a.sin())
            }
            LoopPath::Polyline { vertices } => {
                let n = vertices.len();
                let seg = |i: usize| {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    (b.0 - a.0).hypot(b.1 - a.1)
                };
                let total: f64 = (0..n).map(seg).sum();
                let mut target = s.rem_euclid(1.0) * total;
                for i in 0..n {
                    let l = seg(i);
                    if target <= l || i == n - 1 {
                        let f = if l > 0.0 { (target / l).min(1.0) } else { 0.0 };
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        return (a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1));
                    }
                    target -= l;
                }
                vertices[0]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            LoopPath::Circle { radius, .. } if !(*radius > 0.0 && radius.is_finite()) => {
                Err(Error::InvalidArgument("loop radius must be positive".into()))
            }
            LoopPath::Polyline { vertices } if vertices.len() < 3 => {
                Err(Error::InvalidArgument("polyline loop needs at least 3 vertices".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopResult {
    /// `(start, end)` canonical indices for every tracked state.
    pub permutation: Vec<(usize, usize)>,
    /// Smallest step-to-step overlap along the loop.
    pub continuity_floor: f64,
    /// Step index where the floor occurred.
    pub worst_step: usize,
    pub steps: usize,
}

impl LoopResult {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().all(|(a, b)| a == b)
    }

    /// Two states exchanged, any others fixed.
    pub fn is_transposition(&self) -> bool {
        self.permutation.iter().filter(|(a, b)| a != b).count() == 2
    }
}

fn overlap(a: &ArrayView1<Complex64>, b: &ArrayView1<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm()
}

/// Follows the eigenstates at canonical indices `states` once around `path`
/// for the matrix family `h(p, q)`. Refines the step count up to twice if
/// the continuity floor is not above 0.9.
pub fn encircle<F>(h: F, path: &LoopPath, steps: usize, states: &[usize]) -> Result<LoopResult>
where
    F: Fn(f64, f64) -> Result<Array2<Complex64>>,
{
    path.validate()?;
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "loop needs at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    if states.is_empty() {
        return Err(Error::InvalidArgument("no states to track".into()));
    }
    let mut steps = steps;
    let mut last = None;
    for _ in 0..=REFINEMENTS {
        let r = track(&h, path, steps, states)?;
        if r.continuity_floor > CONTINUITY_FLOOR {
            return Ok(r);
        }
        log::debug!("loop floor {:.4} at {} steps; refining", r.continuity_floor, steps);
        last = Some(r);
        steps *= 2;
    }
    let r = last.expect("at least one attempt");
    Err(Error::LoopDiscontinuity {
        floor: r.continuity_floor,
        step: r.worst_step,
        steps: r.steps,
    })
}

fn track<F>(h: &F, path: &LoopPath, steps: usize, states: &[usize]) -> Result<LoopResult>
where
    F: Fn(f64, f64) -> Result<Array2<Complex64>>,
{
    let (p0, q0) = path.point(0.0);
    let start = eig(&h(p0, q0)?.view())?;
    if let Some(&bad) = states.iter().find(|&&s| s >= start.len()) {
        return Err(Error::BandOutOfRange(bad + 1, bad + 1, start.len()));
    }
    let mut current: Vec<ndarray::Array1<Complex64>> =
        states.iter().map(|&s| start.vector(s).to_owned()).collect();
    let mut index: Vec<usize> = states.to_vec();
    let mut floor = f64::INFINITY;
    let mut worst = 0;

    for step in 1..=steps {
        let s = step as f64 / steps as f64;
        let (p, q) = if step == steps { (p0, q0) } else { path.point(s) };
        let d = eig(&h(p, q)?.view())?;
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(current.len() * d.len());
        for (i, v) in current.iter().enumerate() {
            for j in 0..d.len() {
                pairs.push((overlap(&v.view(), &d.vector(j)), i, j));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut assigned = vec![usize::MAX; current.len()];
        let mut taken = vec![false; d.len()];
        for (ov, i, j) in pairs {
            if assigned[i] == usize::MAX && !taken[j] {
                assigned[i] = j;
                taken[j] = true;
                if ov < floor {
                    floor = ov;
                    worst = step;
                }
            }
        }
        for (i, &j) in assigned.iter().enumerate() {
            current[i] = d.vector(j).to_owned();
            index[i] = j;
        }
    }

    let mut ends: Vec<usize> = index.clone();
    let mut starts: Vec<usize> = states.to_vec();
    ends.sort_unstable();
    starts.sort_unstable();
    if ends != starts {
        return Err(Error::LoopEscaped {
            start: states.to_vec(),
            end: index,
        });
    }
    Ok(LoopResult {
        permutation: states.iter().copied().zip(index).collect(),
        continuity_floor: floor,
        worst_step: worst,
        steps,
    })
}
