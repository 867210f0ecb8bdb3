//! One function per subcommand.

use std::f64::consts::TAU;

use nhbloch::bands::{
    align_peak, band_sweep, bands_at, fd_band_oracle, linspace, participation_ratio,
    reconstruct_wavefunction, BandStructure,
};
use nhbloch::eig::{eig, eig_values_only};
use nhbloch::ep::{
    classify_ep, dispersion_exponent, encircle, ep_scan, k_dispersion_exponent,
    riemann_sheet_grid, truncated_model, two_level_model, BandPair, EpConfig, LoopPath,
    ModelName, ModelOverrides, Side,
};
use nhbloch::gauge::{
    equivalence, gauge_vector, hermitian_equivalent, off_diagonal_form, potential_angle,
    Character, GaugeAngle,
};
use nhbloch::model::{build_bloch, pt_symmetric, PotentialSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Basis, System, Vary};
use crate::config::{parse_pair, parse_range, Grid, Settings};
use crate::error::{CliError, Result};
use crate::output::Sink;
use crate::table::{col, Column, Table};

pub const BAND_COLUMNS: [Column; 4] = [
    col("k", "crystal momentum in units of 2π/a"),
    col("band", "band index, 1-based, ascending real part"),
    col("re_omega", "real part of the energy"),
    col("im_omega", "imaginary part of the energy"),
];

pub fn band_table(bs: &BandStructure) -> Table {
    let mut t = Table::new(BAND_COLUMNS.to_vec());
    for (ik, &k) in bs.k_grid().iter().enumerate() {
        for (b, e) in bs.energies_at(ik).iter().enumerate() {
            t.push(vec![k.into(), (b + 1).into(), e.re.into(), e.im.into()]);
        }
    }
    t
}

pub fn surface_columns() -> Vec<Column> {
    let mut c = vec![col("tau", "gain/loss parameter")];
    c.extend(BAND_COLUMNS);
    c
}

pub fn push_surface(t: &mut Table, tau: f64, bs: &BandStructure) {
    for (ik, &k) in bs.k_grid().iter().enumerate() {
        for (b, e) in bs.energies_at(ik).iter().enumerate() {
            t.push(vec![tau.into(), k.into(), (b + 1).into(), e.re.into(), e.im.into()]);
        }
    }
}

pub fn bands(s: &Settings, sink: &Sink, tau_grid: Option<&str>) -> Result<()> {
    let ks = s.k_grid().points();
    match tau_grid {
        None => {
            let bs = band_sweep(&s.potential()?, &ks, s.truncation(), s.bands())?;
            sink.table("bands", &band_table(&bs))
        }
        Some(spec) => {
            let family = s.family()?;
            let taus = spec.parse::<Grid>()?.points();
            let mut t = Table::new(surface_columns());
            for tau in taus {
                let bs = band_sweep(&family.at(tau), &ks, s.truncation(), s.bands())?;
                push_surface(&mut t, tau, &bs);
            }
            sink.table("bands", &t)
        }
    }
}

pub fn fd_table(p: &PotentialSpec, ks: &[f64], m: usize, n: usize, points: usize) -> Result<(Table, f64)> {
    let rows: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = ks
        .par_iter()
        .map(|&k| Ok((k, bands_at(p, k, m, n)?, fd_band_oracle(p, k, points, n)?)))
        .collect::<nhbloch::Result<_>>()?;
    let mut t = Table::new(vec![
        col("k", "crystal momentum in units of 2π/a"),
        col("band", "band index, 1-based"),
        col("re_plane_wave", "real part, plane-wave solver"),
        col("im_plane_wave", "imaginary part, plane-wave solver"),
        col("re_fd", "real part, finite-difference solver"),
        col("im_fd", "imaginary part, finite-difference solver"),
        col("deviation", "modulus of the difference"),
    ]);
    let mut worst = 0.0f64;
    for (k, pw, fd) in rows {
        for (b, (a, f)) in pw.iter().zip(&fd).enumerate() {
            let d = (a - f).norm();
            worst = worst.max(d);
            t.push(vec![
                k.into(),
                (b + 1).into(),
                a.re.into(),
                a.im.into(),
                f.re.into(),
                f.im.into(),
                d.into(),
            ]);
        }
    }
    Ok((t, worst))
}

pub fn fdcheck(s: &Settings, sink: &Sink) -> Result<()> {
    let (t, worst) = fd_table(
        &s.potential()?,
        &s.k_grid().points(),
        s.truncation(),
        s.bands(),
        s.fd_points(),
    )?;
    log::info!("max plane-wave/finite-difference deviation {worst:.3e}");
    sink.table("fdcheck", &t)
}

#[derive(Serialize)]
struct GaugeReport {
    potential: PotentialSpec,
    pt_symmetric: bool,
    off_diagonal_form: Option<nhbloch::gauge::OffDiagonalForm>,
    angle: GaugeAngle,
    character: Option<Character>,
    transformed_potential: Option<PotentialSpec>,
}

pub fn gauge(s: &Settings, sink: &Sink) -> Result<()> {
    let p = s.potential()?;
    let eq = hermitian_equivalent(&p)?;
    let pt = pt_symmetric(&p);
    let report = GaugeReport {
        off_diagonal_form: if pt { Some(off_diagonal_form(&p)?) } else { None },
        potential: p,
        pt_symmetric: pt,
        angle: eq.angle.ok_or_else(|| CliError::config("no gauge angle"))?,
        character: eq.character,
        transformed_potential: eq.transformed_potential,
    };
    sink.json("gauge", &report)
}

pub fn unit(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    v
}

pub fn pr_table(p: &PotentialSpec, ks: &[f64], m: usize, n: usize) -> Result<Table> {
    let angle = match equivalence(p)? {
        r if r.eligible => r.angle,
        _ => None,
    };
    let bs = band_sweep(p, ks, m, n)?;
    let mut columns = vec![
        col("k", "crystal momentum in units of 2π/a"),
        col("band", "band index, 1-based"),
        col("pr", "participation ratio over plane waves"),
    ];
    if angle.is_some() {
        columns.push(col("pr_gauge", "participation ratio after the gauge transformation"));
    }
    let mut t = Table::new(columns);
    for (ik, &k) in ks.iter().enumerate() {
        for b in 1..=n {
            let v = bs.vector(ik, b).expect("sweep keeps vectors");
            let mut row = vec![k.into(), b.into(), participation_ratio(&v.to_vec())?.into()];
            if let Some(a) = &angle {
                let g = gauge_vector(&v, a)?;
                row.push(participation_ratio(&g.to_vec())?.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

pub fn pr(s: &Settings, sink: &Sink) -> Result<()> {
    let t = pr_table(&s.potential()?, &s.k_grid().points(), s.truncation(), s.bands())?;
    sink.table("pr", &t)
}

/// Plane-wave coefficients of band `band` at `k`, optionally gauge
/// transformed and renormalized.
pub fn state(p: &PotentialSpec, k: f64, m: usize, band: usize, gauge: bool) -> Result<Vec<Complex64>> {
    let h = build_bloch(p, k, m)?;
    let d = eig(&h.matrix().view())?;
    if band == 0 || band > d.len() {
        return Err(CliError::config(format!("band {band} out of range 1..={}", d.len())));
    }
    let v = d.vector(band - 1);
    if gauge {
        let angle = potential_angle(p)?;
        Ok(unit(gauge_vector(&v, &angle)?.to_vec()))
    } else {
        Ok(v.to_vec())
    }
}

/// Samples over one period centred on zero, peak aligned.
pub fn real_space(p: &PotentialSpec, coeffs: &[Complex64], k: f64, points: usize) -> (Vec<f64>, Vec<Complex64>) {
    let a = p.period();
    let xs = linspace(-a / 2.0, a / 2.0, points);
    let scaled: Vec<f64> = xs.iter().map(|x| x * TAU / a).collect();
    (xs, align_peak(&reconstruct_wavefunction(coeffs, k, &scaled)))
}

pub fn momentum_table(coeffs: &[Complex64]) -> Table {
    let half = (coeffs.len() / 2) as i32;
    let mut t = Table::new(vec![
        col("m", "plane-wave index"),
        col("re_a", "real part of the coefficient"),
        col("im_a", "imaginary part of the coefficient"),
        col("abs_a", "modulus of the coefficient"),
        col("ln_abs_a", "natural log of the modulus"),
    ]);
    for (i, a) in coeffs.iter().enumerate() {
        t.push(vec![
            (i as i32 - half).into(),
            a.re.into(),
            a.im.into(),
            a.norm().into(),
            a.norm().ln().into(),
        ]);
    }
    t
}

pub fn wavefunction(s: &Settings, sink: &Sink, band: usize, points: usize, gauge: bool, basis: Basis) -> Result<()> {
    let p = s.potential()?;
    let k = s.k_point(0.0)?;
    let coeffs = state(&p, k, s.truncation(), band, gauge)?;
    match basis {
        Basis::Momentum => sink.table("wavefunction", &momentum_table(&coeffs)),
        Basis::Real => {
            if points < 2 {
                return Err(CliError::config("need at least 2 sample points"));
            }
            let (xs, psi) = real_space(&p, &coeffs, k, points);
            let mut t = Table::new(vec![
                col("x", "position"),
                col("re_psi", "real part, peak aligned"),
                col("im_psi", "imaginary part, peak aligned"),
                col("abs_psi", "modulus, unit peak"),
            ]);
            for (x, z) in xs.iter().zip(&psi) {
                t.push(vec![(*x).into(), z.re.into(), z.im.into(), z.norm().into()]);
            }
            sink.table("wavefunction", &t)
        }
    }
}

fn ep_config(s: &Settings) -> EpConfig {
    EpConfig {
        truncation: s.truncation(),
        ..EpConfig::default()
    }
}

pub fn ep_scan_cmd(s: &Settings, sink: &Sink, pair: &str, window: &str) -> Result<()> {
    let pair: BandPair = pair.parse()?;
    let report = ep_scan(&s.family()?, s.k_point(0.0)?, pair, parse_range(window)?, &ep_config(s))?;
    sink.json("ep_scan", &report)
}

pub fn ep_classify_cmd(s: &Settings, sink: &Sink, pair: &str, tau_ep: f64) -> Result<()> {
    let pair: BandPair = pair.parse()?;
    let out = classify_ep(&s.family()?, s.k_point(0.0)?, pair, tau_ep, &ep_config(s))?;
    sink.json("ep_classify", &out)
}

pub fn dispersion_cmd(s: &Settings, sink: &Sink, pair: &str, at: Option<f64>, side: &str, vary: Vary) -> Result<()> {
    let pair: BandPair = pair.parse()?;
    let side: Side = side.parse()?;
    let cfg = ep_config(s);
    let fit = match vary {
        Vary::Tau => dispersion_exponent(&s.family()?, s.k_point(0.0)?, pair, at.unwrap_or(1.0), side, &cfg)?,
        Vary::K => {
            let k_ep = match at {
                Some(k) => k,
                None => s.k_point(0.0)?,
            };
            k_dispersion_exponent(&s.potential()?, pair, k_ep, side, &cfg)?
        }
    };
    sink.json("dispersion", &fit)
}

fn parse_states(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| match x.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n - 1),
            _ => Err(CliError::config(format!("bad state list {s:?}; expected 1-based indices like 1,2"))),
        })
        .collect()
}

#[derive(Serialize)]
struct EncircleReport {
    system: &'static str,
    center: (f64, f64),
    radius: f64,
    steps: usize,
    /// `[start, end]` band indices, 1-based.
    permutation: Vec<(usize, usize)>,
    swapped: bool,
    continuity_floor: f64,
    worst_step: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn encircle_cmd(
    s: &Settings,
    sink: &Sink,
    system: System,
    center: &str,
    radius: f64,
    steps: usize,
    states: &str,
    coupling: f64,
) -> Result<()> {
    let center = parse_pair(center)?;
    let states = parse_states(states)?;
    let path = LoopPath::circle(center, radius);
    let (name, r) = match system {
        System::TwoLevel => (
            "two-level",
            encircle(|d, g| Ok(two_level_model(d, g, coupling).matrix), &path, steps, &states)?,
        ),
        System::Bloch => {
            let family = s.family()?;
            let m = s.truncation();
            let h = move |k: f64, tau: f64| Ok(build_bloch(&family.at(tau), k, m)?.into_matrix());
            ("bloch", encircle(h, &path, steps, &states)?)
        }
    };
    let report = EncircleReport {
        system: name,
        center,
        radius,
        steps: r.steps,
        permutation: r.permutation.iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
        swapped: !r.is_identity(),
        continuity_floor: r.continuity_floor,
        worst_step: r.worst_step,
    };
    sink.json("encircle", &report)
}

pub fn riemann(sink: &Sink, delta: &str, g: &str, coupling: f64, resolution: usize) -> Result<()> {
    let grid = riemann_sheet_grid(parse_range(delta)?, parse_range(g)?, coupling, resolution)?;
    let mut t = Table::new(vec![
        col("delta", "detuning"),
        col("g", "gain/loss"),
        col("re_upper", "upper real-part sheet"),
        col("re_lower", "lower real-part sheet"),
        col("im_upper", "upper imaginary-part sheet"),
        col("im_lower", "lower imaginary-part sheet"),
    ]);
    for p in grid {
        t.push(vec![
            p.delta.into(),
            p.g.into(),
            p.re_upper.into(),
            p.re_lower.into(),
            p.im_upper.into(),
            p.im_lower.into(),
        ]);
    }
    sink.table("riemann", &t)
}

#[derive(Serialize)]
struct TruncatedReport {
    model: &'static str,
    v0: f64,
    tau: f64,
    omega: f64,
    omega_prime: Option<f64>,
    t_minus: f64,
    t_plus: f64,
    t: Complex64,
    matrix: Vec<Vec<Complex64>>,
    closed_form: Option<Vec<Complex64>>,
    numeric: Vec<Complex64>,
    max_closed_form_deviation: Option<f64>,
}

pub fn truncated(s: &Settings, sink: &Sink, model: &str, v0: f64, omega: Option<f64>, omega_prime: Option<f64>) -> Result<()> {
    let name: ModelName = model.parse()?;
    let tau = s.tau.unwrap_or(1.0);
    let m = truncated_model(name, v0, tau, ModelOverrides { omega, omega_prime })?;
    let numeric = eig_values_only(&m.matrix.view())?;
    let dev = m.closed_form.as_ref().map(|c| {
        c.iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    });
    let report = TruncatedReport {
        model: name.as_str(),
        v0,
        tau,
        omega: m.omega,
        omega_prime: m.omega_prime,
        t_minus: m.t_minus,
        t_plus: m.t_plus,
        t: m.t(),
        matrix: m.matrix.rows().into_iter().map(|r| r.to_vec()).collect(),
        closed_form: m.closed_form.clone(),
        numeric,
        max_closed_form_deviation: dev,
    };
    sink.json("truncated", &report)
}
