//! Fixed-parameter data bundles, one per figure panel set.

use std::path::PathBuf;

use nhbloch::bands::{band_sweep, linspace, participation_ratio, tail_profile};
use nhbloch::ep::{
    dispersion_exponent, ep_scan, BandPair, DispersionFit, EpConfig, EpReport, Side,
};
use nhbloch::gauge::hermitian_equivalent;
use nhbloch::model::{build_bloch, PotentialFamily, PotentialSpec};
use nhbloch::eig::eig_values_only;
use serde::Serialize;

use crate::args::FigureName;
use crate::commands::{
    band_table, fd_table, momentum_table, push_surface, real_space, state, surface_columns,
};
use crate::config::Format;
use crate::error::Result;
use crate::output::Bundle;
use crate::table::{col, Column, Table};

const M: usize = 32;
const V0: f64 = 1.0;
const K_POINTS: usize = 101;
const X_POINTS: usize = 401;

fn zone() -> Vec<f64> {
    linspace(-0.5, 0.5, K_POINTS)
}

fn pair(n: usize) -> BandPair {
    BandPair::new(n).expect("positive band index")
}

const REPORT_FIELDS: [Column; 10] = [
    col("family", "potential family and V0"),
    col("k", "crystal momentum of the scan"),
    col("tau", "location of the gap minimum"),
    col("band_pair", "band indices, 1-based"),
    col("min_gap", "smallest |ω_{n+1} − ω_n| found"),
    col("overlap_at_min", "|⟨ψ_n|ψ_{n+1}⟩| of unit right eigenvectors"),
    col("phase_rigidity_at_min", "|⟨ψ_L|ψ_R⟩| of unit left and right eigenvectors"),
    col("classification", "conventional, dirac, diabolic or inconclusive"),
    col("dispersion_exponent", "power-law fit of the splitting, with standard error"),
    col("diagnostics", "notes from the scan"),
];

const FIT_FIELDS: [Column; 5] = [
    col("exponent", "fitted power p in gap ≈ A|δ|^p"),
    col("stderr", "standard error of p"),
    col("prefactor", "fitted A"),
    col("side", "side of the EP sampled"),
    col("samples", "(δ, gap) pairs"),
];

fn sweep_columns() -> Vec<Column> {
    vec![
        col("tau", "gain/loss parameter"),
        col("band", "band index, 1-based"),
        col("re_omega", "real part of the energy"),
        col("im_omega", "imaginary part of the energy"),
    ]
}

fn tau_sweep(family: &PotentialFamily, k: f64, taus: &[f64], bands: usize) -> Result<Table> {
    let mut t = Table::new(sweep_columns());
    for &tau in taus {
        let bs = band_sweep(&family.at(tau), &[k], M, bands)?;
        for (b, e) in bs.energies_at(0).iter().enumerate() {
            t.push(vec![tau.into(), (b + 1).into(), e.re.into(), e.im.into()]);
        }
    }
    Ok(t)
}

fn scan(family: &PotentialFamily, k: f64, lower: usize) -> Result<EpReport> {
    Ok(ep_scan(family, k, pair(lower), (0.5, 1.5), &EpConfig::default())?)
}

#[derive(Serialize)]
struct EquivalenceSummary {
    potential: PotentialSpec,
    equivalent: PotentialSpec,
    max_band_deviation: f64,
    max_abs_imag: f64,
    max_fd_deviation: Option<f64>,
    participation_ratio: Option<f64>,
    participation_ratio_gauge: Option<f64>,
}

const SUMMARY_FIELDS: [Column; 7] = [
    col("potential", "original complex potential"),
    col("equivalent", "gauge-equivalent potential"),
    col("max_band_deviation", "max |ω − ω̃| over the k grid and bands"),
    col("max_abs_imag", "max |Im ω| of the original bands"),
    col("max_fd_deviation", "max plane-wave vs finite-difference deviation, if computed"),
    col("participation_ratio", "PR of the band-1 k=0 state, if computed"),
    col("participation_ratio_gauge", "PR of the same state after the gauge transformation"),
];

/// Original and equivalent bands plus a summary.
fn equivalence_pair(b: &mut Bundle, p: &PotentialSpec, panel: &str, with_fd: bool) -> Result<EquivalenceSummary> {
    let tilde = hermitian_equivalent(p)?
        .transformed_potential
        .expect("eligible result carries a potential");
    let ks = zone();
    let orig = band_sweep(p, &ks, M, 3)?;
    let eq = band_sweep(&tilde, &ks, M, 3)?;
    b.table("bands_original", panel, "bands of the complex potential", &band_table(&orig))?;
    b.table("bands_equivalent", panel, "bands of the gauge-equivalent potential", &band_table(&eq))?;
    let fd = if with_fd {
        let (t, worst) = fd_table(p, &linspace(-0.5, 0.5, 11), M, 3, 1024)?;
        b.table("bands_fd", panel, "finite-difference bands (N = 1024) against plane waves", &t)?;
        Some(worst)
    } else {
        None
    };
    Ok(EquivalenceSummary {
        potential: p.clone(),
        equivalent: tilde,
        max_band_deviation: orig.max_deviation(&eq),
        max_abs_imag: orig.max_abs_imag(),
        max_fd_deviation: fd,
        participation_ratio: None,
        participation_ratio_gauge: None,
    })
}

fn fig1(b: &mut Bundle) -> Result<()> {
    let p = PotentialSpec::v1(V0, 0.8);
    let mut summary = equivalence_pair(b, &p, "(c)", true)?;
    let tilde = summary.equivalent.clone();

    let psi = state(&p, 0.0, M, 1, false)?;
    let g_psi = state(&p, 0.0, M, 1, true)?;
    let psi_t = state(&tilde, 0.0, M, 1, false)?;
    summary.participation_ratio = Some(participation_ratio(&psi)?);
    summary.participation_ratio_gauge = Some(participation_ratio(&g_psi)?);

    let mut t = Table::new(vec![
        col("m", "plane-wave index"),
        col("abs_psi", "|Ψ_1(m)| at k = 0, complex potential"),
        col("abs_gauge_psi", "|GΨ_1(m)|"),
        col("abs_psi_equivalent", "|Ψ̃_1(m)| of the equivalent potential"),
    ]);
    let half = (psi.len() / 2) as i32;
    for i in 0..psi.len() {
        t.push(vec![
            (i as i32 - half).into(),
            psi[i].norm().into(),
            g_psi[i].norm().into(),
            psi_t[i].norm().into(),
        ]);
    }
    b.table("wavefunction_k0", "(d)", "momentum-space band-1 state at k = 0 before and after the gauge transformation", &t)?;
    b.json("summary", "(c), (d)", "deviations and participation ratios", SUMMARY_FIELDS.to_vec(), &summary)
}

fn fig2(b: &mut Bundle) -> Result<()> {
    let summary = equivalence_pair(b, &PotentialSpec::v1(V0, 1.1), "(c), (d)", false)?;
    b.json("summary", "(c), (d)", "deviation between the two complex band structures", SUMMARY_FIELDS.to_vec(), &summary)
}

fn ep_bundle(b: &mut Bundle, family: PotentialFamily) -> Result<()> {
    let at_one = band_sweep(&family.at(1.0), &zone(), M, 5)?;
    b.table("bands_tau1", "(a)", "bands at τ = 1", &band_table(&at_one))?;

    let mut surface = Table::new(surface_columns());
    for tau in linspace(0.8, 1.2, 21) {
        push_surface(&mut surface, tau, &band_sweep(&family.at(tau), &linspace(-0.5, 0.5, 41), M, 3)?);
    }
    b.table("surface", "(a)", "bands over the (k, τ) plane", &surface)?;

    let centre = scan(&family, 0.0, 2)?;
    let edge = scan(&family, 0.5, 1)?;
    b.json("ep_k0", "(a), (b)", "gap-minimum scan at k = 0, bands 2-3", REPORT_FIELDS.to_vec(), &centre)?;
    b.json("ep_k05", "(a), (b)", "gap-minimum scan at k = 0.5, bands 1-2", REPORT_FIELDS.to_vec(), &edge)?;

    let mut coalesced = Table::new(vec![
        col("x", "position"),
        col("abs_psi_k0", "|ψ| of band 2 at the k = 0 EP, unit peak"),
        col("abs_psi_k05", "|ψ| of band 1 at the k = 0.5 EP, unit peak"),
    ]);
    let p0 = family.at(centre.tau);
    let p5 = family.at(edge.tau);
    let (xs, a) = real_space(&p0, &state(&p0, 0.0, M, 2, false)?, 0.0, X_POINTS);
    let (_, c) = real_space(&p5, &state(&p5, 0.5, M, 1, false)?, 0.5, X_POINTS);
    for i in 0..xs.len() {
        coalesced.push(vec![xs[i].into(), a[i].norm().into(), c[i].norm().into()]);
    }
    b.table("coalesced_wavefunctions", "(b)", "states at the two EPs", &coalesced)?;

    let taus = linspace(0.8, 1.2, 81);
    b.table("tau_sweep_k05", "(c)", "bands 1-3 against τ at k = 0.5", &tau_sweep(&family, 0.5, &taus, 3)?)?;
    b.table("tau_sweep_k0", "(d)", "bands 1-3 against τ at k = 0", &tau_sweep(&family, 0.0, &taus, 3)?)
}

fn fig5(b: &mut Bundle) -> Result<()> {
    let summary = equivalence_pair(b, &PotentialSpec::fig5(V0, 0.5), "(c)", false)?;
    b.json("summary", "(c)", "deviation between the two band structures", SUMMARY_FIELDS.to_vec(), &summary)
}

#[derive(Serialize)]
struct TailSummary {
    k: f64,
    quadratic_coeff: f64,
    linear_coeff: f64,
    vertex: Option<f64>,
    verdict: nhbloch::bands::TailVerdict,
}

fn s1(b: &mut Bundle) -> Result<()> {
    let tilde = PotentialSpec::cosine(1, num_complex::Complex64::new(0.6, 0.0));
    let mut tails = Vec::new();
    for (k, stem, panel) in [(0.0, "tail_k0", "(a)"), (0.5, "tail_k05", "(b)")] {
        let coeffs = state(&tilde, k, M, 1, false)?;
        b.table(stem, panel, "ln|a_m| of the band-1 state of 0.6 cos x", &momentum_table(&coeffs))?;
        let fit = tail_profile(&coeffs)?;
        tails.push(TailSummary {
            k,
            quadratic_coeff: fit.quadratic_coeff,
            linear_coeff: fit.linear_coeff,
            vertex: fit.vertex,
            verdict: fit.verdict,
        });
    }
    let fields = vec![
        col("k", "crystal momentum"),
        col("quadratic_coeff", "coefficient of (m/M)² in ln|a_m|"),
        col("linear_coeff", "coefficient of m/M"),
        col("vertex", "peak position of the fitted parabola in m"),
        col("verdict", "super-exponential or not"),
    ];
    b.json("tail_fits", "(a), (b)", "parabolic fits; the vertices differ by −0.5", fields, &tails)
}

#[derive(Serialize)]
struct DispersionSummary {
    below: DispersionFit,
    above: DispersionFit,
}

fn dispersion_bundle(b: &mut Bundle, lower: usize, panel: &str) -> Result<()> {
    let family = PotentialFamily::V1 { v0: V0 };
    let p = pair(lower);
    let cfg = EpConfig::default();
    let (i, j) = p.indices();
    let mut gap = Table::new(vec![
        col("tau", "gain/loss parameter"),
        col("re_lower", "real part of the lower band at k = 0"),
        col("im_lower", "imaginary part of the lower band"),
        col("re_upper", "real part of the upper band"),
        col("im_upper", "imaginary part of the upper band"),
        col("gap", "|ω_{n+1} − ω_n|"),
        col("sqrt_gap", "square root of the gap"),
    ]);
    for tau in linspace(0.9, 1.1, 201) {
        let h = build_bloch(&family.at(tau), 0.0, M)?;
        let e = eig_values_only(&h.matrix().view())?;
        let d = (e[j] - e[i]).norm();
        gap.push(vec![
            tau.into(),
            e[i].re.into(),
            e[i].im.into(),
            e[j].re.into(),
            e[j].im.into(),
            d.into(),
            d.sqrt().into(),
        ]);
    }
    b.table("tau_sweep", panel, "the band pair at k = 0 against τ", &gap)?;
    let summary = DispersionSummary {
        below: dispersion_exponent(&family, 0.0, p, 1.0, Side::Below, &cfg)?,
        above: dispersion_exponent(&family, 0.0, p, 1.0, Side::Above, &cfg)?,
    };
    let fields = vec![
        col("below", "fit for τ = 1 − δ (see fit fields below)"),
        col("above", "fit for τ = 1 + δ"),
    ]
    .into_iter()
    .chain(FIT_FIELDS)
    .collect();
    b.json("fit", panel, "power-law fits of the splitting on both sides of τ = 1", fields, &summary)
}

fn s4(b: &mut Bundle) -> Result<()> {
    let bs = band_sweep(&PotentialSpec::v1(V0, 1.0), &zone(), M, 5)?;
    let mut t = Table::new(crate::commands::BAND_COLUMNS.to_vec());
    for (ik, &k) in bs.k_grid().iter().enumerate() {
        for band in 4..=5 {
            let e = bs.energy(ik, band);
            t.push(vec![k.into(), band.into(), e.re.into(), e.im.into()]);
        }
    }
    b.table("bands45_tau1", "(a)", "bands 4 and 5 at τ = 1", &t)?;
    dispersion_bundle(b, 4, "(b), (c)")
}

fn description(name: FigureName) -> &'static str {
    match name {
        FigureName::Fig1 => "V1(1, 0.8) and its Hermitian equivalent 0.6 cos x: bands and k = 0 states",
        FigureName::Fig2 => "V1(1, 1.1) and its imaginary equivalent i√0.21 cos x: complex bands",
        FigureName::Fig3 => "V1: Dirac EP at k = 0 and conventional EP at k = 0.5",
        FigureName::Fig4 => "V1 + V2: the two EP types swap places",
        FigureName::Fig5 => "second-harmonic potential and its real equivalent",
        FigureName::S1 => "super-exponential momentum-space tails of 0.6 cos x",
        FigureName::S3 => "linear splitting of bands 2-3 at the Dirac EP",
        FigureName::S4 => "bands 4-5: second embedded EP and its splitting",
    }
}

pub fn figure(name: FigureName, out: Option<PathBuf>, format: Format) -> Result<PathBuf> {
    let dir = out.unwrap_or_else(|| PathBuf::from(name.as_str()));
    let mut b = Bundle::new(dir, format, name.as_str(), description(name))?;
    match name {
        FigureName::Fig1 => fig1(&mut b)?,
        FigureName::Fig2 => fig2(&mut b)?,
        FigureName::Fig3 => ep_bundle(&mut b, PotentialFamily::V1 { v0: V0 })?,
        FigureName::Fig4 => ep_bundle(&mut b, PotentialFamily::V1PlusV2 { v0: V0 })?,
        FigureName::Fig5 => fig5(&mut b)?,
        FigureName::S1 => s1(&mut b)?,
        FigureName::S3 => dispersion_bundle(&mut b, 2, "(a)")?,
        FigureName::S4 => s4(&mut b)?,
    }
    b.finish()
}
