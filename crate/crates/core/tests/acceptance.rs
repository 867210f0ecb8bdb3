//! Acceptance gate: every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line. The process exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use ndarray::Array2;
use nhbloch::bands::{
    align_peak, band_sweep, bands_at, fd_band_oracle, linspace, participation_ratio,
    reconstruct_wavefunction,
};
use nhbloch::eig::{eig, eig_values_only, frobenius_norm};
use nhbloch::ep::{
    classify_ep, dispersion_exponent, encircle, ep_scan, h3_discriminant, truncated_model,
    two_level_model, BandPair, Classification, EpConfig, LoopPath, ModelName, ModelOverrides,
    Side,
};
use nhbloch::gauge::{couplings_symmetric, dirichlet_negative_control, gauge_vector, potential_angle, symmetrizable};
use nhbloch::model::{build_bloch, PotentialFamily, PotentialSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn verdict(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pair(n: usize) -> BandPair {
    BandPair::new(n).unwrap()
}

fn k_grid() -> Vec<f64> {
    linspace(-0.5, 0.5, 101)
}

fn c1_hermitian_equivalence() -> Outcome {
    let ks = k_grid();
    let a = band_sweep(&PotentialSpec::v1(1.0, 0.8), &ks, 32, 3).map_err(|e| e.to_string())?;
    let b = band_sweep(&PotentialSpec::cosine(1, c(0.6, 0.0)), &ks, 32, 3).map_err(|e| e.to_string())?;
    let dev = a.max_deviation(&b);
    let (ia, ib) = (a.max_abs_imag(), b.max_abs_imag());
    verdict(
        dev < 1e-8 && ia < 1e-9 && ib < 1e-9,
        format!("max deviation {dev:.2e}, max |Im| {ia:.2e} / {ib:.2e}"),
    )
}

fn c2_broken_phase_equivalence() -> Outcome {
    let ks = k_grid();
    let a = band_sweep(&PotentialSpec::v1(1.0, 1.1), &ks, 32, 5).map_err(|e| e.to_string())?;
    let b = band_sweep(&PotentialSpec::cosine(1, c(0.0, 0.21f64.sqrt())), &ks, 32, 5)
        .map_err(|e| e.to_string())?;
    let dev = a.max_deviation(&b);
    let im = a.max_abs_imag();
    verdict(
        dev < 1e-8 && im > 1e-3,
        format!("max deviation {dev:.2e} (complex bands present, max |Im| {im:.3})"),
    )
}

/// Band-1, k = 0 states: `G·Ψ` of V₁(1, 0.8) and `Ψ̃` of 0.6 cos x.
type State = ndarray::Array1<Complex64>;

fn ground_states() -> Result<(State, State, State), String> {
    let p = PotentialSpec::v1(1.0, 0.8);
    let h = build_bloch(&p, 0.0, 32).map_err(|e| e.to_string())?;
    let psi = eig(&h.matrix().view()).map_err(|e| e.to_string())?.vector(0).to_owned();
    let angle = potential_angle(&p).map_err(|e| e.to_string())?;
    let g_psi = gauge_vector(&psi.view(), &angle).map_err(|e| e.to_string())?;
    let ht = build_bloch(&PotentialSpec::cosine(1, c(0.6, 0.0)), 0.0, 32).map_err(|e| e.to_string())?;
    let psi_t = eig(&ht.matrix().view()).map_err(|e| e.to_string())?.vector(0).to_owned();
    Ok((psi, g_psi, psi_t))
}

fn c3_gauge_wavefunction() -> Outcome {
    let (_, g_psi, psi_t) = ground_states()?;
    let xs = linspace(-std::f64::consts::PI, std::f64::consts::PI, 401);
    let a = align_peak(&reconstruct_wavefunction(g_psi.as_slice().unwrap(), 0.0, &xs));
    let b = align_peak(&reconstruct_wavefunction(psi_t.as_slice().unwrap(), 0.0, &xs));
    let abs_dev = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x.norm() - y.norm()).abs())
        .fold(0.0, f64::max);
    let cplx_dev = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    verdict(
        abs_dev < 1e-6,
        format!("max ||GΨ| − |Ψ̃|| {abs_dev:.2e} on 401 points (complex {cplx_dev:.2e})"),
    )
}

fn c4_participation_ratios() -> Outcome {
    let (psi, g_psi, _) = ground_states()?;
    let before = participation_ratio(psi.as_slice().unwrap()).map_err(|e| e.to_string())?;
    let after = participation_ratio(g_psi.as_slice().unwrap()).map_err(|e| e.to_string())?;
    verdict(
        (before - 1.99).abs() <= 0.02 && (after - 1.29).abs() <= 0.02,
        format!("PR {before:.4} before, {after:.4} after"),
    )
}

fn c5_fd_agreement() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    let mut ratio_range = (f64::INFINITY, 0.0f64);
    for tau in [0.0, 0.8, 1.1] {
        let p = PotentialSpec::v1(1.0, tau);
        for k in [0.0, 0.25, 0.5] {
            let pw = bands_at(&p, k, 32, 3).map_err(|e| e.to_string())?;
            let dev = |n: usize| -> Result<f64, String> {
                let fd = fd_band_oracle(&p, k, n, 3).map_err(|e| e.to_string())?;
                Ok(pw.iter().zip(&fd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
            };
            let (d1, d4) = (dev(1024)?, dev(4096)?);
            worst = (worst.0.max(d1), worst.1.max(d4));
            let r = d1 / d4;
            ratio_range = (ratio_range.0.min(r), ratio_range.1.max(r));
        }
    }
    verdict(
        worst.0 < 1e-3 && worst.1 < 1e-4 && ratio_range.0 >= 12.0 && ratio_range.1 <= 20.0,
        format!(
            "max deviation {:.2e} (N=1024), {:.2e} (N=4096); ratio {:.2}..{:.2}",
            worst.0, worst.1, ratio_range.0, ratio_range.1
        ),
    )
}

fn scan(family: PotentialFamily, k: f64, lower: usize) -> Result<nhbloch::ep::EpReport, String> {
    ep_scan(&family, k, pair(lower), (0.9, 1.1), &EpConfig::default()).map_err(|e| e.to_string())
}

fn c6_ep_taxonomy() -> Outcome {
    let fam = PotentialFamily::V1 { v0: 1.0 };
    let th = EpConfig::default().thresholds;
    let center = scan(fam, 0.0, 2)?;
    let edge = scan(fam, 0.5, 1)?;
    let ok = (center.tau - 1.0).abs() < 1e-6
        && (edge.tau - 1.0).abs() < 1e-6
        && center.is_ep(&th)
        && edge.is_ep(&th)
        && center.classification == Classification::Dirac
        && edge.classification == Classification::Conventional;
    verdict(
        ok,
        format!(
            "k=0 bands 2–3: τ−1 = {:.1e}, overlap {:.6}, rigidity {:.1e}, {:?}; k=0.5 bands 1–2: τ−1 = {:.1e}, overlap {:.6}, rigidity {:.1e}, {:?}",
            center.tau - 1.0,
            center.overlap_at_min,
            center.phase_rigidity_at_min,
            center.classification,
            edge.tau - 1.0,
            edge.overlap_at_min,
            edge.phase_rigidity_at_min,
            edge.classification
        ),
    )
}

fn c7_ep_swap() -> Outcome {
    let fam = PotentialFamily::V1PlusV2 { v0: 1.0 };
    let th = EpConfig::default().thresholds;
    let center = scan(fam, 0.0, 2)?;
    let edge = scan(fam, 0.5, 1)?;
    let ks = k_grid();
    let a = band_sweep(&PotentialSpec::v1(1.0, 1.0), &ks, 32, 5).map_err(|e| e.to_string())?;
    let b = band_sweep(&PotentialSpec::v1_plus_v2(1.0, 1.0), &ks, 32, 5).map_err(|e| e.to_string())?;
    let dev = a.max_deviation(&b);
    let ok = center.classification == Classification::Conventional
        && edge.classification == Classification::Dirac
        && center.is_ep(&th)
        && edge.is_ep(&th)
        && (center.tau - 1.0).abs() < 1e-6
        && (edge.tau - 1.0).abs() < 1e-6
        && dev < 1e-8;
    verdict(
        ok,
        format!(
            "k=0 bands 2–3 {:?}, k=0.5 bands 1–2 {:?}; τ=1 bands vs V₁ deviation {dev:.2e}",
            center.classification, edge.classification
        ),
    )
}

fn c8_dispersion() -> Outcome {
    let fam = PotentialFamily::V1 { v0: 1.0 };
    let cfg = EpConfig::default();
    let fit = |k: f64, n: usize, side: Side| {
        dispersion_exponent(&fam, k, pair(n), 1.0, side, &cfg)
            .map(|f| f.exponent)
            .map_err(|e| e.to_string())
    };
    let lin = [fit(0.0, 2, Side::Below)?, fit(0.0, 2, Side::Above)?];
    let quad = [fit(0.0, 4, Side::Below)?, fit(0.0, 4, Side::Above)?];
    let broken = classify_ep(&fam, 0.5, pair(1), 1.0, &cfg)
        .map_err(|e| e.to_string())?
        .broken_side
        .ok_or("no broken side at the zone-edge EP")?;
    let half = fit(0.5, 1, broken)?;
    let ok = lin.iter().all(|p| (p - 1.0).abs() <= 0.1)
        && quad.iter().all(|p| (p - 2.0).abs() <= 0.15)
        && (half - 0.5).abs() <= 0.05;
    verdict(
        ok,
        format!(
            "bands 2–3 p = {:.4}/{:.4}, bands 4–5 p = {:.4}/{:.4} (below/above); zone-edge broken side ({broken:?}) p = {half:.4}",
            lin[0], lin[1], quad[0], quad[1]
        ),
    )
}

fn c9_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut window_ok = true;
    for _ in 0..50 {
        let v0 = rng.random_range(0.2..2.0);
        let tau = rng.random_range(0.0..2.0);
        let omega = rng.random_range(0.2..2.0);
        let over = ModelOverrides {
            omega: Some(omega),
            omega_prime: None,
        };
        for (name, o) in [
            (ModelName::H2, over),
            (ModelName::H3, over),
            (ModelName::H3Nnn, ModelOverrides::default()),
        ] {
            let m = truncated_model(name, v0, tau, o).map_err(|e| e.to_string())?;
            let closed = m.closed_form.clone().ok_or("missing closed form")?;
            let num = eig_values_only(&m.matrix.view()).map_err(|e| e.to_string())?;
            worst = worst.max(multiset_distance(&num, &closed));
        }
        // reality window of the H3 pair: |t| = ω/(2√2) ⇔ τ_c = √(1 + ω²/(2V₀²))
        let tau_c = (1.0 + omega * omega / (2.0 * v0 * v0)).sqrt();
        let inside = tau_c - 1e-3;
        let outside = tau_c + 1e-3;
        let max_im = |t: f64| -> Result<f64, String> {
            let m = truncated_model(ModelName::H3, v0, t, over).map_err(|e| e.to_string())?;
            let v = eig_values_only(&m.matrix.view()).map_err(|e| e.to_string())?;
            Ok(v.iter().map(|z| z.im.abs()).fold(0.0, f64::max))
        };
        window_ok &= h3_discriminant(omega, v0, inside) > 0.0
            && h3_discriminant(omega, v0, outside) < 0.0
            && max_im(inside)? < 1e-9
            && max_im(outside)? > 1e-6;
    }
    verdict(
        worst < 1e-10 && window_ok,
        format!("max closed-form deviation {worst:.2e} over 50 draws; H3 reality window {}", if window_ok { "confirmed" } else { "violated" }),
    )
}

fn c10_encircling() -> Outcome {
    let two = |d: f64, g: f64| Ok(two_level_model(d, g, 1.0).matrix);
    let fam = PotentialFamily::V1 { v0: 1.0 };
    let full = |k: f64, tau: f64| Ok(build_bloch(&fam.at(tau), k, 32)?.into_matrix());
    let conv_path = LoopPath::circle((0.0, 1.0), 0.5);
    let dirac_path = LoopPath::circle((0.0, 1.0), 0.1);
    let mut detail = Vec::new();
    let mut ok = true;
    for steps in [256, 512] {
        let a = encircle(two, &conv_path, steps, &[0, 1]).map_err(|e| e.to_string())?;
        let b = encircle(full, &dirac_path, steps, &[1, 2]).map_err(|e| e.to_string())?;
        ok &= a.is_transposition() && b.is_identity();
        detail.push(format!(
            "{steps} steps: two-level {:?} (floor {:.4}), Dirac {:?} (floor {:.4})",
            a.permutation, a.continuity_floor, b.permutation, b.continuity_floor
        ));
    }
    verdict(ok, detail.join("; "))
}

fn c11_fig5_equivalence() -> Outcome {
    let ks = k_grid();
    let tau: f64 = 0.5;
    let p = PotentialSpec::fig5(1.0, tau);
    let s = (1.0 - tau * tau).sqrt();
    let herm = PotentialSpec::cosine(1, c(s, 0.0)).add(&PotentialSpec::cosine(2, c(1.0 - tau * tau, 0.0)));
    let a = band_sweep(&p, &ks, 32, 5).map_err(|e| e.to_string())?;
    let b = band_sweep(&herm, &ks, 32, 5).map_err(|e| e.to_string())?;
    let dev = a.max_deviation(&b);
    let sym_fig5 = symmetrizable(&p).map_err(|e| e.to_string())?;
    let sym_v12 = symmetrizable(&PotentialSpec::v1_plus_v2(1.0, tau)).map_err(|e| e.to_string())?;
    verdict(
        dev < 1e-8 && sym_fig5 && !sym_v12,
        format!("max deviation {dev:.2e}; symmetrizable: fig5 {sym_fig5}, V₁+V₂ {sym_v12}"),
    )
}

fn c12_eigensolver_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = [0.0f64; 4];
    for _ in 0..200 {
        let n = rng.random_range(1..=64usize);
        let a = random_matrix(&mut rng, n);
        let norm = frobenius_norm(&a.view()).max(1.0);
        let vals = eig_values_only(&a.view()).map_err(|e| e.to_string())?;

        let tr: Complex64 = a.diag().iter().sum();
        let sum: Complex64 = vals.iter().sum();
        worst[0] = worst[0].max((tr - sum).norm() / norm);

        let det = lu_det(&a);
        let prod: Complex64 = vals.iter().product();
        worst[1] = worst[1].max((det - prod).norm() / det.norm().max(f64::MIN_POSITIVE));

        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let b = Array2::from_shape_fn((n, n), |(i, j)| a[[i, j]] * d[i] / d[j]);
        let vb = eig_values_only(&b.view()).map_err(|e| e.to_string())?;
        worst[2] = worst[2].max(multiset_distance(&vals, &vb) / norm);

        let h = (&a + &a.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        let hn = frobenius_norm(&h.view()).max(1.0);
        let hv = eig_values_only(&h.view()).map_err(|e| e.to_string())?;
        let max_im = hv.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / hn;
        let sq: f64 = hv.iter().map(|z| z.re * z.re).sum();
        let fro2 = frobenius_norm(&h.view()).powi(2);
        worst[3] = worst[3].max(max_im).max((sq - fro2).abs() / hn.powi(2));
    }
    verdict(
        worst[0] < 1e-12 && worst[1] < 1e-8 && worst[2] < 1e-10 && worst[3] < 1e-12,
        format!(
            "200 matrices, n ≤ 64: trace {:.1e}, det {:.1e}, similarity {:.1e}, Hermitian {:.1e} (relative)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn c13_negative_control() -> Outcome {
    let mut ok = true;
    let mut quad_dev = 0.0f64;
    for i in 0..=20 {
        let tau = i as f64 * 0.1;
        let h = dirichlet_negative_control(1.0, tau, 12).map_err(|e| e.to_string())?;
        ok &= couplings_symmetric(&h);
        let q = dirichlet_by_quadrature(1.0, tau, 12);
        quad_dev = quad_dev.max((&h - &q).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    verdict(
        ok && quad_dev < 1e-10,
        format!("21 values of τ ∈ [0, 2]: symmetric {ok}; max deviation from quadrature {quad_dev:.1e}"),
    )
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 13] = [
        (1, "Hermitian equivalence", c1_hermitian_equivalence),
        (2, "broken-phase equivalence", c2_broken_phase_equivalence),
        (3, "gauge wavefunction", c3_gauge_wavefunction),
        (4, "participation ratios", c4_participation_ratios),
        (5, "finite-difference agreement", c5_fd_agreement),
        (6, "EP taxonomy", c6_ep_taxonomy),
        (7, "EP swap", c7_ep_swap),
        (8, "dispersion exponents", c8_dispersion),
        (9, "closed forms", c9_closed_forms),
        (10, "encircling", c10_encircling),
        (11, "second-harmonic equivalence", c11_fig5_equivalence),
        (12, "eigensolver properties", c12_eigensolver_properties),
        (13, "negative control", c13_negative_control),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} of 13 criteria passed", 13 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
