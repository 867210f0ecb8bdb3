mod common;

use common::{c, dirichlet_by_quadrature};
use nhbloch::bands::{band_sweep, linspace};
use nhbloch::eig::{eig, eig_values_only, residual};
use nhbloch::gauge::{
    apply_gauge, couplings_symmetric, dirichlet_negative_control, equivalence, gauge_angle,
    gauge_vector, hermitian_equivalent, potential_angle, symmetrizable, Character, GaugeRegime,
};
use nhbloch::model::{build_bloch, PotentialSpec};
use num_complex::Complex64;

/// Greedy multiset distance: each value matched to its nearest unused partner.
fn multiset_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn eligible_potentials() -> Vec<PotentialSpec> {
    let mut out = Vec::new();
    for tau in [0.0, 0.3, 0.8, 0.95, 1.05, 1.1, 1.6] {
        out.push(PotentialSpec::v1(1.0, tau));
        out.push(PotentialSpec::fig5(1.0, tau));
    }
    out
}

#[test]
fn spectrum_is_preserved() {
    for p in eligible_potentials() {
        let angle = potential_angle(&p).unwrap();
        for k in [-0.5, -0.2, 0.0, 0.35, 0.5] {
            let h = build_bloch(&p, k, 12).unwrap();
            let g = apply_gauge(&h, &angle).unwrap();
            let a = eig_values_only(&h.matrix().view()).unwrap();
            let b = eig_values_only(&g.matrix().view()).unwrap();
            let dev = multiset_dev(&a, &b);
            assert!(dev < 1e-9, "{} k={k}: {dev:e}", p.label());
        }
    }
}

#[test]
fn diagonal_is_untouched() {
    for p in eligible_potentials() {
        let angle = potential_angle(&p).unwrap();
        let h = build_bloch(&p, 0.3, 10).unwrap();
        let g = apply_gauge(&h, &angle).unwrap();
        assert_eq!(h.matrix().diag(), g.matrix().diag());
    }
}

#[test]
fn gauged_vectors_are_eigenvectors() {
    for p in eligible_potentials() {
        let angle = potential_angle(&p).unwrap();
        // G spans |s|^{±M}; a small M keeps the amplified tail roundoff below the tolerance
        let h = build_bloch(&p, 0.0, 6).unwrap();
        let g = apply_gauge(&h, &angle).unwrap();
        let d = eig(&h.matrix().view()).unwrap();
        for i in 0..4 {
            let mut w = gauge_vector(&d.vector(i), &angle).unwrap();
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            w.mapv_inplace(|z| z / norm);
            let r = residual(&g.matrix().view(), d.eigenvalues()[i], &w.view());
            assert!(r < 1e-9, "{} state {i}: {r:e}", p.label());
        }
    }
}

#[test]
fn identity_angle_changes_nothing() {
    let h = build_bloch(&PotentialSpec::v1(1.0, 0.0), 0.2, 6).unwrap();
    let angle = gauge_angle(0.5, 0.5).unwrap();
    assert_eq!(angle.theta(), Some(c(0.0, 0.0)));
    assert_eq!(apply_gauge(&h, &angle).unwrap().matrix(), h.matrix());
}

#[test]
fn undefined_regime_is_refused() {
    let angle = gauge_angle(0.0, 1.0).unwrap();
    assert_eq!(angle.regime(), GaugeRegime::Undefined);
    let h = build_bloch(&PotentialSpec::v1(1.0, 1.0), 0.0, 4).unwrap();
    assert!(apply_gauge(&h, &angle).is_err());
    assert!(hermitian_equivalent(&PotentialSpec::v1(1.0, 1.0)).is_err());
}

#[test]
fn equivalent_bands_match_from_scratch() {
    let ks = linspace(-0.5, 0.5, 21);
    for tau in [0.4, 0.8, 1.1, 1.4] {
        for p in [PotentialSpec::v1(1.0, tau), PotentialSpec::fig5(1.0, tau)] {
            let eq = hermitian_equivalent(&p).unwrap();
            let tilde = eq.transformed_potential.unwrap();
            let a = band_sweep(&p, &ks, 32, 4).unwrap();
            let b = band_sweep(&tilde, &ks, 32, 4).unwrap();
            assert!(a.max_deviation(&b) < 1e-8, "{} vs {}", p.label(), tilde.label());
            let expect = if tau < 1.0 { Character::RealHermitian } else { Character::PurelyImaginary };
            if p.coefficient(2).norm() == 0.0 {
                assert_eq!(eq.character, Some(expect));
            }
        }
    }
}

#[test]
fn fig5_equivalent_has_closed_form() {
    for tau in [0.2, 0.5, 0.9] {
        let eq = hermitian_equivalent(&PotentialSpec::fig5(1.0, tau)).unwrap();
        let tilde = eq.transformed_potential.unwrap();
        let r = (1.0 - tau * tau).sqrt();
        assert!((tilde.coefficient(1) - c(r / 2.0, 0.0)).norm() < 1e-14);
        assert!((tilde.coefficient(-1) - c(r / 2.0, 0.0)).norm() < 1e-14);
        assert!((tilde.coefficient(2) - c((1.0 - tau * tau) / 2.0, 0.0)).norm() < 1e-14);
        assert_eq!(eq.character, Some(Character::RealHermitian));
    }
}

#[test]
fn second_harmonic_eligibility() {
    assert!(symmetrizable(&PotentialSpec::fig5(1.0, 0.5)).unwrap());
    assert!(!symmetrizable(&PotentialSpec::v1_plus_v2(1.0, 0.5)).unwrap());
    let r = equivalence(&PotentialSpec::v1_plus_v2(1.0, 0.5)).unwrap();
    assert!(!r.eligible && r.reason.is_some());
    let wide = PotentialSpec::v1(1.0, 0.5).add(&PotentialSpec::harmonic(3, 1.0, 0.5));
    assert!(symmetrizable(&wide).is_err());
}

#[test]
fn negative_control_is_always_symmetric() {
    for i in 0..=20 {
        let tau = 0.1 * i as f64;
        let h = dirichlet_negative_control(1.0, tau, 12).unwrap();
        assert!(couplings_symmetric(&h), "τ={tau}");
        let oracle = dirichlet_by_quadrature(1.0, tau, 12);
        let dev = h.iter().zip(oracle.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-10, "τ={tau}: {dev:e}");
    }
}

#[test]
fn negative_control_entries() {
    let h = dirichlet_negative_control(1.0, 0.8, 5).unwrap();
    assert_eq!(h[[0, 1]], c(0.0, 0.4));
    assert_eq!(h[[1, 0]], c(0.0, 0.4));
    assert_eq!(h[[0, 0]], c(-0.25, 0.0));
    let real = dirichlet_negative_control(1.0, 0.0, 5).unwrap();
    assert!(real.iter().all(|z| z.im == 0.0));
    assert!(dirichlet_negative_control(1.0, 0.5, 3).is_err());
}
