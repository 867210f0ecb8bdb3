mod common;

use common::c;
use nhbloch::bands::{
    align_peak, band_sweep, bands_at, fd_band_oracle, linspace, participation_ratio,
    reconstruct_wavefunction, tail_profile, write_wavefunction_csv, FdGrid, TailVerdict,
};
use nhbloch::eig::eig;
use nhbloch::gauge::{inverse_gauge_vector, potential_angle};
use nhbloch::model::{build_bloch, PotentialSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn named_potentials(tau: f64) -> [PotentialSpec; 3] {
    [
        PotentialSpec::v1(1.0, tau),
        PotentialSpec::v1_plus_v2(1.0, tau),
        PotentialSpec::fig5(1.0, tau),
    ]
}

#[test]
fn momentum_and_real_space_agree() {
    for tau in [0.0, 0.8, 1.0, 1.1] {
        for p in named_potentials(tau) {
            for k in [0.0, 0.25, 0.5] {
                let pw = bands_at(&p, k, 32, 3).unwrap();
                for (n, tol) in [(1024, 1e-3), (4096, 1e-4)] {
                    let fd = fd_band_oracle(&p, k, n, 3).unwrap();
                    let dev = pw.iter().zip(&fd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    assert!(dev < tol, "{} k={k} N={n}: {dev:e}", p.label());
                }
            }
        }
    }
}

#[test]
fn free_ring_spectrum() {
    let e = fd_band_oracle(&PotentialSpec::free(), 0.0, 512, 3).unwrap();
    assert!(e[0].norm() < 1e-4);
    assert!((e[1] - 1.0).norm() < 1e-4 && (e[2] - 1.0).norm() < 1e-4);
}

#[test]
fn ring_is_the_zone_centre() {
    let p = PotentialSpec::v1(1.0, 0.8);
    let grid = FdGrid::ring(p.period(), 1024).unwrap();
    assert_eq!(grid.bloch_phase(), c(1.0, 0.0));
    let ring = fd_band_oracle(&p, 0.0, 1024, 3).unwrap();
    let pw = bands_at(&p, 0.0, 32, 3).unwrap();
    for (a, b) in ring.iter().zip(&pw) {
        assert!((a - b).norm() < 1e-4);
    }
}

#[test]
fn unbroken_bands_are_real_across_the_zone() {
    let bs = band_sweep(&PotentialSpec::v1(1.0, 0.8), &linspace(-0.5, 0.5, 41), 32, 3).unwrap();
    assert!(bs.max_abs_imag() < 1e-9);
}

#[test]
fn pt_band_symmetry() {
    let ks = linspace(-0.5, 0.5, 21);
    for tau in [0.8, 1.1] {
        for p in named_potentials(tau) {
            let bs = band_sweep(&p, &ks, 32, 4).unwrap();
            let n = ks.len();
            for (ik, k) in ks.iter().enumerate() {
                let (a, b) = (bs.energies_at(ik), bs.energies_at(n - 1 - ik));
                for (band, w) in b.iter().enumerate() {
                    // ω_n(k) = ω_n(−k)* as multisets of the pair at complex points
                    let target = w.conj();
                    let best = a.iter().map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min);
                    assert!(best < 1e-9, "{} k={} band {}", p.label(), k, band + 1);
                }
            }
        }
    }
}

#[test]
fn band_vectors_are_eigenvectors() {
    let p = PotentialSpec::v1(1.0, 1.1);
    let ks = [-0.3, 0.0, 0.4];
    let bs = band_sweep(&p, &ks, 16, 4).unwrap();
    for (ik, &k) in ks.iter().enumerate() {
        let h = build_bloch(&p, k, 16).unwrap();
        for band in 1..=4 {
            let v = bs.vector(ik, band).unwrap();
            let r = nhbloch::eig::residual(&h.matrix().view(), bs.energy(ik, band), &v);
            assert!(r < 1e-10);
        }
    }
}

#[test]
fn unbroken_ground_state_density_is_even() {
    let p = PotentialSpec::v1(1.0, 0.8);
    let h = build_bloch(&p, 0.0, 32).unwrap();
    let psi = eig(&h.matrix().view()).unwrap().vector(0).to_owned();
    let xs = linspace(0.0, std::f64::consts::PI, 101);
    let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
    let a = reconstruct_wavefunction(psi.as_slice().unwrap(), 0.0, &xs);
    let b = reconstruct_wavefunction(psi.as_slice().unwrap(), 0.0, &neg);
    let asym = a.iter().zip(&b).map(|(x, y)| (x.norm() - y.norm()).abs()).fold(0.0, f64::max);
    assert!(asym < 1e-8, "{asym:e}");
}

fn hermitian_ground_state(k: f64) -> Vec<Complex64> {
    let h = build_bloch(&PotentialSpec::cosine(1, c(0.6, 0.0)), k, 32).unwrap();
    eig(&h.matrix().view()).unwrap().vector(0).to_vec()
}

#[test]
fn hermitian_tail_is_super_exponential() {
    let fit = tail_profile(&hermitian_ground_state(0.0)).unwrap();
    assert_eq!(fit.verdict, TailVerdict::SuperExponential);
    assert!(fit.quadratic_coeff < 0.0);
}

#[test]
fn zone_edge_state_is_displaced_by_half() {
    let centre = tail_profile(&hermitian_ground_state(0.0)).unwrap();
    let edge = tail_profile(&hermitian_ground_state(0.5)).unwrap();
    let shift = edge.vertex.unwrap() - centre.vertex.unwrap();
    assert!((shift + 0.5).abs() < 0.1, "vertex shift {shift}");
}

#[test]
fn inverse_gauge_keeps_super_exponential_tail() {
    let psi_t = ndarray::Array1::from(hermitian_ground_state(0.0));
    let angle = potential_angle(&PotentialSpec::v1(1.0, 0.8)).unwrap();
    let psi = inverse_gauge_vector(&psi_t.view(), &angle).unwrap();
    let fit = tail_profile(psi.as_slice().unwrap()).unwrap();
    assert_eq!(fit.verdict, TailVerdict::SuperExponential);
    assert!(fit.linear_coeff.abs() > 0.1, "gauge adds an exponential slope");
    // localization only mildly weakened
    let pr_t = participation_ratio(psi_t.as_slice().unwrap()).unwrap();
    let pr = participation_ratio(psi.as_slice().unwrap()).unwrap();
    assert!(pr > pr_t && pr < 2.0 * pr_t);
}

#[test]
fn wavefunction_csv_layout() {
    let xs = [0.0, 1.0];
    let psi = align_peak(&[c(0.0, 2.0), c(1.0, 0.0)]);
    let mut buf = Vec::new();
    write_wavefunction_csv(&mut buf, &xs, &psi).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re_psi,im_psi,abs_psi"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row, vec![0.0, 1.0, 0.0, 1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn participation_ratio_bounds(v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..80)) {
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
        match participation_ratio(&v) {
            Ok(pr) => prop_assert!((1.0..=v.len() as f64).contains(&pr)),
            Err(_) => prop_assert!(v.iter().all(|z| z.norm() == 0.0)),
        }
    }
}
