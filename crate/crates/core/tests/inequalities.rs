mod common;

use std::f64::consts::PI;

use common::*;
use pde_ssc_core::lmi::{
    build_psi_hyperbolic, build_psi_parabolic, check_parabolic, check_hyperbolic, is_negative_semidefinite,
    search_feasible, wirtinger_factor, GammaInputs, HyperbolicLmiParams, ParabolicLmiParams, SearchGrid,
    SearchProblem, SymMatrix, Tuning, DEFAULT_TOLERANCE,
};
use pde_ssc_core::plant::Interval;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn piecewise_functions_obey_extended_wirtinger() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.random_range(1..6);
        let xs = random_breakpoints(&mut rng, 1.0, n);
        let delta = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let f = PiecewiseSine::random(&mut rng, xs, 4);
        let (v, s) = f.energies(400);
        assert!(v <= wirtinger_factor(delta) * s * (1.0 + 1e-6), "{v} vs {s}");
    }
}

#[test]
fn single_interval_sine_ratio() {
    let delta = 0.2;
    let v = simpson(|x| (PI * x / delta).sin().powi(2), 0.0, delta, 2000);
    let s = simpson(|x| (PI / delta * (PI * x / delta).cos()).powi(2), 0.0, delta, 2000);
    assert!((v / s - delta * delta / (PI * PI)).abs() < 1e-10);
}

#[test]
fn comparison_lemma_bound() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..20 {
        let delta = rng.random_range(0.1..5.0);
        let beta = rng.random_range(0.0..3.0);
        let w = rng.random_range(0.5..40.0);
        let v0 = rng.random_range(0.0..2.0);
        for (t, v) in comparison_ode(v0, delta, |t| beta * (w * t).sin().signum(), 5.0, 1e-3) {
            assert!(v <= (-delta * t).exp() * v0 + beta / delta + 1e-8);
        }
    }
}

fn random_symmetric(rng: &mut StdRng, n: usize) -> (SymMatrix, Vec<Vec<f64>>) {
    let shift = rng.random_range(0.0..3.0);
    let mut m = SymMatrix::zeros(n);
    let mut dense = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0) - if i == j { shift } else { 0.0 };
            m.set(i, j, v);
            dense[i][j] = v;
            dense[j][i] = v;
        }
    }
    (m, dense)
}

#[test]
fn eigenvalue_verdicts_agree_with_minors() {
    let mut rng = StdRng::seed_from_u64(3);
    let (mut yes, mut no) = (0, 0);
    for i in 0..400 {
        let n = 4 + i % 2;
        let (m, dense) = random_symmetric(&mut rng, n);
        let v = is_negative_semidefinite(&m, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(v.negative_semidefinite, nsd_by_minors(&dense, DEFAULT_TOLERANCE));
        if v.negative_semidefinite {
            yes += 1
        } else {
            no += 1
        }
    }
    assert!(yes > 50 && no > 50, "{yes} / {no}");
}

fn reference_point() -> ParabolicLmiParams {
    ParabolicLmiParams {
        tuning: Tuning {
            gain: 100.0,
            young_weight: 1.0,
            decay_rate: 1.0,
            beta_disturbance: 1.0,
            beta_shape: 1.0,
        },
        spacing: 0.1,
        a1_lower: 0.5,
        phi_upper: 5.0,
        a2: Interval::new(-5.0, 5.0).unwrap(),
    }
}

#[test]
fn reference_point_verdict_matches_minor_oracle() {
    let p = reference_point();
    let cert = check_parabolic(&p, DEFAULT_TOLERANCE).unwrap();
    for v in &cert.vertices {
        let m = build_psi_parabolic(&p, v.a2);
        let dense: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| m.get(i, j)).collect()).collect();
        assert_eq!(v.max_eigenvalue <= DEFAULT_TOLERANCE, nsd_by_minors(&dense, DEFAULT_TOLERANCE));
    }
    assert!(cert.feasible);
}

#[test]
fn parabolic_interior_points_inherit_vertex_feasibility() {
    let p = reference_point();
    assert!(check_parabolic(&p, DEFAULT_TOLERANCE).unwrap().feasible);
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..100 {
        let a2 = rng.random_range(p.a2.lo..=p.a2.hi);
        let m = build_psi_parabolic(&p, a2);
        assert!(is_negative_semidefinite(&m, DEFAULT_TOLERANCE).unwrap().negative_semidefinite);
    }
}

/// A small-gain damped-wave box on which the certificate holds.
pub fn feasible_wave_point() -> HyperbolicLmiParams {
    let b = pde_ssc_core::plant::PlantBounds {
        a1: Interval::new(1.0, 2.0).unwrap(),
        a2: Interval::new(-0.1, 0.1).unwrap(),
        phi: Interval::new(-0.1, 0.1).unwrap(),
        b: Some(Interval::new(2.0, 2.2).unwrap()),
        f_abs_max: 0.0,
    };
    let problem = SearchProblem::hyperbolic(&b, 0.1).unwrap();
    let grid = SearchGrid {
        gain: vec![0.25, 0.5, 1.0],
        young_weight: vec![0.25, 0.5, 1.0, 2.0],
        decay_rate: vec![0.01, 0.05, 0.1],
        beta_disturbance: vec![1.0, 10.0],
        beta_shape: vec![1.0, 10.0],
        p: vec![0.2, 0.3, 0.4],
    };
    let r = search_feasible(&problem, &grid, GammaInputs::default(), DEFAULT_TOLERANCE).unwrap();
    assert!(r.feasible(), "worst eigenvalue {}", r.best.worst_eigenvalue());
    match r.best.params {
        pde_ssc_core::lmi::CertificateParams::Hyperbolic(p) => p,
        _ => unreachable!(),
    }
}

#[test]
fn hyperbolic_interior_points_inherit_vertex_feasibility() {
    let p = feasible_wave_point();
    let cert = check_hyperbolic(&p, DEFAULT_TOLERANCE).unwrap();
    assert!(cert.feasible);
    assert_eq!(cert.vertices.len(), 8);
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..100 {
        let phi = rng.random_range(p.phi.lo..=p.phi.hi);
        let a2 = rng.random_range(p.a2.lo..=p.a2.hi);
        let b = rng.random_range(p.b.lo..=p.b.hi);
        let m = build_psi_hyperbolic(&p, phi, a2, b);
        assert!(is_negative_semidefinite(&m, DEFAULT_TOLERANCE).unwrap().negative_semidefinite);
    }
}

#[test]
fn vertex_order_does_not_change_verdict() {
    let p = feasible_wave_point();
    let cert = check_hyperbolic(&p, DEFAULT_TOLERANCE).unwrap();
    let mut lams: Vec<f64> = cert.vertices.iter().map(|v| v.max_eigenvalue).collect();
    lams.reverse();
    assert_eq!(lams.iter().all(|&l| l <= DEFAULT_TOLERANCE), cert.feasible);
}

#[test]
fn coarse_spacing_blocks_every_gain() {
    // K/R < pi^2 a1 / (2 Delta^2) and K R < 2K - 2 phi_max cannot both hold at Delta = 0.5
    let b = pde_ssc_core::scenarios::quoted_bounds();
    let problem = SearchProblem::parabolic(&b, 0.5);
    let mut grid = SearchGrid::around_gains(vec![1.0, 10.0, 100.0, 1000.0, 1e4]);
    grid.beta_disturbance = vec![1.0, 1e3];
    grid.beta_shape = vec![1.0, 1e3];
    let r = search_feasible(&problem, &grid, GammaInputs::default(), DEFAULT_TOLERANCE).unwrap();
    assert!(!r.feasible());
    assert_eq!(r.feasible_points, 0);
}
