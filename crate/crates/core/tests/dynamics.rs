mod common;

use approx::assert_abs_diff_eq;
use common::*;
use proptest::prelude::*;
use qlimits::dynamics::*;
use qlimits::fisher::qfi;
use qlimits::qcore::{trace, vec_col, DensityMatrix, Superoperator};
use qlimits::Error;
use std::f64::consts::{FRAC_PI_2, PI};

fn tcl(theta: f64, secular: bool, omega_c: f64) -> NoiseModel {
    NoiseModel { theta, secular, omega_c, ..Default::default() }
}

/// exp(-Γ(t)) for the Ohmic TCL rate, written out independently.
fn tcl_envelope(m: &NoiseModel, t: f64) -> f64 {
    let x = m.omega_c * t;
    (-(m.lambda / m.beta) * (t * x.atan() - (1.0 + x * x).ln() / (2.0 * m.omega_c))).exp()
}

fn xy_radius(rho: &DensityMatrix) -> f64 {
    let b = rho.bloch().unwrap();
    b[0].hypot(b[1])
}

#[test]
fn rate_examples() {
    let m = NoiseModel::default();
    assert_eq!(rate_ohmic(0.0, &m).unwrap(), 0.0);
    let m = NoiseModel { lambda: 1.0, beta: 2.0, omega_c: 1.0, ..Default::default() };
    assert_abs_diff_eq!(rate_ohmic(1.0, &m).unwrap(), PI / 8.0, epsilon = 1e-15);
    assert_abs_diff_eq!(rate_ohmic(1e12, &m).unwrap(), m.gamma_infinity(), epsilon = 1e-10);
    let s = NoiseModel { rate_kind: RateKind::Semigroup, ..m };
    assert_abs_diff_eq!(rate_ohmic(0.3, &s).unwrap(), PI / 4.0, epsilon = 1e-15);
    assert!(matches!(rate_ohmic(-1.0, &s), Err(Error::NegativeTime(_))));
}

#[test]
fn rate_is_monotone() {
    let m = NoiseModel::default();
    let mut prev = 0.0;
    for k in 0..200 {
        let r = rate_ohmic(k as f64 * 0.01, &m).unwrap();
        assert!(r >= prev);
        prev = r;
    }
}

#[test]
fn invalid_models_rejected() {
    assert!(NoiseModel::new(0.0, 0.1, -1.0, 1.0, RateKind::TclOhmic, true).is_err());
    assert!(NoiseModel::new(0.0, 0.1, 1.0, 0.0, RateKind::TclOhmic, true).is_err());
    assert!(RateTable::new(vec![0.0, 1.0], vec![0.1, -0.1]).is_err());
    assert!(RateTable::new(vec![0.0, 0.0], vec![0.1, 0.1]).is_err());
}

#[test]
fn custom_rate_out_of_range() {
    let m = NoiseModel::dephasing(0.2, 1.0).unwrap();
    assert!(matches!(generator(&m, 1.0, 2.0), Err(Error::RateTableOutOfRange(_))));
}

#[test]
fn dephasing_preserves_populations() {
    for secular in [true, false] {
        let m = tcl(FRAC_PI_2, secular, 5.0);
        let rho = random_density(&mut rng(1), 2);
        let out = propagate(&m, 1.0, 2.0).unwrap().map.apply(&rho).unwrap();
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, rho.matrix()[(0, 0)].re, epsilon = 1e-12);
    }
}

#[test]
fn transversal_secular_generator_is_phase_covariant() {
    let g = generator(&tcl(0.0, true, 5.0), 1.0, 0.5).unwrap();
    let ch = Superoperator::new(2, g.matrix().clone()).unwrap();
    assert!(phase_covariance_defect(&ch, 0.9) < 1e-12);
}

#[test]
fn noiseless_precession() {
    let m = NoiseModel::noiseless();
    let (w, grid) = (1.3, [0.0, 0.4, 1.1, 2.5]);
    let out = evolve_state(&m, w, &DensityMatrix::plus(), &grid).unwrap();
    for (rho, t) in out.iter().zip(grid) {
        let b = rho.bloch().unwrap();
        assert_abs_diff_eq!(b[0], (w * t).cos(), epsilon = 1e-10);
        assert_abs_diff_eq!(b[1], (w * t).sin(), epsilon = 1e-10);
        assert_abs_diff_eq!(b[2], 0.0, epsilon = 1e-12);
    }
    let t = 0.9;
    let ch = propagate(&m, 1.0, t).unwrap();
    let plus = DensityMatrix::plus();
    let f = qfi(&ch.map.apply(&plus).unwrap(), &ch.apply_derivative(&plus)).unwrap().value;
    assert_abs_diff_eq!(f, t * t, epsilon = 1e-10);
}

#[test]
fn tcl_envelope_matches_integrator() {
    for secular in [true, false] {
        let m = tcl(FRAC_PI_2, secular, 10.0);
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.15).collect();
        let out = evolve_state(&m, 1.0, &DensityMatrix::plus(), &grid).unwrap();
        for (rho, &t) in out.iter().zip(&grid) {
            assert!((xy_radius(rho) - tcl_envelope(&m, t)).abs() < 1e-7, "t={t}");
        }
    }
}

#[test]
fn semigroup_and_custom_dephasing() {
    let m = NoiseModel { rate_kind: RateKind::Semigroup, ..Default::default() };
    let t = 1.7;
    let out = propagate(&m, 1.0, t).unwrap().map.apply(&DensityMatrix::plus()).unwrap();
    assert_abs_diff_eq!(xy_radius(&out), (-m.gamma_infinity() * t).exp(), epsilon = 1e-10);

    // Custom constant table: coherence decays as exp(-γt).
    let gamma = 0.2;
    let m = NoiseModel::dephasing(gamma, 10.0).unwrap();
    let out = propagate(&m, 1.0, t).unwrap().map.apply(&DensityMatrix::plus()).unwrap();
    assert_abs_diff_eq!(xy_radius(&out), (-gamma * t).exp(), epsilon = 1e-10);
}

#[test]
fn maximally_mixed_is_fixed_under_dephasing() {
    let m = tcl(FRAC_PI_2, false, 5.0);
    let mixed = DensityMatrix::maximally_mixed(2);
    for rho in evolve_state(&m, 1.0, &mixed, &[0.0, 0.5, 3.0]).unwrap() {
        assert!((rho.matrix() - mixed.matrix()).norm() < 1e-12);
    }
}

#[test]
fn evolve_requires_grid_from_zero() {
    assert!(evolve_state(&NoiseModel::default(), 1.0, &DensityMatrix::plus(), &[0.5, 1.0]).is_err());
}

#[test]
fn phase_covariance() {
    let mut r = rng(11);
    use rand::Rng;
    for _ in 0..20 {
        let theta = r.random_range(0.0..FRAC_PI_2);
        let phi = r.random_range(0.0..2.0 * PI);
        let sec = propagate(&tcl(theta, true, 5.0), 1.0, 1.0).unwrap();
        assert!(phase_covariance_defect(&sec.map, phi) < 1e-7);
    }
    let non = propagate(&tcl(0.0, false, 5.0), 1.0, 1.0).unwrap();
    assert!(phase_covariance_defect(&non.map, 0.8) > 1e-3);
}

#[test]
fn semigroup_composition() {
    let (t1, t2) = (0.3, 0.7);
    let m = NoiseModel { theta: 0.5, secular: false, rate_kind: RateKind::Semigroup, ..Default::default() };
    let a = propagate(&m, 1.0, t1).unwrap().map;
    let b = propagate(&m, 1.0, t2).unwrap().map;
    let ab = propagate(&m, 1.0, t1 + t2).unwrap().map;
    assert!((ab.matrix() - b.compose(&a).unwrap().matrix()).norm() < 1e-7);

    // Time-dependent rates break the composition law at short times.
    let m = NoiseModel { theta: FRAC_PI_2, lambda: 1.0, omega_c: 10.0, ..Default::default() };
    let (t1, t2) = (0.05, 0.05);
    let a = propagate(&m, 1.0, t1).unwrap().map;
    let ab = propagate(&m, 1.0, t1 + t2).unwrap().map;
    assert!((ab.matrix() - a.compose(&a).unwrap().matrix()).norm() > 1e-4);
}

#[test]
fn short_time_decay_is_quadratic() {
    // Survival of |x+⟩ in the frame rotating with ω0, so only the envelope remains.
    let m = tcl(FRAC_PI_2, true, 10.0);
    let coeff = |h: f64| {
        let rho = propagate(&m, 0.0, h).unwrap().map.apply(&DensityMatrix::plus()).unwrap();
        let survival = (1.0 + rho.bloch().unwrap()[0]) / 2.0;
        (1.0 - survival) / (h * h)
    };
    let (a, b) = (coeff(1e-3), coeff(5e-4));
    assert!(a > 0.0);
    assert!(rel(a, b) < 1e-2, "{a} vs {b}");
}

#[test]
fn step_refinement_converges() {
    let m = tcl(0.3, false, 5.0);
    let t = 1.2;
    let n = default_steps(&m, 1.0, t);
    let a = propagate_channel(&m, 1.0, t, n).unwrap();
    let b = propagate_channel(&m, 1.0, t, 2 * n).unwrap();
    assert!((a.map.matrix() - b.map.matrix()).norm() < 1e-9);
}

#[test]
fn dmap_matches_finite_difference() {
    for (m, w, t) in [
        (tcl(0.0, false, 5.0), 1.0, 0.8),
        (tcl(0.7, true, 5.0), 2.0, 1.5),
        (NoiseModel { rate_kind: RateKind::Semigroup, theta: 0.3, ..Default::default() }, 0.5, 2.0),
    ] {
        let ch = propagate(&m, w, t).unwrap();
        let fd = dmap_finite_difference(&m, w, t);
        assert!((&fd - &ch.dmap).norm() / ch.dmap.norm() < 1e-6);
        assert!(ch.dmap_trace_defect() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagated_maps_are_channels(theta in 0.0..FRAC_PI_2, secular: bool, t in 0.0..3.0f64, seed in any::<u64>()) {
        let m = tcl(theta, secular, 5.0);
        let ch = propagate(&m, 1.0, t).unwrap();
        prop_assert!(ch.map.choi().min_eigenvalue() >= -1e-8);
        let rho = random_density(&mut rng(seed), 2);
        prop_assert!((trace(ch.map.apply(&rho).unwrap().matrix()).re - 1.0).abs() < 1e-9);
        let g = generator(&m, 1.0, t).unwrap();
        prop_assert!((g.matrix().adjoint() * vec_col(&qlimits::qcore::identity(2))).norm() < 1e-12);
    }
}

#[test]
fn derivative_generator_is_commutator() {
    let d = generator_derivative();
    let g1 = generator(&NoiseModel::noiseless(), 1.0, 0.0).unwrap();
    let g0 = generator(&NoiseModel::noiseless(), 0.0, 0.0).unwrap();
    assert!((g1.matrix() - g0.matrix() - &d).norm() < 1e-14);
}
