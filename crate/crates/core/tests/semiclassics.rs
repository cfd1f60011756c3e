use std::f64::consts::PI;

use bec_dimer_core::classical::{
    angles_to_qp, classical_hamiltonian, coherent_symbol, default_omega_step, eom_rhs, integrate_orbit,
    BlochPoint, ClassicalState,
};
use bec_dimer_core::quantum::{
    build_hamiltonian, build_operators, coherent_expectation, coherent_state, evolve, spectrum, AngleCoordinates,
    SpinBasis,
};
use bec_dimer_core::ModelParams;
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (2usize..60, -2.0f64..2.0, 0.0f64..0.2, 0.0f64..0.05, 0.0f64..0.01)
        .prop_map(|(n, o, k, e, l)| ModelParams::new(n, o, k, e, l).unwrap())
}

fn angles_strategy() -> impl Strategy<Value = AngleCoordinates> {
    (0.0f64..PI, -PI..PI).prop_map(|(t, p)| AngleCoordinates::new(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classical_energy_is_the_coherent_expectation(p in params_strategy(), at in angles_strategy()) {
        let exact = coherent_expectation(&p, at).unwrap();
        let symbol = coherent_symbol(at, &p);
        prop_assert!((exact - symbol).abs() <= 1e-10 * (1.0 + exact.abs()), "{exact} vs {symbol}");
    }

    #[test]
    fn equations_of_motion_are_the_symplectic_gradient(p in params_strategy(), at in angles_strategy()) {
        let j = p.j();
        prop_assume!(at.theta < 0.95 * PI);
        let s = angles_to_qp(at, j).unwrap();
        let h = 1e-6 * (1.0 + j.sqrt());
        let e = |q: f64, pp: f64| classical_hamiltonian(&ClassicalState { q, p: pp }, &p).unwrap();
        let dh_dq = (e(s.q + h, s.p) - e(s.q - h, s.p)) / (2.0 * h);
        let dh_dp = (e(s.q, s.p + h) - e(s.q, s.p - h)) / (2.0 * h);
        let (qd, pd) = eom_rhs(&s, &p);
        let scale = 1.0 + qd.abs().max(pd.abs());
        prop_assert!((qd - dh_dp).abs() <= 1e-5 * scale, "{qd} vs {dh_dp}");
        prop_assert!((pd + dh_dq).abs() <= 1e-5 * scale, "{pd} vs {}", -dh_dq);
    }

    #[test]
    fn coherent_bloch_vector(n in 1usize..80, at in angles_strategy()) {
        let basis = SpinBasis::new(n).unwrap();
        let ops = build_operators(&basis);
        let v = coherent_state(at, &basis).bloch_vector(&ops);
        let want = BlochPoint::from_angles(at);
        prop_assert!((v[0] - want.x).abs() < 1e-12);
        prop_assert!((v[1] - want.y).abs() < 1e-12);
        prop_assert!((v[2] - want.z).abs() < 1e-12);
    }
}

#[test]
fn energy_is_conserved_by_the_integrator() {
    let p = ModelParams::with_overlap_lambda(100, 1.0, 0.02, 0.0002).unwrap();
    for at in [(PI / 2.0, 0.0), (1.0, 2.0), (2.5, -1.0)] {
        let s = angles_to_qp(AngleCoordinates::new(at.0, at.1).unwrap(), p.j()).unwrap();
        let orbit = integrate_orbit(s, &p, 100.0, default_omega_step(&p)).unwrap();
        let e0 = orbit.samples[0].energy;
        assert!(orbit.max_energy_drift() <= 1e-8 * e0.abs().max(1.0), "{}", orbit.max_energy_drift());
    }
}

#[test]
fn inversion_symmetry_of_orbits() {
    let p = ModelParams::with_overlap_lambda(60, 1.0, 0.05, 0.001).unwrap();
    let s = ClassicalState { q: 2.1, p: -0.7 };
    let a = integrate_orbit(s, &p, 20.0, 1e-3).unwrap();
    let b = integrate_orbit(ClassicalState { q: -2.1, p: 0.7 }, &p, 20.0, 1e-3).unwrap();
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert!((x.q + y.q).abs() < 1e-14 && (x.p + y.p).abs() < 1e-14);
        assert_eq!(x.energy, y.energy);
    }
}

#[test]
fn ground_state_energy_is_semiclassical() {
    let p = ModelParams::with_overlap_lambda(200, 1.0, 0.01, 0.0001).unwrap();
    let e0 = spectrum(&p).unwrap()[0];
    let mut min = f64::INFINITY;
    for i in 0..=200 {
        for jj in 0..64 {
            let at = AngleCoordinates::new(i as f64 * PI / 200.0, -PI + jj as f64 * PI / 32.0).unwrap();
            min = min.min(coherent_symbol(at, &p));
        }
    }
    // The coherent-state minimum is a variational bound, close for large N.
    assert!(e0 <= min + 1e-9 * min.abs());
    assert!((min - e0).abs() <= 0.05 * e0.abs(), "{e0} vs {min}");
}

#[test]
fn free_precession_quantum_and_classical() {
    let omega = 1.0;
    let p = ModelParams::new(30, omega, 0.0, 0.0, 0.0).unwrap();
    let at = AngleCoordinates::new(1.1, 0.3).unwrap();
    let basis = SpinBasis::new(30).unwrap();
    let h = build_hamiltonian(&p, &basis).unwrap();
    let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
    let obs = evolve(&coherent_state(at, &basis), &h, &times).unwrap();
    let s = angles_to_qp(at, p.j()).unwrap();
    for o in &obs {
        let want = at.theta.sin() * (at.phi + omega * o.t).cos();
        assert!((o.jx_over_j - want).abs() < 1e-11, "t = {}", o.t);
        assert!((o.jz_over_j + at.theta.cos()).abs() < 1e-11);
        if o.t > 0.0 {
            let orbit = integrate_orbit(s, &p, o.t, 1e-3).unwrap();
            let x = orbit.samples.last().unwrap().x;
            assert!((x - want).abs() < 1e-9, "t = {}: {x} vs {want}", o.t);
        }
    }
}

#[test]
fn short_time_quantum_classical_agreement() {
    let p = ModelParams::with_overlap_lambda(400, 1.0, 0.005, 0.00005).unwrap();
    let at = AngleCoordinates::new(PI / 2.0, 0.0).unwrap();
    let basis = SpinBasis::new(400).unwrap();
    let h = build_hamiltonian(&p, &basis).unwrap();
    let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.2).collect();
    let obs = evolve(&coherent_state(at, &basis), &h, &times).unwrap();
    let s = angles_to_qp(at, p.j()).unwrap();
    let orbit = integrate_orbit(s, &p, 2.0, 1e-3).unwrap();
    for o in obs.iter().skip(1) {
        let idx = (o.t / 1e-3).round() as usize;
        let x = orbit.samples[idx].x;
        assert!((o.jx_over_j - x).abs() < 0.02, "t = {}: {} vs {x}", o.t, o.jx_over_j);
    }
}
