use std::f64::consts::PI;

use bec_dimer_core::classical::{
    angles_to_qp, classical_hamiltonian, classify_orbit, default_seed_lattice, fixed_points, separatrix_energy,
    Family, OrbitClass, Stability,
};
use bec_dimer_core::model::{bifurcation_sides, critical_kappa};
use bec_dimer_core::quantum::{build_hamiltonian, coherent_state, evolve, husimi_grid, AngleCoordinates, QuantumState, SpinBasis};
use bec_dimer_core::ModelParams;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn husimi_integrates_to_one(n in 1usize..40, seed in any::<u64>()) {
        let basis = SpinBasis::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..basis.dim()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let psi = QuantumState::new(basis, coeffs).unwrap();
        let grid = husimi_grid(&psi, n + 3, n + 2).unwrap();
        prop_assert!((grid.sphere_normalization(basis.j()) - 1.0).abs() < 1e-10);
        prop_assert!(grid.values.iter().all(|q| (-1e-15..=1.0 + 1e-12).contains(q)));
    }

    #[test]
    fn evolution_is_unitary(n in 2usize..40, theta in 0.0f64..PI, phi in -PI..PI) {
        let p = ModelParams::with_overlap_lambda(n, 1.0, 0.05, 0.001).unwrap();
        let basis = SpinBasis::new(n).unwrap();
        let h = build_hamiltonian(&p, &basis).unwrap();
        let psi = coherent_state(AngleCoordinates::new(theta, phi).unwrap(), &basis);
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 3.7).collect();
        for s in evolve(&psi, &h, &times).unwrap() {
            prop_assert!((s.norm - 1.0).abs() < 1e-12);
            prop_assert!(s.fidelity <= 1.0 + 1e-12 && s.fidelity >= 0.0);
        }
    }
}

#[test]
fn pitchfork_at_the_critical_self_collision() {
    let (n, omega, eta) = (100, 1.0, 0.0002);
    let lambda = 0.0005;
    let kc = critical_kappa(n, omega, eta, lambda);
    for factor in [0.5, 0.9, 0.99, 1.01, 1.1, 2.0] {
        let p = ModelParams::new(n, omega, factor * kc, eta, lambda).unwrap();
        let fps = fixed_points(&p);
        let b_exists = fps.iter().any(|f| f.family == Family::B && f.exists);
        let north = fps.iter().find(|f| f.family == Family::D).unwrap();
        let above = factor > 1.0;
        assert_eq!(b_exists, above, "factor {factor}");
        assert_eq!(bifurcation_sides(&p).bifurcated, above);
        let want = if above { Stability::UnstableSaddle } else { Stability::StableCenter };
        assert_eq!(north.stability, Some(want), "factor {factor}");
        if above {
            // The new pair leaves the north pole continuously.
            let theta = fps.iter().find(|f| f.family == Family::B).unwrap().angles.theta;
            assert!(theta > PI / 2.0 && theta < PI);
        }
    }
}

#[test]
fn bifurcated_pair_moves_toward_equator_with_kappa() {
    let kc = critical_kappa(100, 1.0, 0.0, 0.0);
    let mut last = PI;
    for factor in [1.01, 1.5, 3.0, 10.0, 100.0] {
        let p = ModelParams::new(100, 1.0, factor * kc, 0.0, 0.0).unwrap();
        let theta = fixed_points(&p).iter().find(|f| f.family == Family::B).unwrap().angles.theta;
        assert!(theta < last && theta > PI / 2.0);
        last = theta;
    }
}

#[test]
fn classifier_agrees_with_energy_on_the_seed_lattice() {
    for eta_ratio in [0.01, 0.025, 0.1] {
        let p = ModelParams::with_overlap_lambda(100, 1.0, 0.02, 0.02 * eta_ratio).unwrap();
        let e_sep = separatrix_energy(&p);
        let bif = bifurcation_sides(&p).bifurcated;
        for seed in default_seed_lattice() {
            let s = angles_to_qp(seed, p.j()).unwrap();
            let class = classify_orbit(s, &p, None, None).unwrap();
            let e = classical_hamiltonian(&s, &p).unwrap();
            let want = if bif && e > e_sep { OrbitClass::Mst } else { OrbitClass::Jo };
            assert_eq!(class, want, "eta/kappa = {eta_ratio}, seed {seed:?}");
        }
    }
}

#[test]
fn fixed_point_residuals_vanish() {
    for (k, e) in [(0.02, 0.0002), (0.05, 0.001), (0.0, 0.02), (0.1, 0.05)] {
        let p = ModelParams::new(100, 1.0, k, e, 0.0003).unwrap();
        let norm = 1.0 + p.omega.abs() + p.kappa + p.eta + p.lambda;
        for f in fixed_points(&p) {
            if let (true, Some(r)) = (f.exists, f.residual) {
                assert!(r <= 1e-12 * norm, "{f:?}");
            }
        }
    }
}
