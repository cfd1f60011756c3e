//! Mean-field dynamics on the Bloch sphere.
//!
//! The classical Hamiltonian is the coherent-state expectation of the
//! quasi-spin Hamiltonian with constant terms dropped. In the canonical
//! chart `τ = (q + ip)/√(4J - q² - p²)` it is the polynomial
//!
//! ```text
//! H(q, p) = -JΩ' + Ω's/2 + k q²(4J - s) - n s(4J - s),    s = q² + p²
//! ```
//!
//! whose symplectic gradient gives the equations of motion. The chart covers
//! the whole sphere except the north pole, which sits on the circle `s = 4J`.

mod fixed_points;
mod orbit;

pub use fixed_points::{fixed_points, stability, Family, FixedPointReport, Stability};
pub use orbit::{
    classify_orbit, default_omega_step, default_seed_lattice, integrate_orbit, integrate_orbit_strided,
    mst_seed_fraction, portrait, portrait_classes, Orbit, OrbitClass, OrbitSample, PortraitEntry,
};

use serde::{Deserialize, Serialize};

use crate::model::{derive, ModelParams};
use crate::quantum::AngleCoordinates;
use crate::{Error, Result};

/// Canonical pair of the spherical chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub q: f64,
    pub p: f64,
}

impl ClassicalState {
    pub fn new(q: f64, p: f64, j: f64) -> Result<Self> {
        let s = Self { q, p };
        s.check_chart(j)?;
        Ok(s)
    }

    pub fn radius_sqr(&self) -> f64 {
        self.q * self.q + self.p * self.p
    }

    pub fn check_chart(&self, j: f64) -> Result<()> {
        if self.radius_sqr() < 4.0 * j && self.q.is_finite() && self.p.is_finite() {
            Ok(())
        } else {
            Err(Error::OutsideChart {
                q: self.q,
                p: self.p,
                four_j: 4.0 * j,
            })
        }
    }
}

/// Unit Bloch vector, `(X, Y, Z) = ⟨J⟩/J` of the matching coherent state:
/// `X = sinθ cosφ`, `Y = sinθ sinφ`, `Z = -cosθ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn from_angles(at: AngleCoordinates) -> Self {
        Self {
            x: at.theta.sin() * at.phi.cos(),
            y: at.theta.sin() * at.phi.sin(),
            z: -at.theta.cos(),
        }
    }
}

/// The mean-field model in terms of `J`, `Ω'`, `k` and `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanField {
    pub j: f64,
    pub omega_prime: f64,
    pub k: f64,
    pub n: f64,
}

impl MeanField {
    pub fn new(params: &ModelParams) -> Self {
        let d = derive(params);
        Self {
            j: d.j,
            omega_prime: d.omega_prime,
            k: d.k,
            n: d.n,
        }
    }

    /// The same flow seen after rotating the sphere by π about the x axis,
    /// which swaps the poles and flips the sign of `Ω'`. The north pole of
    /// `self` is the origin of the rotated chart.
    pub fn rotated(&self) -> Self {
        Self {
            omega_prime: -self.omega_prime,
            ..*self
        }
    }

    pub fn hamiltonian(&self, q: f64, p: f64) -> f64 {
        let s = q * q + p * p;
        let four_j = 4.0 * self.j;
        -self.j * self.omega_prime + 0.5 * self.omega_prime * s + self.k * q * q * (four_j - s)
            - self.n * s * (four_j - s)
    }

    /// `(q̇, ṗ) = (∂H/∂p, -∂H/∂q)`.
    pub fn rhs(&self, q: f64, p: f64) -> (f64, f64) {
        let four_j = 4.0 * self.j;
        let s2 = 2.0 * q * q + 2.0 * p * p;
        let (k2, n2) = (2.0 * self.k, 2.0 * self.n);
        let qdot = self.omega_prime * p - k2 * q * q * p + n2 * p * (s2 - four_j);
        let pdot = -self.omega_prime * q - k2 * q * (four_j - 2.0 * q * q - p * p) - n2 * q * (s2 - four_j);
        (qdot, pdot)
    }

    /// `[[∂q̇/∂q, ∂q̇/∂p], [∂ṗ/∂q, ∂ṗ/∂p]]`.
    pub fn jacobian(&self, q: f64, p: f64) -> [[f64; 2]; 2] {
        let four_j = 4.0 * self.j;
        let (k, n) = (self.k, self.n);
        let s2 = 2.0 * q * q + 2.0 * p * p;
        let mixed = (-4.0 * k + 8.0 * n) * q * p;
        let fq = mixed;
        let fp = self.omega_prime - 2.0 * k * q * q + 2.0 * n * (s2 - four_j) + 8.0 * n * p * p;
        let gq = -self.omega_prime - 2.0 * k * (four_j - 6.0 * q * q - p * p) - 2.0 * n * (s2 - four_j) - 8.0 * n * q * q;
        let gp = -mixed;
        [[fq, fp], [gq, gp]]
    }

    /// Typical size of the Jacobian entries, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.omega_prime.abs() + 8.0 * self.j * (self.k.abs() + self.n.abs())
    }
}

/// Classical energy `H(τ, τ*)` at `state`.
pub fn classical_hamiltonian(state: &ClassicalState, params: &ModelParams) -> Result<f64> {
    let mf = MeanField::new(params);
    state.check_chart(mf.j)?;
    Ok(mf.hamiltonian(state.q, state.p))
}

/// Constant dropped from `⟨θ,φ|H|θ,φ⟩` by [`classical_hamiltonian`]:
/// `κJ + ηJ(4J - 1)`.
pub fn energy_offset(params: &ModelParams) -> f64 {
    let j = params.j();
    params.kappa * j + params.eta * j * (4.0 * j - 1.0)
}

/// Full coherent-state expectation of the Hamiltonian, constant included.
pub fn coherent_symbol(at: AngleCoordinates, params: &ModelParams) -> f64 {
    let mf = MeanField::new(params);
    if at.theta >= std::f64::consts::PI {
        return separatrix_energy(params) + energy_offset(params);
    }
    let s = angles_to_qp_unchecked(at, mf.j);
    mf.hamiltonian(s.q, s.p) + energy_offset(params)
}

/// Energy of the north pole, `JΩ'`. When the pole is a saddle this is the
/// energy of the separatrix between Josephson and self-trapped orbits.
pub fn separatrix_energy(params: &ModelParams) -> f64 {
    let d = derive(params);
    d.j * d.omega_prime
}

/// Equations of motion at `state`.
pub fn eom_rhs(state: &ClassicalState, params: &ModelParams) -> (f64, f64) {
    MeanField::new(params).rhs(state.q, state.p)
}

fn angles_to_qp_unchecked(at: AngleCoordinates, j: f64) -> ClassicalState {
    let r = 2.0 * j.sqrt() * (0.5 * at.theta).sin();
    ClassicalState {
        q: r * at.phi.cos(),
        p: -r * at.phi.sin(),
    }
}

/// `q = 2√J sin(θ/2) cosφ`, `p = -2√J sin(θ/2) sinφ`; the north pole is rejected.
pub fn angles_to_qp(at: AngleCoordinates, j: f64) -> Result<ClassicalState> {
    if !(0.0..std::f64::consts::PI).contains(&at.theta) {
        return Err(Error::InvalidParams(format!(
            "theta = {} is outside the chart [0, pi)",
            at.theta
        )));
    }
    Ok(angles_to_qp_unchecked(at, j))
}

pub fn qp_to_angles(state: &ClassicalState, j: f64) -> AngleCoordinates {
    let s = (state.radius_sqr() / (4.0 * j)).min(1.0);
    let theta = 2.0 * s.sqrt().asin();
    let phi = if state.radius_sqr() == 0.0 {
        0.0
    } else {
        (-state.p).atan2(state.q)
    };
    AngleCoordinates {
        theta,
        phi: crate::quantum::wrap_phi(phi),
    }
}

pub fn to_bloch(state: &ClassicalState, j: f64) -> BlochPoint {
    let s = state.radius_sqr();
    let root = (4.0 * j - s).max(0.0).sqrt();
    BlochPoint {
        x: state.q * root / (2.0 * j),
        y: -state.p * root / (2.0 * j),
        z: s / (2.0 * j) - 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    /// Classical energy written directly in `τ`, as a literal oracle.
    fn hamiltonian_in_tau(params: &ModelParams, at: AngleCoordinates) -> f64 {
        let d = derive(params);
        let j = d.j;
        let tau = Complex64::from_polar((0.5 * at.theta).tan(), -at.phi);
        let t2 = tau.norm_sqr();
        let re2 = (tau + tau.conj()).re.powi(2);
        -j * d.omega_prime * (1.0 - t2) / (1.0 + t2)
            + (params.kappa - params.eta) * j * (2.0 * j - 1.0) * re2 / (1.0 + t2).powi(2)
            - 8.0 * params.eta * j * (2.0 * j - 1.0) * t2 / (1.0 + t2).powi(2)
    }

    #[test]
    fn south_pole_energy() {
        let p = ModelParams::new(100, 1.0, 0.3, 0.0, 0.0).unwrap();
        let e = classical_hamiltonian(&ClassicalState { q: 0.0, p: 0.0 }, &p).unwrap();
        assert_eq!(e, -50.0);
    }

    #[test]
    fn equator_energy() {
        let p = ModelParams::new(100, 1.0, 0.01, 0.0, 0.0).unwrap();
        let s = angles_to_qp(AngleCoordinates::new(PI / 2.0, 0.0).unwrap(), 50.0).unwrap();
        let e = classical_hamiltonian(&s, &p).unwrap();
        assert!((e - 49.5).abs() < 1e-12, "{e}");
    }

    #[test]
    fn polynomial_form_matches_tau_form() {
        let p = ModelParams::new(10, 1.3, 0.2, 0.01, 0.02).unwrap();
        for i in 1..20 {
            for jj in 0..12 {
                let at = AngleCoordinates::new(i as f64 * PI / 20.0, -PI + jj as f64 * 0.5).unwrap();
                let s = angles_to_qp(at, 5.0).unwrap();
                let poly = classical_hamiltonian(&s, &p).unwrap();
                let tau = hamiltonian_in_tau(&p, at);
                assert!((poly - tau).abs() < 1e-11 * (1.0 + tau.abs()), "{poly} vs {tau}");
            }
        }
    }

    #[test]
    fn rhs_reductions() {
        let p = ModelParams::new(20, 1.0, 0.1, 0.0, 0.0).unwrap();
        assert_eq!(eom_rhs(&ClassicalState { q: 0.0, p: 0.0 }, &p), (0.0, 0.0));
        let j = 10.0;
        let q = 1.7;
        let (qd, pd) = eom_rhs(&ClassicalState { q, p: 0.0 }, &p);
        assert_eq!(qd, 0.0);
        let want = -1.0 * q - 0.1 * (2.0 * j - 1.0) / (2.0 * j) * q * (4.0 * j - 2.0 * q * q);
        assert!((pd - want).abs() < 1e-13);
    }

    #[test]
    fn chart_examples() {
        let j = 8.0;
        let south = angles_to_qp(AngleCoordinates::new(0.0, 0.7).unwrap(), j).unwrap();
        assert_eq!((south.q, south.p), (0.0, 0.0));
        let b = to_bloch(&south, j);
        assert_eq!((b.x, b.y, b.z), (0.0, 0.0, -1.0));

        let eq = angles_to_qp(AngleCoordinates::new(PI / 2.0, 0.0).unwrap(), j).unwrap();
        assert!((eq.q - (2.0 * j).sqrt()).abs() < 1e-14 && eq.p == 0.0);
        let b = to_bloch(&eq, j);
        assert!((b.x - 1.0).abs() < 1e-14 && b.y.abs() < 1e-15 && b.z.abs() < 1e-14);

        assert!(angles_to_qp(AngleCoordinates::new(PI, 0.0).unwrap(), j).is_err());
        assert!(ClassicalState::new(4.0, 4.0, 2.0).is_err());
    }

    #[test]
    fn chart_round_trip() {
        let j = 12.5;
        for i in 0..40 {
            for jj in 0..40 {
                let theta = i as f64 * PI / 40.0;
                let phi = crate::quantum::wrap_phi(-PI + (jj as f64 + 0.5) * 2.0 * PI / 40.0);
                let at = AngleCoordinates::new(theta, phi).unwrap();
                let s = angles_to_qp(at, j).unwrap();
                let b = to_bloch(&s, j);
                let direct = BlochPoint::from_angles(at);
                assert!((b.x - direct.x).abs() < 1e-12 && (b.y - direct.y).abs() < 1e-12 && (b.z - direct.z).abs() < 1e-12);
                assert!((b.x * b.x + b.y * b.y + b.z * b.z - 1.0).abs() < 1e-12);
                let back = qp_to_angles(&s, j);
                assert!((back.theta - theta).abs() < 1e-12);
                if theta > 0.0 {
                    assert!((back.phi - phi).abs() < 1e-12, "{} vs {phi}", back.phi);
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mf = MeanField::new(&ModelParams::new(30, 0.8, 0.05, 0.002, 0.001).unwrap());
        let h = 1e-6;
        for (q, p) in [(0.3, -1.2), (2.0, 3.1), (-4.0, 0.5)] {
            let jac = mf.jacobian(q, p);
            let (fqp, gqp) = mf.rhs(q + h, p);
            let (fqm, gqm) = mf.rhs(q - h, p);
            let (fpp, gpp) = mf.rhs(q, p + h);
            let (fpm, gpm) = mf.rhs(q, p - h);
            let fd = [[(fqp - fqm) / (2.0 * h), (fpp - fpm) / (2.0 * h)], [(gqp - gqm) / (2.0 * h), (gpp - gpm) / (2.0 * h)]];
            for r in 0..2 {
                for c in 0..2 {
                    assert!((jac[r][c] - fd[r][c]).abs() < 1e-6 * (1.0 + fd[r][c].abs()));
                }
            }
            assert_eq!(jac[0][0] + jac[1][1], 0.0);
        }
    }
}
