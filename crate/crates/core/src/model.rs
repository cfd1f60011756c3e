//! Model parameters of the two-mode condensate and their algebraic relations.
//!
//! `Ω` is the bare tunneling, `κ` the on-site collision strength and `η`, `Λ`
//! the cross-collision strengths between atoms in different wells. The
//! cross-collision couplings enter the dynamics through the effective
//! tunneling `Ω' = 2[2Λ(N - 1) + Ω/2]`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::quad_gauss_legendre;
use crate::{Error, Result};

/// Default dominance factor used to operationalize "much larger than".
pub const DEFAULT_RATIO_MIN: f64 = 5.0;

/// Largest well overlap accepted by [`from_trap`].
pub const MAX_OVERLAP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(rename = "N")]
    pub n_particles: usize,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub kappa: f64,
    pub eta: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(n_particles: usize, omega: f64, kappa: f64, eta: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            n_particles,
            omega,
            kappa,
            eta,
            lambda,
        };
        p.check()?;
        Ok(p)
    }

    /// `Λ` taken from the overlap identity, see [`lambda_from_overlap`].
    pub fn with_overlap_lambda(n_particles: usize, omega: f64, kappa: f64, eta: f64) -> Result<Self> {
        if kappa > 0.0 && !(0.0..=kappa).contains(&eta) {
            return Err(Error::InvalidParams(format!(
                "overlap convention needs 0 <= eta <= kappa (eta = {eta}, kappa = {kappa})"
            )));
        }
        let lambda = if kappa > 0.0 { lambda_from_overlap(kappa, eta) } else { 0.0 };
        Self::new(n_particles, omega, kappa, eta, lambda)
    }

    pub fn check(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(Error::InvalidParams(format!("N must be at least 2, got {}", self.n_particles)));
        }
        for (name, v) in [("Omega", self.omega), ("kappa", self.kappa), ("eta", self.eta), ("Lambda", self.lambda)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} is not finite")));
            }
        }
        for (name, v) in [("kappa", self.kappa), ("eta", self.eta), ("Lambda", self.lambda)] {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn j(&self) -> f64 {
        self.n_particles as f64 / 2.0
    }

    pub fn derive(&self) -> DerivedParams {
        derive(self)
    }
}

/// Quantities derived in closed form from [`ModelParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    #[serde(rename = "J")]
    pub j: f64,
    /// Effective tunneling `Ω'`.
    #[serde(rename = "Omega_prime")]
    pub omega_prime: f64,
    /// `k = (κ - η)(2J - 1)/(4J)`.
    pub k: f64,
    /// `n = η(2J - 1)/(2J)`.
    pub n: f64,
    /// `R = 2√J`.
    #[serde(rename = "R")]
    pub r: f64,
}

pub fn derive(params: &ModelParams) -> DerivedParams {
    let n_particles = params.n_particles as f64;
    let j = n_particles / 2.0;
    DerivedParams {
        j,
        omega_prime: 2.0 * (2.0 * params.lambda * (n_particles - 1.0) + params.omega / 2.0),
        k: (params.kappa - params.eta) * (2.0 * j - 1.0) / (4.0 * j),
        n: params.eta * (2.0 * j - 1.0) / (2.0 * j),
        r: 2.0 * j.sqrt(),
    }
}

/// `Λ = κ ε^{3/2}` with the overlap fixed by `η = κ ε²`, i.e. `κ (η/κ)^{3/4}`.
pub fn lambda_from_overlap(kappa: f64, eta: f64) -> f64 {
    if eta == 0.0 {
        0.0
    } else {
        kappa * (eta / kappa).powf(0.75)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegimeViolation {
    EtaNotSmallerThanKappa { eta: f64, bound: f64 },
    LambdaNotSmallerThanKappa { lambda: f64, bound: f64 },
    LambdaNotSmallerThanOmega { lambda: f64, bound: f64 },
    EtaExceedsLambda { eta: f64, lambda: f64 },
    /// `R²n ≥ Ω'/2`: the parameter set admits the fixed points on the `φ = ±π/2` meridian.
    FamilyCRegion { r2n: f64, half_omega_prime: f64 },
}

impl fmt::Display for RegimeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EtaNotSmallerThanKappa { eta, bound } => write!(f, "eta = {eta} exceeds kappa/ratio = {bound}"),
            Self::LambdaNotSmallerThanKappa { lambda, bound } => {
                write!(f, "Lambda = {lambda} exceeds kappa/ratio = {bound}")
            }
            Self::LambdaNotSmallerThanOmega { lambda, bound } => {
                write!(f, "Lambda = {lambda} exceeds Omega/ratio = {bound}")
            }
            Self::EtaExceedsLambda { eta, lambda } => write!(f, "eta = {eta} exceeds Lambda = {lambda}"),
            Self::FamilyCRegion { r2n, half_omega_prime } => {
                write!(f, "family-(c) region: R^2 n = {r2n} >= Omega'/2 = {half_omega_prime}")
            }
        }
    }
}

/// Checks the two-mode regime `Ω, κ ≫ Λ, η` with `Λ ≥ η`, where "≫" means a
/// ratio of at least `ratio_min`. An empty list means the parameters pass.
pub fn validate_regime(params: &ModelParams, ratio_min: f64) -> Vec<RegimeViolation> {
    let mut out = Vec::new();
    let kappa_bound = params.kappa / ratio_min;
    let omega_bound = params.omega.abs() / ratio_min;
    if params.eta > kappa_bound {
        out.push(RegimeViolation::EtaNotSmallerThanKappa {
            eta: params.eta,
            bound: kappa_bound,
        });
    }
    if params.lambda > kappa_bound {
        out.push(RegimeViolation::LambdaNotSmallerThanKappa {
            lambda: params.lambda,
            bound: kappa_bound,
        });
    }
    if params.lambda > omega_bound {
        out.push(RegimeViolation::LambdaNotSmallerThanOmega {
            lambda: params.lambda,
            bound: omega_bound,
        });
    }
    if params.eta > 0.0 && params.lambda > 0.0 && params.eta > params.lambda {
        out.push(RegimeViolation::EtaExceedsLambda {
            eta: params.eta,
            lambda: params.lambda,
        });
    }
    let d = derive(params);
    let r2n = d.r * d.r * d.n;
    if r2n >= d.omega_prime / 2.0 {
        out.push(RegimeViolation::FamilyCRegion {
            r2n,
            half_omega_prime: d.omega_prime / 2.0,
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BifurcationSides {
    /// `(κ - 3η)(N - 1)`
    pub lhs: f64,
    /// `2Λ(N - 1) + Ω/2`
    pub rhs: f64,
    pub bifurcated: bool,
}

pub fn bifurcation_sides(params: &ModelParams) -> BifurcationSides {
    let nm1 = params.n_particles as f64 - 1.0;
    let lhs = (params.kappa - 3.0 * params.eta) * nm1;
    let rhs = 2.0 * params.lambda * nm1 + params.omega / 2.0;
    BifurcationSides {
        lhs,
        rhs,
        bifurcated: lhs > rhs,
    }
}

/// The same condition written as `R²(k - n)` against `Ω'/2`.
pub fn bifurcation_sides_spin_form(params: &ModelParams) -> BifurcationSides {
    let d = derive(params);
    let lhs = d.r * d.r * (d.k - d.n);
    let rhs = d.omega_prime / 2.0;
    BifurcationSides {
        lhs,
        rhs,
        bifurcated: lhs > rhs,
    }
}

/// `κ_c = [2Λ(N - 1) + Ω/2]/(N - 1) + 3η`, the self-collision at which the
/// pitchfork bifurcation occurs.
pub fn critical_kappa(n_particles: usize, omega: f64, eta: f64, lambda: f64) -> f64 {
    let nm1 = n_particles as f64 - 1.0;
    (2.0 * lambda * nm1 + omega / 2.0) / nm1 + 3.0 * eta
}

/// Physical double-well trap with isotropic harmonic wells (`ħ = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapGeometry {
    pub mass: f64,
    pub omega_trap: f64,
    /// Half the separation between the two minima.
    pub q0: f64,
    /// s-wave scattering length.
    pub a_scatter: f64,
}

impl TrapGeometry {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("omega_trap", self.omega_trap),
            ("q0", self.q0),
            ("a_scatter", self.a_scatter),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("trap {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Oscillator length `d = √(1/(mω))`.
    pub fn width(&self) -> f64 {
        (1.0 / (self.mass * self.omega_trap)).sqrt()
    }

    /// Barrier coefficient, fixed to `mω²/8` so each well is isotropic to second order.
    pub fn barrier(&self) -> f64 {
        self.mass * self.omega_trap * self.omega_trap / 8.0
    }

    /// Contact strength `V₀ = 4πa/m`.
    pub fn contact_strength(&self) -> f64 {
        4.0 * PI * self.a_scatter / self.mass
    }

    /// Overlap `ε = ⟨u₊|u₋⟩ = exp(-q₀²/d²)`.
    pub fn overlap(&self) -> f64 {
        let d = self.width();
        (-(self.q0 * self.q0) / (d * d)).exp()
    }

    /// Double-well potential along the separation axis.
    pub fn potential_x(&self, x: f64) -> f64 {
        let s = x * x - self.q0 * self.q0;
        self.barrier() / (self.q0 * self.q0) * s * s
    }

    fn orbital_1d(&self, x: f64, centre: f64) -> f64 {
        let d = self.width();
        PI.powf(-0.25) / d.sqrt() * (-(x - centre).powi(2) / (2.0 * d * d)).exp()
    }

    fn orbital_1d_derivative(&self, x: f64, centre: f64) -> f64 {
        let d = self.width();
        -(x - centre) / (d * d) * self.orbital_1d(x, centre)
    }

    fn quadrature_half_width(&self) -> f64 {
        self.q0 + 10.0 * self.width()
    }
}

/// Trap-derived couplings together with the intermediate integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrapDerived {
    pub params: ModelParams,
    pub epsilon: f64,
    pub width: f64,
    pub barrier: f64,
    pub contact_strength: f64,
}

const TRAP_QUAD_POINTS: usize = 4096;

/// Two-mode couplings of a trap holding `n_particles` atoms.
///
/// `κ = (V₀/2)∫u⁴`, `η = κε²`, `Λ = κε^{3/2}` and `Ω = 2⟨u₋|H|u₊⟩`, with the
/// single-particle Hamiltonian split into separable one-dimensional integrals.
pub fn from_trap(trap: &TrapGeometry, n_particles: usize) -> Result<TrapDerived> {
    trap.check()?;
    let epsilon = trap.overlap();
    if epsilon >= MAX_OVERLAP {
        return Err(Error::OverlapTooLarge {
            epsilon,
            max: MAX_OVERLAP,
        });
    }
    let hw = trap.quadrature_half_width();
    let q0 = trap.q0;
    let m = trap.mass;
    let w = trap.omega_trap;

    let quartic_1d = quad_gauss_legendre(|x| trap.orbital_1d(x, q0).powi(4), hw, TRAP_QUAD_POINTS)?;
    let kappa = trap.contact_strength() / 2.0 * quartic_1d.powi(3);

    // Transverse factor: ground state of a 1-D oscillator, once per axis.
    let transverse_norm = quad_gauss_legendre(|y| trap.orbital_1d(y, 0.0).powi(2), hw, TRAP_QUAD_POINTS)?;
    let transverse_energy = quad_gauss_legendre(
        |y| {
            let g = trap.orbital_1d(y, 0.0);
            let dg = trap.orbital_1d_derivative(y, 0.0);
            dg * dg / (2.0 * m) + 0.5 * m * w * w * y * y * g * g
        },
        hw,
        TRAP_QUAD_POINTS,
    )?;
    let overlap_x = quad_gauss_legendre(|x| trap.orbital_1d(x, -q0) * trap.orbital_1d(x, q0), hw, TRAP_QUAD_POINTS)?;
    let hopping_x = quad_gauss_legendre(
        |x| {
            let kinetic = trap.orbital_1d_derivative(x, -q0) * trap.orbital_1d_derivative(x, q0) / (2.0 * m);
            kinetic + trap.potential_x(x) * trap.orbital_1d(x, -q0) * trap.orbital_1d(x, q0)
        },
        hw,
        TRAP_QUAD_POINTS,
    )?;
    let matrix_element = hopping_x * transverse_norm * transverse_norm
        + 2.0 * overlap_x * transverse_energy * transverse_norm;
    let omega = 2.0 * matrix_element;

    let params = ModelParams::new(
        n_particles,
        omega,
        kappa,
        kappa * epsilon * epsilon,
        kappa * epsilon.powf(1.5),
    )?;
    Ok(TrapDerived {
        params,
        epsilon,
        width: trap.width(),
        barrier: trap.barrier(),
        contact_strength: trap.contact_strength(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn derive_examples() {
        let d = derive(&ModelParams::new(100, 1.0, 0.01, 0.0, 0.0).unwrap());
        assert_eq!(d.j, 50.0);
        assert_eq!(d.omega_prime, 1.0);
        assert!(close(d.k, 0.00495, 1e-15));
        assert_eq!(d.n, 0.0);
        assert!(close(d.r * d.r, 200.0, 1e-12));

        let d = derive(&ModelParams::new(2, 1.0, 1.0, 0.0, 0.0).unwrap());
        assert_eq!(d.j, 1.0);
        assert_eq!(d.k, 0.25);

        // 2(2·0.0035566·99 + 0.5) = 2.40844 (to the digits of Λ).
        let d = derive(&ModelParams::new(100, 1.0, 0.02, 0.002, 0.0035566).unwrap());
        assert!(close(d.omega_prime, 2.4084, 1e-4));
        assert!(close(d.omega_prime, 2.0 * (2.0 * 0.0035566 * 99.0 + 0.5), 1e-14));
    }

    #[test]
    fn lambda_overlap_examples() {
        // ε = √(η/κ) = 0.1, Λ = 0.02 · 0.1^{1.5}
        assert!(close(lambda_from_overlap(0.02, 0.0002), 6.3246e-4, 1e-8));
        assert_eq!(lambda_from_overlap(0.3, 0.0), 0.0);
        assert!(close(lambda_from_overlap(0.3, 0.3), 0.3, 1e-16));
    }

    #[test]
    fn regime_examples() {
        let ok = ModelParams::with_overlap_lambda(100, 1.0, 0.02, 0.002).unwrap();
        assert!(close(ok.lambda, 0.0035566, 1e-7));
        assert!(validate_regime(&ok, DEFAULT_RATIO_MIN).is_empty());

        let bad = ModelParams::new(100, 1.0, 0.01, 0.02, 0.0).unwrap();
        let v = validate_regime(&bad, DEFAULT_RATIO_MIN);
        assert!(v.iter().any(|x| matches!(x, RegimeViolation::EtaNotSmallerThanKappa { .. })));

        // R²n = 2η(2J - 1) = Ω' with Ω = 1, Λ = 0  →  η = 1/(2·99).
        let eta = 1.0 / 198.0;
        let c = ModelParams::new(100, 1.0, 1.0, eta, 0.0).unwrap();
        let d = derive(&c);
        assert!(close(d.r * d.r * d.n, d.omega_prime, 1e-12));
        let v = validate_regime(&c, DEFAULT_RATIO_MIN);
        assert!(v.iter().any(|x| matches!(x, RegimeViolation::FamilyCRegion { .. })), "{v:?}");
    }

    #[test]
    fn bifurcation_examples() {
        let below = bifurcation_sides(&ModelParams::new(100, 1.0, 1.0 / 200.0, 0.0, 0.0).unwrap());
        assert!(close(below.lhs, 0.495, 1e-15) && below.rhs == 0.5 && !below.bifurcated);

        let above = bifurcation_sides(&ModelParams::new(100, 1.0, 1.1 / 200.0, 0.0, 0.0).unwrap());
        assert!(close(above.lhs, 0.5445, 1e-15) && above.bifurcated);

        let crit = bifurcation_sides(&ModelParams::new(100, 1.0, 1.0 / 198.0, 0.0, 0.0).unwrap());
        assert!(close(crit.lhs, crit.rhs, 1e-15));
    }

    #[test]
    fn critical_kappa_examples() {
        assert!(close(critical_kappa(100, 1.0, 0.0, 0.0), 1.0 / 198.0, 1e-16));
        assert_eq!(critical_kappa(2, 1.0, 0.0, 0.0), 0.5);
        assert!(close(critical_kappa(100, 1.0, 1e-4, 1e-4), 1.0 / 198.0 + 5e-4, 1e-15));
    }

    #[test]
    fn critical_kappa_matches_root_scan() {
        // Bisection on lhs - rhs as an independent route to the root.
        let (n, omega, eta, lambda) = (100, 1.0, 1e-4, 1e-4);
        let gap = |kappa: f64| {
            let s = bifurcation_sides(&ModelParams::new(n, omega, kappa, eta, lambda).unwrap());
            s.lhs - s.rhs
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!(close(0.5 * (lo + hi), critical_kappa(n, omega, eta, lambda), 1e-15));
        assert!(close(0.5 * (lo + hi), 5.5505e-3, 1e-7));
    }

    #[test]
    fn trap_overlap_and_identities() {
        let trap = TrapGeometry {
            mass: 1.0,
            omega_trap: 1.0,
            q0: 1.0,
            a_scatter: 0.01,
        };
        assert!(close(trap.overlap(), (-1.0f64).exp(), 1e-15));
        assert_eq!(trap.barrier(), 1.0 / 8.0);
        let t = from_trap(&trap, 100).unwrap();
        let p = t.params;
        assert!(close(p.eta / p.kappa, t.epsilon.powi(2), 1e-14));
        assert!(close(p.lambda / p.kappa, t.epsilon.powf(1.5), 1e-14));
    }

    #[test]
    fn trap_kappa_closed_form() {
        let trap = TrapGeometry {
            mass: 1.0,
            omega_trap: 1.0,
            q0: 2.5,
            a_scatter: 0.02,
        };
        let t = from_trap(&trap, 10).unwrap();
        let closed = trap.contact_strength() / 2.0 * (2.0 * PI).powf(-1.5) * t.width.powi(-3);
        assert!(close(t.params.kappa, closed, 1e-12 * closed.max(1.0)), "{} vs {closed}", t.params.kappa);
    }

    #[test]
    fn trap_rejects_overlapping_wells() {
        let trap = TrapGeometry {
            mass: 1.0,
            omega_trap: 1.0,
            q0: 0.5,
            a_scatter: 0.01,
        };
        assert!(matches!(from_trap(&trap, 10), Err(Error::OverlapTooLarge { .. })));
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(10, 1.0, -0.1, 0.0, 0.0).is_err());
        assert!(ModelParams::new(10, f64::NAN, 0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn json_field_names() {
        let p = ModelParams::new(100, 1.0, 0.02, 0.0002, 0.0).unwrap();
        let v = serde_json::to_value(p).unwrap();
        for key in ["N", "Omega", "kappa", "eta", "Lambda"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: ModelParams = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
