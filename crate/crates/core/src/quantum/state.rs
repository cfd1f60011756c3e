use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::{SpinBasis, SpinOperators};
use crate::numerics::{DenseMatrix, SymmetricMatrix};
use crate::{Error, Result};

/// A point on the Bloch sphere. `theta = 0` is the south pole `|J, -J⟩`,
/// `theta = π` the north pole `|J, +J⟩`; `phi ∈ (-π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleCoordinates {
    pub theta: f64,
    pub phi: f64,
}

impl AngleCoordinates {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidParams(format!("theta must lie in [0, pi], got {theta}")));
        }
        Ok(Self {
            theta,
            phi: wrap_phi(phi),
        })
    }

    /// Great-circle angle between two points.
    pub fn angular_distance(&self, other: &Self) -> f64 {
        let c = self.theta.cos() * other.theta.cos()
            + self.theta.sin() * other.theta.sin() * (self.phi - other.phi).cos();
        c.clamp(-1.0, 1.0).acos()
    }
}

/// Maps any angle into `(-π, π]`.
pub fn wrap_phi(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Normalized state vector in a [`SpinBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    basis: SpinBasis,
    coeffs: Vec<Complex64>,
}

impl QuantumState {
    /// Normalizes `coeffs`; fails on a length mismatch or a zero vector.
    pub fn new(basis: SpinBasis, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: coeffs.len(),
            });
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParams("state vector has zero or non-finite norm".into()));
        }
        coeffs.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { basis, coeffs })
    }

    pub fn basis_state(basis: SpinBasis, index: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.dim()];
        coeffs[index] = Complex64::new(1.0, 0.0);
        Self { basis, coeffs }
    }

    pub(crate) fn from_normalized(basis: SpinBasis, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), basis.dim());
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> &SpinBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ|A|ψ⟩` for real symmetric `A` (real by construction).
    pub fn expectation(&self, a: &SymmetricMatrix) -> f64 {
        let dim = self.coeffs.len();
        let mut total = 0.0;
        for i in 0..dim {
            let ci = self.coeffs[i];
            total += a.get(i, i) * ci.norm_sqr();
            for j in 0..i {
                let aij = a.get(i, j);
                if aij != 0.0 {
                    total += 2.0 * aij * (ci.conj() * self.coeffs[j]).re;
                }
            }
        }
        total
    }

    /// `⟨J_y⟩` from the real carrier `K` of `J_y = iK`.
    pub fn expectation_jy(&self, ops: &SpinOperators) -> f64 {
        let k: &DenseMatrix = &ops.jy_carrier;
        let dim = self.coeffs.len();
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                let kij = k[(i, j)];
                if kij != 0.0 {
                    s += self.coeffs[i].conj() * kij * self.coeffs[j];
                }
            }
        }
        // ⟨K⟩ is purely imaginary, so i⟨K⟩ is real.
        -s.im
    }

    /// `(⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩) / J`.
    pub fn bloch_vector(&self, ops: &SpinOperators) -> [f64; 3] {
        let j = self.basis.j();
        [
            self.expectation(&ops.jx) / j,
            self.expectation_jy(ops) / j,
            self.expectation(&ops.jz) / j,
        ]
    }
}

/// `ln(k!)` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Real amplitudes `√C(N,k) sin^k(θ/2) cos^{N-k}(θ/2)`, `k = M + J`, in log space.
pub(crate) fn coherent_magnitudes(theta: f64, n: usize, ln_fact: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    let half = 0.5 * theta;
    if theta <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if theta >= PI {
        out[n] = 1.0;
        return out;
    }
    let ls = half.sin().ln();
    let lc = half.cos().ln();
    for (k, o) in out.iter_mut().enumerate() {
        let ln_binom = ln_fact[n] - ln_fact[k] - ln_fact[n - k];
        *o = (0.5 * ln_binom + k as f64 * ls + (n - k) as f64 * lc).exp();
    }
    out
}

/// Atomic coherent state `|θ, φ⟩ = Σ_M √C(2J, M+J) τ^{M+J}/(1 + |τ|²)^J |J, M⟩`
/// with `τ = e^{-iφ} tan(θ/2)`.
pub fn coherent_state(angles: AngleCoordinates, basis: &SpinBasis) -> QuantumState {
    let n = basis.n_particles();
    let ln_fact = ln_factorials(n);
    let mags = coherent_magnitudes(angles.theta, n, &ln_fact);
    let mut coeffs: Vec<Complex64> = mags
        .iter()
        .enumerate()
        .map(|(k, &m)| Complex64::from_polar(m, -(k as f64) * angles.phi))
        .collect();
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    coeffs.iter_mut().for_each(|c| *c /= norm);
    QuantumState::from_normalized(*basis, coeffs)
}
