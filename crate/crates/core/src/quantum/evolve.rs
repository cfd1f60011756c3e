use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::operators::{build_operators, SpinBasis, SpinOperators};
use super::state::QuantumState;
use crate::numerics::{eigh, EigenDecomposition, SymmetricMatrix};
use crate::{Error, Result};

/// Exact propagator `e^{-iHt}` from the spectral decomposition of `H`.
#[derive(Clone, Debug)]
pub struct Propagator {
    basis: SpinBasis,
    eig: EigenDecomposition,
}

impl Propagator {
    pub fn new(basis: SpinBasis, hamiltonian: &SymmetricMatrix) -> Result<Self> {
        if hamiltonian.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: hamiltonian.dim(),
            });
        }
        Ok(Self {
            basis,
            eig: eigh(hamiltonian)?,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn decomposition(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// Amplitudes `⟨n|ψ⟩` in the energy eigenbasis.
    pub fn project(&self, state: &QuantumState) -> Result<Vec<Complex64>> {
        if state.basis() != &self.basis {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dim(),
                got: state.basis().dim(),
            });
        }
        let dim = self.basis.dim();
        let psi = state.coeffs();
        Ok((0..dim)
            .map(|n| (0..dim).map(|i| self.eig.vectors[(i, n)] * psi[i]).sum())
            .collect())
    }

    /// `ψ(t) = Σ_n e^{-iE_n t} ⟨n|ψ₀⟩ |n⟩` from precomputed amplitudes.
    pub fn state_from_amplitudes(&self, amplitudes: &[Complex64], t: f64) -> QuantumState {
        let dim = self.basis.dim();
        let phased: Vec<Complex64> = amplitudes
            .iter()
            .zip(&self.eig.values)
            .map(|(a, e)| a * Complex64::from_polar(1.0, -e * t))
            .collect();
        let coeffs = (0..dim)
            .map(|i| (0..dim).map(|n| self.eig.vectors[(i, n)] * phased[n]).sum())
            .collect();
        QuantumState::from_normalized(self.basis, coeffs)
    }

    pub fn state_at(&self, state0: &QuantumState, t: f64) -> Result<QuantumState> {
        let a = self.project(state0)?;
        Ok(self.state_from_amplitudes(&a, t))
    }

    /// Return probability `|⟨ψ₀|ψ(t)⟩|² = |Σ_n |⟨n|ψ₀⟩|² e^{-iE_n t}|²`.
    pub fn fidelity_series(&self, state0: &QuantumState, times: &[f64]) -> Result<Vec<f64>> {
        let weights: Vec<f64> = self.project(state0)?.iter().map(|a| a.norm_sqr()).collect();
        Ok(times
            .par_iter()
            .map(|&t| {
                weights
                    .iter()
                    .zip(&self.eig.values)
                    .map(|(w, e)| w * Complex64::from_polar(1.0, -e * t))
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservableSample {
    pub t: f64,
    pub jx_over_j: f64,
    pub jz_over_j: f64,
    pub fidelity: f64,
    pub norm: f64,
}

/// Observables of `ψ(t)` on the requested time grid.
pub fn evolve(state0: &QuantumState, hamiltonian: &SymmetricMatrix, times: &[f64]) -> Result<Vec<ObservableSample>> {
    let propagator = Propagator::new(*state0.basis(), hamiltonian)?;
    evolve_with(&propagator, &build_operators(state0.basis()), state0, times)
}

pub fn evolve_with(
    propagator: &Propagator,
    ops: &SpinOperators,
    state0: &QuantumState,
    times: &[f64],
) -> Result<Vec<ObservableSample>> {
    let amplitudes = propagator.project(state0)?;
    let j = state0.basis().j();
    Ok(times
        .par_iter()
        .map(|&t| {
            let psi = propagator.state_from_amplitudes(&amplitudes, t);
            ObservableSample {
                t,
                jx_over_j: psi.expectation(&ops.jx) / j,
                jz_over_j: psi.expectation(&ops.jz) / j,
                fidelity: state0.inner(&psi).norm_sqr(),
                norm: psi.norm_sqr(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::quantum::{build_hamiltonian, coherent_state, AngleCoordinates};

    #[test]
    fn eigenstate_is_stationary() {
        let p = ModelParams::new(10, 1.0, 0.3, 0.01, 0.02).unwrap();
        let basis = SpinBasis::new(10).unwrap();
        let h = build_hamiltonian(&p, &basis).unwrap();
        let prop = Propagator::new(basis, &h).unwrap();
        let v = prop.decomposition().vector(4);
        let psi0 = QuantumState::new(basis, v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap();
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.37).collect();
        let obs = evolve(&psi0, &h, &times).unwrap();
        for s in &obs {
            assert!((s.fidelity - 1.0).abs() < 1e-12);
            assert!((s.jx_over_j - obs[0].jx_over_j).abs() < 1e-12);
            assert!((s.jz_over_j - obs[0].jz_over_j).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_series_matches_direct_overlap() {
        let p = ModelParams::with_overlap_lambda(20, 1.0, 0.1, 0.001).unwrap();
        let basis = SpinBasis::new(20).unwrap();
        let h = build_hamiltonian(&p, &basis).unwrap();
        let prop = Propagator::new(basis, &h).unwrap();
        let psi0 = coherent_state(AngleCoordinates::new(1.2, 0.4).unwrap(), &basis);
        let times = [0.0, 0.5, 3.0, 17.0];
        let f = prop.fidelity_series(&psi0, &times).unwrap();
        for (t, fi) in times.iter().zip(f) {
            let direct = psi0.inner(&prop.state_at(&psi0, *t).unwrap()).norm_sqr();
            assert!((fi - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_basis() {
        let basis = SpinBasis::new(4).unwrap();
        let h = SymmetricMatrix::zeros(6);
        assert!(Propagator::new(basis, &h).is_err());
    }
}
