//! Exact quantum dynamics of the quasi-spin Hamiltonian.
//!
//! The Hamiltonian only involves `J_z`, `J_z²` and `J_x²`, so it is real
//! symmetric in the `|J, M⟩` basis and its eigenvectors are real. Complex
//! arithmetic is confined to state coefficients and phases.

mod evolve;
mod husimi;
mod operators;
mod spectrum;
mod state;

pub use evolve::{evolve, evolve_with, ObservableSample, Propagator};
pub use husimi::{husimi_at, husimi_grid, phi_grid, theta_grid, HusimiGrid};
pub use operators::{build_hamiltonian, build_operators, SpinBasis, SpinOperators};
pub use spectrum::{analyze_spectrum, SpectrumAnalysis, DEFAULT_DOUBLET_TOL};
pub use state::{coherent_state, wrap_phi, AngleCoordinates, QuantumState};

use crate::model::ModelParams;
use crate::numerics::eigh;
use crate::Result;

/// `⟨θ, φ|H|θ, φ⟩` by direct matrix sandwich.
pub fn coherent_expectation(params: &ModelParams, at: AngleCoordinates) -> Result<f64> {
    let basis = SpinBasis::new(params.n_particles)?;
    let h = build_hamiltonian(params, &basis)?;
    Ok(coherent_state(at, &basis).expectation(&h))
}

/// Ascending eigenvalues of the Hamiltonian.
pub fn spectrum(params: &ModelParams) -> Result<Vec<f64>> {
    let basis = SpinBasis::new(params.n_particles)?;
    Ok(eigh(&build_hamiltonian(params, &basis)?)?.values)
}
