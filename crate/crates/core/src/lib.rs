//! Two-mode Bose-Einstein condensate in a symmetric double-well trap, including
//! the cross-collision couplings between the wells.
//!
//! The model is the quasi-spin (Lipkin-Meshkov-Glick type) Hamiltonian
//!
//! ```text
//! H = Ω' J_z + 2(κ - η) J_x² + 4η J_z²,    Ω' = 2[2Λ(N - 1) + Ω/2]
//! ```
//!
//! acting on the `N + 1` dimensional `|J, M⟩` space with `J = N/2`.
//!
//! * [`model`]: parameters, derived quantities, regime checks and the bifurcation condition.
//! * [`quantum`]: exact diagonalization, coherent states, unitary evolution, Husimi maps, spectra.
//! * [`classical`]: the mean-field flow on the Bloch sphere, fixed points and orbit classification.
//! * [`numerics`]: dense symmetric eigensolver, RK4 integrator and quadrature.
//!
//! Units are `ħ = 1` throughout.

pub mod classical;
mod error;
pub mod model;
pub mod numerics;
pub mod quantum;

pub use error::{Error, Result};
pub use model::{DerivedParams, ModelParams, TrapGeometry};
