//! Numerical kernels with no model knowledge: dense symmetric
//! eigendecomposition, fixed-step RK4 and quadrature.

mod eigh;
mod matrix;
mod ode;
mod quad;

pub use eigh::{eigh, EigenDecomposition};
pub use matrix::{DenseMatrix, SymmetricMatrix};
pub use ode::{integrate_fixed_rk4, OdeSpec};
pub use quad::{clenshaw_curtis_weights, gauss_legendre, quad_gauss_legendre, PANEL_ORDER};
