use serde::Serialize;

use crate::model::ModelParams;
use crate::numerics::{DenseMatrix, SymmetricMatrix};
use crate::{Error, Result};

/// The `|J, M⟩` basis of `N` bosons in two modes, `J = N/2`, ordered by
/// ascending `M`. Index `i` holds `M = i - J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpinBasis {
    n_particles: usize,
}

impl SpinBasis {
    pub fn new(n_particles: usize) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidParams("basis needs at least one particle".into()));
        }
        Ok(Self { n_particles })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn j(&self) -> f64 {
        self.n_particles as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.n_particles + 1
    }

    pub fn m_value(&self, index: usize) -> f64 {
        index as f64 - self.j()
    }

    pub fn m_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m_value(i)).collect()
    }

    /// `⟨M+1|J₊|M⟩ = √((J - M)(J + M + 1))`, which is `√((N - i)(i + 1))` at index `i`.
    pub fn raising_element(&self, index: usize) -> f64 {
        (((self.n_particles - index) * (index + 1)) as f64).sqrt()
    }
}

/// Collective spin operators in the `|J, M⟩` basis.
///
/// `J_y` is not real; it is carried by the real antisymmetric matrix `K`
/// with `J_y = i K`, `K = (J₋ - J₊)/2`.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub jx: SymmetricMatrix,
    pub jy_carrier: DenseMatrix,
    pub jz: SymmetricMatrix,
    pub jx2: SymmetricMatrix,
    pub jz2: SymmetricMatrix,
}

pub fn build_operators(basis: &SpinBasis) -> SpinOperators {
    let dim = basis.dim();
    let jx = SymmetricMatrix::from_lower_fn(dim, |i, j| {
        if i == j + 1 {
            0.5 * basis.raising_element(j)
        } else {
            0.0
        }
    });
    let jy_carrier = DenseMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            0.5 * basis.raising_element(i)
        } else if i == j + 1 {
            -0.5 * basis.raising_element(j)
        } else {
            0.0
        }
    });
    let jz = SymmetricMatrix::from_diagonal(&basis.m_values());
    let jz2 = SymmetricMatrix::from_diagonal(&basis.m_values().iter().map(|m| m * m).collect::<Vec<_>>());
    // (J_x²)_{MM} = (J(J+1) - M²)/2 and the M ↔ M+2 element is a product of ladder factors.
    let jj1 = basis.j() * (basis.j() + 1.0);
    let jx2 = SymmetricMatrix::from_lower_fn(dim, |i, j| {
        if i == j {
            let m = basis.m_value(i);
            0.5 * (jj1 - m * m)
        } else if i == j + 2 {
            0.25 * basis.raising_element(j) * basis.raising_element(j + 1)
        } else {
            0.0
        }
    });
    SpinOperators {
        jx,
        jy_carrier,
        jz,
        jx2,
        jz2,
    }
}

/// `H = Ω' J_z + 2(κ - η) J_x² + 4η J_z²`.
pub fn build_hamiltonian(params: &ModelParams, basis: &SpinBasis) -> Result<SymmetricMatrix> {
    if basis.n_particles() != params.n_particles {
        return Err(Error::DimensionMismatch {
            expected: params.n_particles + 1,
            got: basis.dim(),
        });
    }
    let ops = build_operators(basis);
    Ok(hamiltonian_from_operators(params, &ops))
}

pub(crate) fn hamiltonian_from_operators(params: &ModelParams, ops: &SpinOperators) -> SymmetricMatrix {
    let omega_prime = params.derive().omega_prime;
    SymmetricMatrix::linear_combination(&[
        (omega_prime, &ops.jz),
        (2.0 * (params.kappa - params.eta), &ops.jx2),
        (4.0 * params.eta, &ops.jz2),
    ])
}
