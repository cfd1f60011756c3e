use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::{coherent_magnitudes, ln_factorials, AngleCoordinates, QuantumState};
use crate::numerics::clenshaw_curtis_weights;
use crate::{Error, Result};

/// `Q(θ, φ) = |⟨θ, φ|ψ⟩|²` sampled on a uniform grid.
///
/// `θ_i = iπ/(n_θ - 1)` covers both poles; `φ_j = 2π(j + 1 - ⌈n_φ/2⌉)/n_φ`
/// is uniform and periodic in `(-π, π]` and always contains `φ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HusimiGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// Row-major with `θ` as the outer index.
    pub values: Vec<f64>,
}

pub fn theta_grid(n_theta: usize) -> Vec<f64> {
    (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect()
}

pub fn phi_grid(n_phi: usize) -> Vec<f64> {
    let offset = n_phi.div_ceil(2) as f64;
    (0..n_phi)
        .map(|j| 2.0 * PI * (j as f64 + 1.0 - offset) / n_phi as f64)
        .collect()
}

fn row(mags: &[f64], psi: &[Complex64], phis: &[f64]) -> Vec<f64> {
    let b: Vec<Complex64> = mags.iter().zip(psi).map(|(m, c)| c * *m).collect();
    phis.iter()
        .map(|&phi| {
            let z = Complex64::from_polar(1.0, phi);
            // Horner in z = e^{iφ}.
            b.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, bk| acc * z + bk).norm_sqr()
        })
        .collect()
}

/// Husimi function at a single point.
pub fn husimi_at(state: &QuantumState, at: AngleCoordinates) -> f64 {
    let n = state.basis().n_particles();
    let mags = coherent_magnitudes(at.theta, n, &ln_factorials(n));
    row(&mags, state.coeffs(), &[at.phi])[0]
}

pub fn husimi_grid(state: &QuantumState, n_theta: usize, n_phi: usize) -> Result<HusimiGrid> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidParams(format!(
            "Husimi grid needs at least 2 points per axis, got {n_theta} x {n_phi}"
        )));
    }
    let n = state.basis().n_particles();
    let ln_fact = ln_factorials(n);
    let thetas = theta_grid(n_theta);
    let phis = phi_grid(n_phi);
    let rows: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&theta| row(&coherent_magnitudes(theta, n, &ln_fact), state.coeffs(), &phis))
        .collect();
    Ok(HusimiGrid {
        thetas,
        phis,
        values: rows.concat(),
    })
}

impl HusimiGrid {
    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.phis.len() + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(2J + 1)/(4π) ∮ Q dΩ`, which is 1 for any normalized state.
    ///
    /// Clenshaw-Curtis in `θ`, rectangle rule in `φ`: exact once
    /// `n_θ - 1 ≥ 2J` and `n_φ > 2J`.
    pub fn sphere_normalization(&self, j: f64) -> f64 {
        let w = clenshaw_curtis_weights(self.n_theta() - 1);
        let dphi = 2.0 * PI / self.n_phi() as f64;
        let mut total = 0.0;
        for (i, wi) in w.iter().enumerate() {
            let row_sum: f64 = (0..self.n_phi()).map(|jj| self.get(i, jj)).sum();
            total += wi * row_sum * dphi;
        }
        (2.0 * j + 1.0) / (4.0 * PI) * total
    }

    /// Local maxima with `Q ≥ min_q` over the 8-neighbourhood (periodic in
    /// `φ`). Each pole row counts as a single point. Ties resolve to the
    /// first point in scan order.
    pub fn local_maxima(&self, min_q: f64) -> Vec<(AngleCoordinates, f64)> {
        let nt = self.n_theta();
        let np = self.n_phi();
        let mut out = Vec::new();
        for i in 0..nt {
            let pole = i == 0 || i == nt - 1;
            let cols = if pole { 0..1 } else { 0..np };
            for j in cols {
                let v = self.get(i, j);
                if v < min_q {
                    continue;
                }
                let mut is_max = true;
                let mut check = |ii: usize, jj: usize| {
                    let u = self.get(ii, jj);
                    let earlier = (ii, jj) < (i, j);
                    if u > v || (earlier && u == v) {
                        is_max = false;
                    }
                };
                if pole {
                    let neighbour = if i == 0 { 1 } else { nt - 2 };
                    (0..np).for_each(|jj| check(neighbour, jj));
                } else {
                    for di in [-1i64, 0, 1] {
                        for dj in [-1i64, 0, 1] {
                            if di == 0 && dj == 0 {
                                continue;
                            }
                            let ii = (i as i64 + di) as usize;
                            let jj = (j as i64 + dj).rem_euclid(np as i64) as usize;
                            if ii == 0 || ii == nt - 1 {
                                check(ii, 0);
                            } else {
                                check(ii, jj);
                            }
                        }
                    }
                }
                if is_max {
                    let at = AngleCoordinates {
                        theta: self.thetas[i],
                        phi: if pole { 0.0 } else { self.phis[j] },
                    };
                    out.push((at, v));
                }
            }
        }
        out
    }
}
