//! One-dimensional quadrature rules.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Nodes per Gauss-Legendre panel in [`quad_gauss_legendre`].
pub const PANEL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, found by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    if order == 1 {
        (x, 1.0)
    } else {
        (p1, d)
    }
}

/// Composite Gauss-Legendre estimate of `∫ f dx` over `[-half_width, half_width]`.
///
/// `n_points` (at least 8) is rounded up to whole panels of
/// [`PANEL_ORDER`] nodes.
pub fn quad_gauss_legendre(f: impl Fn(f64) -> f64, half_width: f64, n_points: usize) -> Result<f64> {
    if n_points < 8 {
        return Err(Error::InvalidParams(format!("need at least 8 quadrature points, got {n_points}")));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidParams(format!("half width must be positive, got {half_width}")));
    }
    let (nodes, weights) = gauss_legendre(PANEL_ORDER);
    let panels = n_points.div_ceil(PANEL_ORDER);
    let width = 2.0 * half_width / panels as f64;
    let mut total = 0.0;
    for panel in 0..panels {
        let mid = -half_width + (panel as f64 + 0.5) * width;
        let mut partial = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let xp = mid + 0.5 * width * x;
            let fx = f(xp);
            if !fx.is_finite() {
                return Err(Error::NonFiniteIntegrand { x: xp });
            }
            partial += w * fx;
        }
        total += 0.5 * width * partial;
    }
    Ok(total)
}

/// Clenshaw-Curtis weights for the nodes `θ_k = kπ/n`, `k = 0..=n`.
///
/// `Σ w_k g(θ_k)` equals `∫₀^π g(θ) sin θ dθ` exactly whenever `g` is a
/// polynomial of degree ≤ n in `cos θ`.
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            let c = if k == 0 || k == n { 1.0 } else { 2.0 };
            let mut s = 0.0;
            for j in 1..=n / 2 {
                let b = if 2 * j == n { 1.0 } else { 2.0 };
                let jf = j as f64;
                s += b / (4.0 * jf * jf - 1.0) * (2.0 * jf * k as f64 * PI / nf).cos();
            }
            c / nf * (1.0 - s)
        })
        .collect()
}
