use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{angles_to_qp, ClassicalState, MeanField};
use crate::model::{derive, ModelParams};
use crate::quantum::AngleCoordinates;

/// The four families of stationary points of the mean-field flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// South pole, `θ = 0`.
    A,
    /// Pair on the `φ ∈ {0, π}` meridian, born from the north pole.
    B,
    /// Pair on the `φ = ±π/2` meridian, present only when `η` dominates.
    C,
    /// North pole, `θ = π`.
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    StableCenter,
    UnstableSaddle,
    Critical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub family: Family,
    pub angles: AngleCoordinates,
    /// `None` at the north pole, which the `(q, p)` chart does not cover.
    pub qp: Option<ClassicalState>,
    pub exists: bool,
    pub stability: Option<Stability>,
    #[serde(serialize_with = "ser_eigenvalues")]
    pub eigenvalues: Option<[Complex64; 2]>,
    /// `|(q̇, ṗ)|` at the point, when it lies in the chart.
    pub residual: Option<f64>,
    /// Azimuths of the separatrix branches leaving a saddle at the north pole.
    pub saddle_directions: Vec<f64>,
}

fn ser_eigenvalues<S: serde::Serializer>(ev: &Option<[Complex64; 2]>, s: S) -> Result<S::Ok, S::Error> {
    let pairs = ev.map(|e| [[e[0].re, e[0].im], [e[1].re, e[1].im]]);
    serde::Serialize::serialize(&pairs, s)
}

/// Relative tolerance on `λ²` below which a point counts as critical.
const CRITICAL_TOL: f64 = 1e-10;
/// Relative tolerance on the bifurcation conditions.
const EXISTENCE_TOL: f64 = 1e-12;

impl FixedPointReport {
    fn bare(family: Family, theta: f64, phi: f64, qp: Option<ClassicalState>, exists: bool) -> Self {
        Self {
            family,
            angles: AngleCoordinates { theta, phi },
            qp,
            exists,
            stability: None,
            eigenvalues: None,
            residual: None,
            saddle_directions: Vec::new(),
        }
    }

    fn absent(family: Family) -> Self {
        Self::bare(family, f64::NAN, f64::NAN, None, false)
    }
}

/// Linear stability from the Jacobian of the flow.
///
/// Points in the `(q, p)` chart use it directly. The north pole is the
/// origin of the chart rotated by π about the x axis, in which `Ω'` changes
/// sign. Absent points are returned unchanged.
pub fn stability(fp: &FixedPointReport, params: &ModelParams) -> FixedPointReport {
    let mut out = fp.clone();
    if !fp.exists {
        return out;
    }
    let mf = MeanField::new(params);
    let (flow, q, p) = match fp.qp {
        Some(s) => (mf, s.q, s.p),
        None => (mf.rotated(), 0.0, 0.0),
    };
    let m = flow.jacobian(q, p);
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let disc = half_diff * half_diff + m[0][1] * m[1][0];
    let root = Complex64::new(disc, 0.0).sqrt();
    out.eigenvalues = Some([half_trace - root, half_trace + root]);
    let tol = CRITICAL_TOL * mf.scale().powi(2);
    out.stability = Some(if disc < -tol {
        Stability::StableCenter
    } else if disc > tol {
        Stability::UnstableSaddle
    } else {
        Stability::Critical
    });
    if let Some(s) = fp.qp {
        let (qd, pd) = mf.rhs(s.q, s.p);
        out.residual = Some(qd.hypot(pd));
    }
    out
}

/// All fixed-point families, in the order (a), (b+), (b-), (c+), (c-), (d).
///
/// The `±` members of a pair are listed even when the pair does not exist,
/// with `exists = false`. At the bifurcation threshold the (b) pair merges
/// with the north pole and is reported there as critical.
pub fn fixed_points(params: &ModelParams) -> Vec<FixedPointReport> {
    let d = derive(params);
    let mf = MeanField::new(params);
    let j = d.j;
    let half_omega = 0.5 * d.omega_prime;
    let a_b = d.r * d.r * (d.k - d.n);
    let a_c = d.r * d.r * d.n;

    let mut out = Vec::with_capacity(6);
    out.push(FixedPointReport::bare(Family::A, 0.0, 0.0, Some(ClassicalState { q: 0.0, p: 0.0 }), true));

    // On a meridian, the off-pole pair sits at r² = 2J(1 + B/A) with r = 2√J sin(θ/2).
    let pair = |family: Family, a: f64, sign_b: f64, phis: [f64; 2]| -> [FixedPointReport; 2] {
        let b = sign_b * half_omega;
        let tol = EXISTENCE_TOL * a.abs().max(b.abs()).max(1.0);
        if a - b.abs() < -tol || a <= 0.0 {
            return [FixedPointReport::absent(family), FixedPointReport::absent(family)];
        }
        if (a - b.abs()).abs() <= tol {
            // Merged with a pole: north when r² → 4J, south when r² → 0.
            let theta = if b > 0.0 { PI } else { 0.0 };
            let qp = (theta == 0.0).then_some(ClassicalState { q: 0.0, p: 0.0 });
            let mut merged = FixedPointReport::bare(family, theta, 0.0, qp, true);
            merged.stability = Some(Stability::Critical);
            merged.eigenvalues = Some([Complex64::new(0.0, 0.0); 2]);
            return [merged.clone(), merged];
        }
        let sin_half = (0.5 * (1.0 + b / a)).sqrt().min(1.0);
        let theta = 2.0 * sin_half.asin();
        phis.map(|phi| {
            let at = AngleCoordinates { theta, phi };
            let qp = angles_to_qp(at, j).ok();
            FixedPointReport::bare(family, theta, phi, qp, true)
        })
    };
    out.extend(pair(Family::B, a_b, 1.0, [0.0, PI]));
    out.extend(pair(Family::C, a_c, -1.0, [PI / 2.0, -PI / 2.0]));

    let mut north = FixedPointReport::bare(Family::D, PI, 0.0, None, true);
    if a_b > half_omega && a_c + half_omega > 0.0 {
        let t = ((a_b - half_omega) / (a_c + half_omega)).sqrt().atan();
        north.saddle_directions = vec![-t, t];
    }
    out.push(north);

    out.into_iter()
        .map(|fp| {
            if fp.exists && fp.stability.is_none() {
                stability(&fp, params)
            } else if fp.exists {
                let mut fp = fp;
                if let Some(s) = fp.qp {
                    let (qd, pd) = mf.rhs(s.q, s.p);
                    fp.residual = Some(qd.hypot(pd));
                }
                fp
            } else {
                fp
            }
        })
        .collect()
}
