use std::f64::consts::PI;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use super::{angles_to_qp, fixed_points, separatrix_energy, to_bloch, ClassicalState, MeanField, Stability};
use crate::model::{bifurcation_sides_spin_form, ModelParams};
use crate::numerics::OdeSpec;
use crate::quantum::{phi_grid, AngleCoordinates};
use crate::{Error, Result};

/// Orbits closer than this fraction of `4J` to the north-pole circle have
/// left the chart.
const CHART_MARGIN: f64 = 1e-12;
/// Relative energy window around the separatrix.
const SEPARATRIX_TOL: f64 = 1e-9;
/// Default step in units of `1/Ω`.
const OMEGA_STEP: f64 = 1e-3;
/// Periods integrated by default, and the minimum honoured.
const DEFAULT_PERIODS: f64 = 8.0;
const MIN_PERIODS: f64 = 4.0;
/// Times the classifier doubles its horizon before giving up.
const MAX_EXTENSIONS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OrbitClass {
    /// Josephson oscillation: the imbalance `X` changes sign.
    #[serde(rename = "JO")]
    Jo,
    /// Macroscopic self-trapping: `X` keeps its sign.
    #[serde(rename = "MST")]
    Mst,
    #[serde(rename = "SEPARATRIX")]
    Separatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitSample {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    pub samples: Vec<OrbitSample>,
}

impl Orbit {
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max)
    }
}

/// `0.001/Ω`, or `0.001` when `Ω = 0`.
pub fn default_omega_step(params: &ModelParams) -> f64 {
    if params.omega != 0.0 {
        OMEGA_STEP / params.omega.abs()
    } else {
        OMEGA_STEP
    }
}

fn rhs_for(mf: MeanField) -> impl Fn(&[f64], &mut [f64]) {
    move |y, dy| {
        let (qd, pd) = mf.rhs(y[0], y[1]);
        dy[0] = qd;
        dy[1] = pd;
    }
}

fn outside(mf: &MeanField, q: f64, p: f64) -> bool {
    q * q + p * p >= 4.0 * mf.j * (1.0 - CHART_MARGIN)
}

pub fn integrate_orbit(initial: ClassicalState, params: &ModelParams, t_end: f64, step: f64) -> Result<Orbit> {
    integrate_orbit_strided(initial, params, t_end, step, 1)
}

/// RK4 trajectory keeping every `stride`-th step plus the final one.
pub fn integrate_orbit_strided(
    initial: ClassicalState,
    params: &ModelParams,
    t_end: f64,
    step: f64,
    stride: usize,
) -> Result<Orbit> {
    let mf = MeanField::new(params);
    initial.check_chart(mf.j)?;
    let stride = stride.max(1);
    let spec = OdeSpec::new(2, rhs_for(mf), step, t_end)?;
    let last = spec.num_steps();
    let mut samples = Vec::with_capacity(last / stride + 2);
    let mut exit = None;
    let mut index = 0usize;
    spec.drive(&[initial.q, initial.p], |t, y| {
        let (q, p) = (y[0], y[1]);
        if outside(&mf, q, p) {
            exit = Some(Error::ChartExit { t, q, p });
            return ControlFlow::Break(());
        }
        if index % stride == 0 || index == last {
            let b = to_bloch(&ClassicalState { q, p }, mf.j);
            samples.push(OrbitSample {
                t,
                q,
                p,
                x: b.x,
                y: b.y,
                z: b.z,
                energy: mf.hamiltonian(q, p),
            });
        }
        index += 1;
        ControlFlow::Continue(())
    })?;
    match exit {
        Some(e) => Err(e),
        None => Ok(Orbit { samples }),
    }
}

/// Period of small oscillations around the stable center nearest to `at`.
fn local_period(params: &ModelParams, at: AngleCoordinates) -> f64 {
    let nearest = fixed_points(params)
        .into_iter()
        .filter(|f| f.exists && f.stability == Some(Stability::StableCenter))
        .filter_map(|f| Some((f.angles.angular_distance(&at), f.eigenvalues?[1].im.abs())))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let freq = match nearest {
        Some((_, w)) if w > 0.0 => w,
        _ if params.omega != 0.0 => params.omega.abs(),
        _ => 1.0,
    };
    2.0 * PI / freq
}

struct SignScan {
    state: ClassicalState,
    positive: bool,
    negative: bool,
}

/// Continues the orbit for `duration`, stopping as soon as `q` has taken
/// both signs.
fn scan_signs(mf: MeanField, scan: &mut SignScan, duration: f64, step: f64, t0: f64) -> Result<()> {
    let tol = 1e-9 * mf.j.sqrt();
    let spec = OdeSpec::new(2, rhs_for(mf), step, duration)?;
    let mut exit = None;
    let mut last = scan.state;
    spec.drive(&[scan.state.q, scan.state.p], |t, y| {
        let (q, p) = (y[0], y[1]);
        if outside(&mf, q, p) {
            exit = Some(Error::ChartExit { t: t0 + t, q, p });
            return ControlFlow::Break(());
        }
        scan.positive |= q > tol;
        scan.negative |= q < -tol;
        last = ClassicalState { q, p };
        if scan.positive && scan.negative {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    scan.state = last;
    match exit {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn energy_class(params: &ModelParams, energy: f64) -> OrbitClass {
    if !bifurcation_sides_spin_form(params).bifurcated {
        return OrbitClass::Jo;
    }
    let e_sep = separatrix_energy(params);
    if (energy - e_sep).abs() <= SEPARATRIX_TOL * e_sep.abs().max(1.0) {
        OrbitClass::Separatrix
    } else if energy > e_sep {
        OrbitClass::Mst
    } else {
        OrbitClass::Jo
    }
}

fn label(c: OrbitClass) -> &'static str {
    match c {
        OrbitClass::Jo => "JO",
        OrbitClass::Mst => "MST",
        OrbitClass::Separatrix => "SEPARATRIX",
    }
}

/// Classifies the orbit through `initial` by whether `X` changes sign.
///
/// The energy relative to the separatrix gives an independent answer. An
/// orbit that has not yet crossed but should have is integrated further,
/// doubling the horizon up to six times; a disagreement that persists is an
/// error. Orbits on the separatrix energy are reported as such. Orbits that
/// sit on `X = 0` for the whole run are Josephson-type.
pub fn classify_orbit(
    initial: ClassicalState,
    params: &ModelParams,
    t_end: Option<f64>,
    step: Option<f64>,
) -> Result<OrbitClass> {
    let mf = MeanField::new(params);
    initial.check_chart(mf.j)?;
    let energy = mf.hamiltonian(initial.q, initial.p);
    let by_energy = energy_class(params, energy);
    if by_energy == OrbitClass::Separatrix {
        return Ok(OrbitClass::Separatrix);
    }
    let period = local_period(params, super::qp_to_angles(&initial, mf.j));
    let horizon = t_end.unwrap_or(DEFAULT_PERIODS * period).max(MIN_PERIODS * period);
    let step = step.unwrap_or_else(|| default_omega_step(params));

    let mut scan = SignScan {
        state: initial,
        positive: false,
        negative: false,
    };
    let mut elapsed = 0.0;
    let mut segment = horizon;
    for attempt in 0..=MAX_EXTENSIONS {
        scan_signs(mf, &mut scan, segment, step, elapsed)?;
        elapsed += segment;
        let by_sign = match (scan.positive, scan.negative) {
            (true, true) => OrbitClass::Jo,
            (false, false) => OrbitClass::Jo,
            _ => OrbitClass::Mst,
        };
        if by_sign == by_energy {
            return Ok(by_sign);
        }
        if by_sign == OrbitClass::Jo || attempt == MAX_EXTENSIONS {
            return Err(Error::ClassifierDisagreement {
                sign_test: label(by_sign),
                energy_test: label(by_energy),
                energy,
                separatrix: separatrix_energy(params),
            });
        }
        segment = elapsed;
    }
    unreachable!("loop returns on its last attempt")
}

/// 12 × 12 lattice: `θ_i = (i + 1)π/13`, `φ` on the periodic grid of 12.
pub fn default_seed_lattice() -> Vec<AngleCoordinates> {
    let phis = phi_grid(12);
    (0..12)
        .flat_map(|i| {
            let theta = (i + 1) as f64 * PI / 13.0;
            phis.iter().map(move |&phi| AngleCoordinates { theta, phi })
        })
        .collect()
}

#[derive(Debug)]
pub struct PortraitEntry {
    pub seed_id: usize,
    pub seed: AngleCoordinates,
    pub orbit: Result<Orbit>,
    pub class: Result<OrbitClass>,
}

/// Integrates and classifies every seed. Failures are reported per seed.
pub fn portrait(
    params: &ModelParams,
    seeds: &[AngleCoordinates],
    t_end: f64,
    step: f64,
    stride: usize,
) -> Vec<PortraitEntry> {
    let j = params.j();
    seeds
        .par_iter()
        .enumerate()
        .map(|(seed_id, &seed)| {
            let start = angles_to_qp(seed, j);
            let orbit = start
                .clone()
                .and_then(|s| integrate_orbit_strided(s, params, t_end, step, stride));
            let class = start.and_then(|s| classify_orbit(s, params, None, Some(step)));
            PortraitEntry {
                seed_id,
                seed,
                orbit,
                class,
            }
        })
        .collect()
}

/// Classes only, for sweeps.
pub fn portrait_classes(params: &ModelParams, seeds: &[AngleCoordinates]) -> Vec<Result<OrbitClass>> {
    let j = params.j();
    seeds
        .par_iter()
        .map(|&seed| angles_to_qp(seed, j).and_then(|s| classify_orbit(s, params, None, None)))
        .collect()
}

/// Fraction of all seeds classified as self-trapped.
pub fn mst_seed_fraction(classes: &[Result<OrbitClass>]) -> f64 {
    if classes.is_empty() {
        return 0.0;
    }
    let mst = classes.iter().filter(|c| matches!(c, Ok(OrbitClass::Mst))).count();
    mst as f64 / classes.len() as f64
}
