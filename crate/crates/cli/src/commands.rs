//! One function per subcommand. Each computes its result, writes its files
//! under the output directory and returns the result for inspection.

use std::collections::BTreeMap;
use std::path::Path;

use bec_dimer_core::classical::{
    angles_to_qp, default_seed_lattice, fixed_points, integrate_orbit_strided, mst_seed_fraction, portrait,
    portrait_classes, Family, FixedPointReport, OrbitClass, PortraitEntry,
};
use bec_dimer_core::model::{bifurcation_sides, bifurcation_sides_spin_form, critical_kappa, BifurcationSides};
use bec_dimer_core::quantum::{
    analyze_spectrum, build_hamiltonian, build_operators, coherent_state, evolve_with, husimi_grid, AngleCoordinates,
    HusimiGrid, Propagator, SpectrumAnalysis, SpinBasis,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ParamsEcho, Resolved, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, fmt_f64, fmt_opt, write_csv, write_json};

#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    params: &'a ParamsEcho,
    config: &'a RunConfig,
    warnings: &'a [String],
}

fn write_run_record(res: &Resolved, command: &str, out: &Path) -> CliResult<()> {
    ensure_dir(out)?;
    write_json(
        &out.join("run.json"),
        &RunRecord {
            command,
            params: &res.echo,
            config: &res.config,
            warnings: &res.warnings,
        },
    )
}

fn initial_angles(res: &Resolved) -> CliResult<AngleCoordinates> {
    Ok(AngleCoordinates::new(res.config.theta0, res.config.phi0)?)
}

fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                end
            } else {
                start + (end - start) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

// ---------------------------------------------------------------- spectrum

#[derive(Serialize)]
struct SpectrumFile<'a> {
    params: &'a ParamsEcho,
    doublet_tol: f64,
    n_levels: usize,
    /// Level label `n` (1-based, as in spectrum.csv) of the inflection point.
    inflection_index: Option<usize>,
    doublet_count: usize,
    doublet_flags: &'a [bool],
}

pub fn spectrum(res: &Resolved) -> CliResult<SpectrumAnalysis> {
    let energies = bec_dimer_core::quantum::spectrum(&res.params)?;
    Ok(analyze_spectrum(&energies, res.config.doublet_tol)?)
}

pub fn cmd_spectrum(res: &Resolved, out: &Path) -> CliResult<SpectrumAnalysis> {
    let a = spectrum(res)?;
    write_run_record(res, "spectrum", out)?;
    write_csv(
        &out.join("spectrum.csv"),
        "n,E_n",
        a.energies.iter().enumerate().map(|(i, e)| format!("{},{}", i + 1, fmt_f64(*e))),
    )?;
    write_json(
        &out.join("spectrum_analysis.json"),
        &SpectrumFile {
            params: &res.echo,
            doublet_tol: res.config.doublet_tol,
            n_levels: a.energies.len(),
            inflection_index: a.inflection_index.map(|i| i + 1),
            doublet_count: a.doublet_count,
            doublet_flags: &a.doublet_flags,
        },
    )?;
    Ok(a)
}

// ---------------------------------------------------------------- evolve

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvolveRow {
    pub omega_t: f64,
    pub jx_over_j_classical: Option<f64>,
    pub jx_over_j_quantum: Option<f64>,
    pub jz_over_j_quantum: Option<f64>,
    pub fidelity: Option<f64>,
    pub norm: Option<f64>,
}

/// Classical `X(t)` sampled exactly on `grid` (uniform, starting at 0): the
/// RK4 step is shrunk so that an integer number of steps spans each interval.
fn classical_on_grid(res: &Resolved, grid: &[f64]) -> CliResult<Vec<f64>> {
    let start = angles_to_qp(initial_angles(res)?, res.params.j())?;
    let dt = res.to_time(grid[1] - grid[0]);
    let h0 = res.to_time(res.config.step);
    let substeps = ((dt / h0) - 1e-9).ceil().max(1.0) as usize;
    let t_end = res.to_time(grid[grid.len() - 1]);
    let orbit = integrate_orbit_strided(start, &res.params, t_end, dt / substeps as f64, substeps)?;
    if orbit.samples.len() != grid.len() {
        return Err(CliError::numerical(format!(
            "classical samples ({}) do not match the time grid ({})",
            orbit.samples.len(),
            grid.len()
        )));
    }
    Ok(orbit.samples.iter().map(|s| s.x).collect())
}

pub fn evolve(res: &Resolved) -> CliResult<Vec<EvolveRow>> {
    let c = &res.config;
    if c.n_times < 2 || !(c.t_end > 0.0) {
        return Err(CliError::invalid("evolve needs n_times >= 2 and t_end > 0"));
    }
    if !(c.step > 0.0) {
        return Err(CliError::invalid("step must be positive"));
    }
    let grid = linspace(0.0, c.t_end, c.n_times);
    let classical = if c.mode.classical() {
        Some(classical_on_grid(res, &grid)?)
    } else {
        None
    };
    let quantum = if c.mode.quantum() {
        let basis = SpinBasis::new(res.params.n_particles)?;
        let h = build_hamiltonian(&res.params, &basis)?;
        let prop = Propagator::new(basis, &h)?;
        let psi0 = coherent_state(initial_angles(res)?, &basis);
        let times: Vec<f64> = grid.iter().map(|&w| res.to_time(w)).collect();
        Some(evolve_with(&prop, &build_operators(&basis), &psi0, &times)?)
    } else {
        None
    };
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &omega_t)| {
            let q = quantum.as_ref().map(|v| v[i]);
            EvolveRow {
                omega_t,
                jx_over_j_classical: classical.as_ref().map(|v| v[i]),
                jx_over_j_quantum: q.map(|s| s.jx_over_j),
                jz_over_j_quantum: q.map(|s| s.jz_over_j),
                fidelity: q.map(|s| s.fidelity),
                norm: q.map(|s| s.norm),
            }
        })
        .collect())
}

pub fn cmd_evolve(res: &Resolved, out: &Path) -> CliResult<Vec<EvolveRow>> {
    let rows = evolve(res)?;
    write_run_record(res, "evolve", out)?;
    write_csv(
        &out.join("evolve.csv"),
        "Omega_t,Jx_over_J_classical,Jx_over_J_quantum,Jz_over_J_quantum,fidelity,norm",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                fmt_f64(r.omega_t),
                fmt_opt(r.jx_over_j_classical),
                fmt_opt(r.jx_over_j_quantum),
                fmt_opt(r.jz_over_j_quantum),
                fmt_opt(r.fidelity),
                fmt_opt(r.norm)
            )
        }),
    )?;
    Ok(rows)
}

// ---------------------------------------------------------------- fixed points

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointsFile {
    pub params: ParamsEcho,
    pub fixed_points: Vec<FixedPointReport>,
    pub bifurcation_sides: BifurcationSides,
    pub bifurcation_sides_spin_form: BifurcationSides,
    pub critical_kappa: f64,
}

pub fn fixed_points_report(res: &Resolved) -> FixedPointsFile {
    let p = &res.params;
    FixedPointsFile {
        params: res.echo.clone(),
        fixed_points: fixed_points(p),
        bifurcation_sides: bifurcation_sides(p),
        bifurcation_sides_spin_form: bifurcation_sides_spin_form(p),
        critical_kappa: critical_kappa(p.n_particles, p.omega, p.eta, p.lambda),
    }
}

pub fn cmd_fixed_points(res: &Resolved, out: &Path) -> CliResult<FixedPointsFile> {
    let report = fixed_points_report(res);
    write_run_record(res, "fixed-points", out)?;
    write_json(&out.join("fixed_points.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------- portrait

pub fn seeds(res: &Resolved) -> CliResult<Vec<AngleCoordinates>> {
    match &res.config.seeds {
        None => Ok(default_seed_lattice()),
        Some(list) => list
            .iter()
            .map(|[t, p]| AngleCoordinates::new(*t, *p).map_err(CliError::from))
            .collect(),
    }
}

#[derive(Serialize)]
struct ClassesFile<'a> {
    params: &'a ParamsEcho,
    mst_seed_fraction: f64,
    classes: BTreeMap<usize, &'static str>,
    errors: BTreeMap<usize, String>,
    seeds: Vec<[f64; 2]>,
}

fn class_name(c: &Result<OrbitClass, bec_dimer_core::Error>) -> &'static str {
    match c {
        Ok(OrbitClass::Jo) => "JO",
        Ok(OrbitClass::Mst) => "MST",
        Ok(OrbitClass::Separatrix) => "SEPARATRIX",
        Err(_) => "error",
    }
}

pub struct PortraitReport {
    pub entries: Vec<PortraitEntry>,
    pub mst_seed_fraction: f64,
}

pub fn portrait_run(res: &Resolved) -> CliResult<PortraitReport> {
    let c = &res.config;
    if !(c.t_end > 0.0 && c.step > 0.0) {
        return Err(CliError::invalid("portrait needs t_end > 0 and step > 0"));
    }
    let seeds = seeds(res)?;
    let entries = portrait(&res.params, &seeds, res.to_time(c.t_end), res.to_time(c.step), c.sample_stride);
    let classes: Vec<_> = entries.iter().map(|e| e.class.clone()).collect();
    Ok(PortraitReport {
        mst_seed_fraction: mst_seed_fraction(&classes),
        entries,
    })
}

pub fn cmd_portrait(res: &Resolved, out: &Path) -> CliResult<PortraitReport> {
    let report = portrait_run(res)?;
    write_run_record(res, "portrait", out)?;
    let omega_scale = if res.params.omega != 0.0 { res.params.omega.abs() } else { 1.0 };
    let rows = report.entries.iter().flat_map(|e| {
        let samples = e.orbit.as_ref().map(|o| o.samples.as_slice()).unwrap_or(&[]);
        samples.iter().map(move |s| {
            format!(
                "{},{},{},{},{},{}",
                e.seed_id,
                fmt_f64(s.t * omega_scale),
                fmt_f64(s.x),
                fmt_f64(s.y),
                fmt_f64(s.z),
                fmt_f64(s.energy)
            )
        })
    });
    write_csv(&out.join("portrait.csv"), "seed_id,Omega_t,X,Y,Z,H", rows)?;

    let mut errors = BTreeMap::new();
    for e in &report.entries {
        if let Err(err) = e.orbit.as_ref().map(|_| ()).and(e.class.as_ref().map(|_| ())) {
            errors.insert(e.seed_id, err.to_string());
        }
    }
    write_json(
        &out.join("classes.json"),
        &ClassesFile {
            params: &res.echo,
            mst_seed_fraction: report.mst_seed_fraction,
            classes: report.entries.iter().map(|e| (e.seed_id, class_name(&e.class))).collect(),
            errors: errors.clone(),
            seeds: report.entries.iter().map(|e| [e.seed.theta, e.seed.phi]).collect(),
        },
    )?;
    if !report.entries.is_empty() && errors.len() == report.entries.len() {
        return Err(CliError::numerical(format!(
            "every seed failed; first error: {}",
            errors.values().next().map(String::as_str).unwrap_or("")
        )));
    }
    Ok(report)
}

// ---------------------------------------------------------------- husimi

#[derive(Clone, Debug)]
pub struct HusimiSlice {
    pub omega_t: f64,
    pub grid: HusimiGrid,
    pub peaks: Vec<(AngleCoordinates, f64)>,
}

#[derive(Serialize)]
struct PeakRecord {
    theta: f64,
    phi: f64,
    #[serde(rename = "Q")]
    q: f64,
}

#[derive(Serialize)]
struct SliceRecord {
    #[serde(rename = "Omega_t")]
    omega_t: f64,
    file: String,
    max_q: f64,
    peaks: Vec<PeakRecord>,
}

#[derive(Serialize)]
struct PeaksFile<'a> {
    params: &'a ParamsEcho,
    theta0: f64,
    phi0: f64,
    n_theta: usize,
    n_phi: usize,
    peak_min_q: f64,
    slices: Vec<SliceRecord>,
}

pub fn husimi_file_name(omega_t: f64) -> String {
    format!("husimi_t{omega_t:.2}.csv")
}

pub fn husimi(res: &Resolved) -> CliResult<Vec<HusimiSlice>> {
    let c = &res.config;
    let basis = SpinBasis::new(res.params.n_particles)?;
    let h = build_hamiltonian(&res.params, &basis)?;
    let prop = Propagator::new(basis, &h)?;
    let psi0 = coherent_state(initial_angles(res)?, &basis);
    let amplitudes = prop.project(&psi0)?;
    c.husimi_times
        .par_iter()
        .map(|&omega_t| {
            let psi = prop.state_from_amplitudes(&amplitudes, res.to_time(omega_t));
            let grid = husimi_grid(&psi, c.n_theta, c.n_phi)?;
            let peaks = grid.local_maxima(c.peak_min_q);
            Ok(HusimiSlice { omega_t, grid, peaks })
        })
        .collect()
}

pub fn cmd_husimi(res: &Resolved, out: &Path) -> CliResult<Vec<HusimiSlice>> {
    let slices = husimi(res)?;
    write_run_record(res, "husimi", out)?;
    let mut records = Vec::with_capacity(slices.len());
    for s in &slices {
        let name = husimi_file_name(s.omega_t);
        let g = &s.grid;
        let rows = g.thetas.iter().enumerate().flat_map(|(i, th)| {
            g.phis
                .iter()
                .enumerate()
                .map(move |(j, ph)| format!("{},{},{}", fmt_f64(*th), fmt_f64(*ph), fmt_f64(g.get(i, j))))
        });
        write_csv(&out.join(&name), "theta,phi,Q", rows)?;
        records.push(SliceRecord {
            omega_t: s.omega_t,
            file: name,
            max_q: g.max(),
            peaks: s
                .peaks
                .iter()
                .map(|(a, q)| PeakRecord {
                    theta: a.theta,
                    phi: a.phi,
                    q: *q,
                })
                .collect(),
        });
    }
    let c = &res.config;
    write_json(
        &out.join("husimi_peaks.json"),
        &PeaksFile {
            params: &res.echo,
            theta0: c.theta0,
            phi0: c.phi0,
            n_theta: c.n_theta,
            n_phi: c.n_phi,
            peak_min_q: c.peak_min_q,
            slices: records,
        },
    )?;
    Ok(slices)
}

// ---------------------------------------------------------------- sweep

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub bifurcated: bool,
    pub theta_b: Option<f64>,
    pub mst_seed_fraction: f64,
    pub doublet_count: usize,
}

#[derive(Serialize)]
struct SweepFile<'a> {
    params: &'a ParamsEcho,
    sweep_var: crate::config::SweepVar,
    rows: &'a [SweepRow],
}

fn sweep_point(res: &Resolved, seeds: &[AngleCoordinates]) -> CliResult<SweepRow> {
    let p = &res.params;
    let theta_b = fixed_points(p)
        .iter()
        .find(|f| f.family == Family::B && f.exists)
        .map(|f| f.angles.theta);
    let classes = portrait_classes(p, seeds);
    Ok(SweepRow {
        value: 0.0,
        bifurcated: bifurcation_sides(p).bifurcated,
        theta_b,
        mst_seed_fraction: mst_seed_fraction(&classes),
        doublet_count: spectrum(res)?.doublet_count,
    })
}

pub fn sweep(res: &Resolved) -> CliResult<Vec<SweepRow>> {
    let c = &res.config;
    let start = c.sweep_start.ok_or_else(|| CliError::invalid("sweep_start is required"))?;
    if c.sweep_steps == 0 {
        return Err(CliError::invalid("sweep_steps must be at least 1"));
    }
    let end = match (c.sweep_end, c.sweep_steps) {
        (Some(e), _) => e,
        (None, 1) => start,
        (None, _) => return Err(CliError::invalid("sweep_end is required")),
    };
    let seeds = seeds(res)?;
    let values = linspace(start, end, c.sweep_steps);
    values
        .par_iter()
        .map(|&v| {
            let point = res.with_value(c.sweep_var, v)?;
            let mut row = sweep_point(&point, &seeds)?;
            row.value = v;
            Ok(row)
        })
        .collect()
}

pub fn cmd_sweep(res: &Resolved, out: &Path) -> CliResult<Vec<SweepRow>> {
    let rows = sweep(res)?;
    write_run_record(res, "sweep", out)?;
    write_csv(
        &out.join("sweep.csv"),
        "value,bifurcated,theta_b,mst_seed_fraction,doublet_count",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                fmt_f64(r.value),
                r.bifurcated as u8,
                fmt_opt(r.theta_b),
                fmt_f64(r.mst_seed_fraction),
                r.doublet_count
            )
        }),
    )?;
    write_json(
        &out.join("sweep.json"),
        &SweepFile {
            params: &res.echo,
            sweep_var: res.config.sweep_var,
            rows: &rows,
        },
    )?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_ends() {
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.0]);
        let v = linspace(0.0, 0.3, 4);
        assert_eq!(v.len(), 4);
        assert_eq!(v[3], 0.3);
    }

    #[test]
    fn husimi_names() {
        assert_eq!(husimi_file_name(30.0), "husimi_t30.00.csv");
        assert_eq!(husimi_file_name(63.456), "husimi_t63.46.csv");
    }
}
