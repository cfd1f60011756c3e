//! Run configuration: a JSON file plus `--set key=value` overrides.

use std::f64::consts::PI;
use std::path::Path;

use bec_dimer_core::model::{from_trap, validate_regime, TrapDerived, DEFAULT_RATIO_MIN};
use bec_dimer_core::quantum::DEFAULT_DOUBLET_TOL;
use bec_dimer_core::{DerivedParams, ModelParams, TrapGeometry};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    /// `Λ = κ(η/κ)^{3/4}` from the overlap.
    Derived,
    /// `Λ` as given.
    Explicit,
    /// All couplings computed from a trap geometry.
    Trap,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    #[default]
    Strict,
    Warn,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quantum,
    Classical,
    #[default]
    Both,
}

impl Mode {
    pub fn quantum(self) -> bool {
        self != Mode::Classical
    }

    pub fn classical(self) -> bool {
        self != Mode::Quantum
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    #[default]
    Kappa,
    Eta,
}

/// Everything a run can be configured with. Times are in units of `1/Ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n_particles: Option<usize>,
    #[serde(rename = "Omega")]
    pub omega: Option<f64>,
    pub kappa: Option<f64>,
    pub eta: Option<f64>,
    #[serde(rename = "Lambda")]
    pub lambda: Option<f64>,
    pub trap: Option<TrapGeometry>,
    /// Defaults to `explicit` when `Lambda` is given and `derived` otherwise.
    pub lambda_mode: Option<LambdaMode>,
    pub validation: Validation,
    pub ratio_min: f64,

    pub theta0: f64,
    pub phi0: f64,
    pub t_end: f64,
    pub n_times: usize,
    pub step: f64,
    pub mode: Mode,

    pub husimi_times: Vec<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
    pub peak_min_q: f64,

    /// `[θ, φ]` pairs; the 12 × 12 lattice when absent.
    pub seeds: Option<Vec<[f64; 2]>>,
    pub sample_stride: usize,

    pub doublet_tol: f64,

    pub sweep_var: SweepVar,
    pub sweep_start: Option<f64>,
    pub sweep_end: Option<f64>,
    pub sweep_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_particles: None,
            omega: None,
            kappa: None,
            eta: None,
            lambda: None,
            trap: None,
            lambda_mode: None,
            validation: Validation::Strict,
            ratio_min: DEFAULT_RATIO_MIN,
            theta0: PI / 2.0,
            phi0: 0.0,
            t_end: 50.0,
            n_times: 1001,
            step: 1e-3,
            mode: Mode::Both,
            husimi_times: vec![0.0, 5.0, 10.0, 20.0, 30.0, 63.0],
            n_theta: 201,
            n_phi: 201,
            peak_min_q: 0.2,
            seeds: None,
            sample_stride: 10,
            doublet_tol: DEFAULT_DOUBLET_TOL,
            sweep_var: SweepVar::Kappa,
            sweep_start: None,
            sweep_end: None,
            sweep_steps: 11,
        }
    }
}

/// Sets `path` (dot-separated) in a JSON object. The value is parsed as JSON
/// and kept as a string when that fails.
pub fn apply_override(root: &mut Value, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::invalid(format!("--set expects key=value, got '{assignment}'")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::invalid(format!("empty key segment in '{key}'")));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::invalid(format!("'{key}' does not address a JSON object")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

pub fn load_config(path: Option<&Path>, overrides: &[String]) -> CliResult<RunConfig> {
    let mut root = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    if !root.is_object() {
        return Err(CliError::invalid("config must be a JSON object"));
    }
    for o in overrides {
        apply_override(&mut root, o)?;
    }
    serde_json::from_value(root).map_err(|e| CliError::invalid(format!("config: {e}")))
}

/// Fully resolved parameter set, echoed into every JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct ParamsEcho {
    #[serde(flatten)]
    pub params: ModelParams,
    pub lambda_mode: LambdaMode,
    pub derived: DerivedParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapDerived>,
}

#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub params: ModelParams,
    pub echo: ParamsEcho,
    pub warnings: Vec<String>,
}

impl Resolved {
    /// Converts `Ωt` to the library's time variable.
    pub fn to_time(&self, omega_t: f64) -> f64 {
        if self.params.omega != 0.0 {
            omega_t / self.params.omega.abs()
        } else {
            omega_t
        }
    }

    /// Same config with `kappa` or `eta` replaced, re-resolved.
    pub fn with_value(&self, var: SweepVar, value: f64) -> CliResult<Resolved> {
        if self.config.trap.is_some() {
            return Err(CliError::invalid("sweeps need explicit couplings, not a trap"));
        }
        let mut config = self.config.clone();
        match var {
            SweepVar::Kappa => config.kappa = Some(value),
            SweepVar::Eta => config.eta = Some(value),
        }
        resolve(config)
    }
}

fn model_from_couplings(config: &RunConfig) -> CliResult<(ModelParams, LambdaMode)> {
    let n = config.n_particles.ok_or_else(|| CliError::invalid("N is required"))?;
    let omega = config.omega.ok_or_else(|| CliError::invalid("Omega is required"))?;
    let kappa = config.kappa.ok_or_else(|| CliError::invalid("kappa is required"))?;
    let eta = config.eta.unwrap_or(0.0);
    let mode = config.lambda_mode.unwrap_or(if config.lambda.is_some() {
        LambdaMode::Explicit
    } else {
        LambdaMode::Derived
    });
    let params = match mode {
        LambdaMode::Explicit => {
            let lambda = config
                .lambda
                .ok_or_else(|| CliError::invalid("lambda_mode = explicit needs Lambda"))?;
            ModelParams::new(n, omega, kappa, eta, lambda)?
        }
        LambdaMode::Derived => {
            if config.lambda.is_some() {
                return Err(CliError::invalid("Lambda given together with lambda_mode = derived"));
            }
            ModelParams::with_overlap_lambda(n, omega, kappa, eta)?
        }
        LambdaMode::Trap => return Err(CliError::invalid("lambda_mode = trap needs a trap block")),
    };
    Ok((params, mode))
}

pub fn resolve(config: RunConfig) -> CliResult<Resolved> {
    let (params, lambda_mode, trap) = match config.trap {
        Some(trap) => {
            let couplings = [config.omega, config.kappa, config.eta, config.lambda];
            if couplings.iter().any(Option::is_some) {
                return Err(CliError::invalid(
                    "give either a trap or the couplings Omega/kappa/eta/Lambda, not both",
                ));
            }
            if matches!(config.lambda_mode, Some(m) if m != LambdaMode::Trap) {
                return Err(CliError::invalid("a trap fixes Lambda; drop lambda_mode"));
            }
            let n = config.n_particles.ok_or_else(|| CliError::invalid("N is required"))?;
            let derived = from_trap(&trap, n)?;
            (derived.params, LambdaMode::Trap, Some(derived))
        }
        None => {
            let (p, m) = model_from_couplings(&config)?;
            (p, m, None)
        }
    };

    let mut warnings = Vec::new();
    let violations = validate_regime(&params, config.ratio_min);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        let text = format!("outside the two-mode regime: {}", text.join("; "));
        match config.validation {
            Validation::Strict => return Err(CliError::invalid(format!("{text} (set validation=warn to proceed)"))),
            Validation::Warn => warnings.push(text),
        }
    }
    if params.omega == 0.0 {
        warnings.push("Omega = 0: times are reported in raw units, not Omega*t".into());
    }
    let echo = ParamsEcho {
        params,
        lambda_mode,
        derived: params.derive(),
        trap,
    };
    Ok(Resolved {
        config,
        params,
        echo,
        warnings,
    })
}
