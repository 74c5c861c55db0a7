//! Scenario files: JSON, unknown keys rejected.

use std::path::Path;

use coupler_core::{Complex64, FockBasis, IntegrationConfig, Method, ModelParams, OracleConfig, SweepProfile};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Names accepted in the `experiment.kind` field.
pub const EXPERIMENTS: [(&str, &str); 7] = [
    ("rabi", "trapped/untrapped populations over a time grid, closed form against the integrated model"),
    ("bogoliubov-compare", "gap between the forced-oscillator and exact populations as N_c grows at fixed coupling"),
    ("lz-scaling", "post-sweep untrapped population across chirp rates, with the fitted scaling exponent"),
    ("oracle-fidelity", "Fock-space propagation against the evolved coherent product state"),
    ("entanglement", "reduced purity and number statistics for a coherent or number-state input"),
    ("kerr-breakdown", "best product-state fidelity as the on-site interaction grows"),
    ("field-profile", "mean untrapped field on an (x, t) grid"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<IntegrationSection>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub omega_a: f64,
    pub omega_r: f64,
    pub n_c: f64,
    pub sweep: Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    /// Constant drive given by its detuning `ω_a − ω`.
    Detuning(f64),
    Constant {
        omega: f64,
    },
    LinearChirp {
        rate: f64,
        t0: f64,
        omega_at_t0: f64,
    },
    /// `[t, ω]` pairs, linearly interpolated.
    Tabulated(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_epsilon")]
    pub epsilon_trunc: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub kerr_kappa1: f64,
    #[serde(default)]
    pub kerr_kappa2: f64,
    /// Overrides the cutoff rule derived from the mean number.
    #[serde(default)]
    pub n_total_max: Option<usize>,
}

fn default_epsilon() -> f64 {
    OracleConfig::default().epsilon_trunc
}

impl Default for OracleSection {
    fn default() -> Self {
        let d = OracleConfig::default();
        OracleSection {
            epsilon_trunc: d.epsilon_trunc,
            dt: d.dt,
            kerr_kappa1: d.kerr_kappa1,
            kerr_kappa2: d.kerr_kappa2,
            n_total_max: None,
        }
    }
}

impl OracleSection {
    pub fn config(&self) -> OracleConfig {
        OracleConfig {
            epsilon_trunc: self.epsilon_trunc,
            dt: self.dt,
            kerr_kappa1: self.kerr_kappa1,
            kerr_kappa2: self.kerr_kappa2,
        }
    }

    /// Cutoff for a state of the given mean total number.
    pub fn basis(&self, mean: f64, at_least: usize) -> FockBasis {
        match self.n_total_max {
            Some(m) => FockBasis::new(m),
            None => {
                let rule = FockBasis::for_mean_number(mean);
                FockBasis::new(rule.n_total_max().max(at_least))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodSection {
    DormandPrince,
    Rk4 { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_max_step")]
    pub max_step: f64,
    #[serde(default = "default_method")]
    pub method: MethodSection,
}

fn default_rel_tol() -> f64 {
    IntegrationConfig::default().rel_tol
}

fn default_abs_tol() -> f64 {
    IntegrationConfig::default().abs_tol
}

fn default_max_step() -> f64 {
    IntegrationConfig::default().max_step
}

fn default_method() -> MethodSection {
    MethodSection::DormandPrince
}

impl Default for IntegrationSection {
    fn default() -> Self {
        IntegrationSection {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            max_step: default_max_step(),
            method: default_method(),
        }
    }
}

impl IntegrationSection {
    pub fn config(&self) -> IntegrationConfig {
        IntegrationConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            method: match self.method {
                MethodSection::DormandPrince => Method::DormandPrince,
                MethodSection::Rk4 { step } => Method::Rk4 { step },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Grid {
    Linspace { start: f64, end: f64, count: usize },
    Values(Vec<f64>),
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::Linspace { start, end, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|k| start + (end - start) * k as f64 / (n - 1) as f64).collect(),
            },
            Grid::Values(v) => v.clone(),
        }
    }
}

/// Complex number as `[re, im]`.
pub type ComplexPair = [f64; 2];

pub fn complex(p: ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Coherent { alpha1: ComplexPair, alpha2: ComplexPair },
    Fock { n1: usize, n2: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Rabi {
        times: Grid,
        /// Adds an `n2_oracle` column from Fock-space propagation.
        #[serde(default)]
        with_oracle: bool,
    },
    BogoliubovCompare {
        /// `ω_R√N_c`, held fixed while `N_c` varies.
        coupling: f64,
        n_c_grid: Vec<f64>,
        horizon: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    LzScaling {
        g: f64,
        density: f64,
        rates: Vec<f64>,
        /// Window half-width in units of `1/√rate`, around the crossing.
        #[serde(default = "default_edge")]
        edge: f64,
    },
    OracleFidelity {
        times: Grid,
    },
    Entanglement {
        times: Grid,
        /// Defaults to the coherent condensate `|√N_c⟩ ⊗ |0⟩`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input: Option<InitialState>,
    },
    KerrBreakdown {
        kappa_grid: Vec<f64>,
        t: f64,
    },
    FieldProfile {
        k_modes: Vec<f64>,
        x: Grid,
        times: Grid,
    },
}

fn default_samples() -> usize {
    400
}

fn default_edge() -> f64 {
    100.0
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Rabi { .. } => "rabi",
            Experiment::BogoliubovCompare { .. } => "bogoliubov-compare",
            Experiment::LzScaling { .. } => "lz-scaling",
            Experiment::OracleFidelity { .. } => "oracle-fidelity",
            Experiment::Entanglement { .. } => "entanglement",
            Experiment::KerrBreakdown { .. } => "kerr-breakdown",
            Experiment::FieldProfile { .. } => "field-profile",
        }
    }
}

fn check_grid(name: &str, points: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(CliError::config(format!("{name}: grid is empty")));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(CliError::config(format!("{name}: grid has non-finite values")));
    }
    if points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config(format!("{name}: grid must be strictly increasing")));
    }
    Ok(())
}

fn check_times(name: &str, grid: &Grid) -> Result<()> {
    let points = grid.points();
    check_grid(name, &points)?;
    if points[0] < 0.0 {
        return Err(CliError::config(format!("{name}: times must be >= 0")));
    }
    Ok(())
}

impl Scenario {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    /// Copy with every optional section filled in, as recorded next to outputs.
    pub fn resolved(&self) -> Scenario {
        Scenario {
            oracle: Some(self.oracle.unwrap_or_default()),
            integration: Some(self.integration.unwrap_or_default()),
            ..self.clone()
        }
    }

    pub fn model(&self) -> Result<ModelParams> {
        let p = &self.params;
        let sweep = match &p.sweep {
            Sweep::Detuning(d) => SweepProfile::constant(p.omega_a - d)?,
            Sweep::Constant { omega } => SweepProfile::constant(*omega)?,
            Sweep::LinearChirp { rate, t0, omega_at_t0 } => SweepProfile::linear_chirp(*rate, *t0, *omega_at_t0)?,
            Sweep::Tabulated(rows) => SweepProfile::tabulated(rows.iter().map(|r| (r[0], r[1])).collect())?,
        };
        Ok(ModelParams::new(p.omega_a, p.omega_r, sweep, p.n_c)?)
    }

    pub fn oracle_section(&self) -> OracleSection {
        self.oracle.unwrap_or_default()
    }

    pub fn integration_config(&self) -> IntegrationConfig {
        self.integration.unwrap_or_default().config()
    }

    /// Everything that can be rejected without running an engine.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(CliError::config("name must be non-empty"));
        }
        if !self.name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) {
            return Err(CliError::config("name may only contain ASCII letters, digits, '-', '_' and '.'"));
        }
        let model = self.model()?;
        self.oracle_section().config().validate()?;
        self.integration_config().validate()?;
        let constant = model.sweep.constant_omega().is_some();
        match &self.experiment {
            Experiment::Rabi { times, .. } | Experiment::OracleFidelity { times } => check_times("times", times)?,
            Experiment::Entanglement { times, input } => {
                check_times("times", times)?;
                if let Some(InitialState::Coherent { alpha1, alpha2 }) = input {
                    if alpha1.iter().chain(alpha2.iter()).any(|x| !x.is_finite()) {
                        return Err(CliError::config("input: amplitudes must be finite"));
                    }
                }
            }
            Experiment::BogoliubovCompare { coupling, n_c_grid, horizon, samples } => {
                if !constant {
                    return Err(CliError::config("bogoliubov-compare needs a constant sweep"));
                }
                if !(*coupling >= 0.0) || !coupling.is_finite() {
                    return Err(CliError::config("coupling must be finite and >= 0"));
                }
                check_grid("n_c_grid", n_c_grid)?;
                if n_c_grid[0] <= 0.0 {
                    return Err(CliError::config("n_c_grid: values must be positive"));
                }
                if !(*horizon >= 0.0) || !horizon.is_finite() {
                    return Err(CliError::config("horizon must be finite and >= 0"));
                }
                if *samples == 0 {
                    return Err(CliError::config("samples must be positive"));
                }
            }
            Experiment::LzScaling { g, density, rates, edge } => {
                coupler_core::ThermoLimitSpec::new(*g, *density, None)?;
                check_grid("rates", rates)?;
                if rates[0] <= 0.0 {
                    return Err(CliError::config("rates: values must be positive"));
                }
                if !(*edge >= coupler_core::dynamics::LZ_MIN_EDGE) || !edge.is_finite() {
                    return Err(CliError::config(format!(
                        "edge must be at least {}",
                        coupler_core::dynamics::LZ_MIN_EDGE
                    )));
                }
            }
            Experiment::KerrBreakdown { kappa_grid, t } => {
                if !constant {
                    return Err(CliError::config("kerr-breakdown needs a constant sweep"));
                }
                check_grid("kappa_grid", kappa_grid)?;
                if kappa_grid[0] < 0.0 {
                    return Err(CliError::config("kappa_grid: values must be >= 0"));
                }
                if !(*t >= 0.0) || !t.is_finite() {
                    return Err(CliError::config("t must be finite and >= 0"));
                }
            }
            Experiment::FieldProfile { k_modes, x, times } => {
                if !constant {
                    return Err(CliError::config("field-profile needs a constant sweep"));
                }
                if k_modes.is_empty() || k_modes.iter().any(|k| !k.is_finite()) {
                    return Err(CliError::config("k_modes must be a non-empty list of finite numbers"));
                }
                check_grid("x", &x.points())?;
                check_times("times", times)?;
            }
        }
        Ok(())
    }
}
