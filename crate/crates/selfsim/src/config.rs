//! JSON run configuration: physical parameters, solver knobs, and the
//! experiment to run. Unknown top-level or section keys are rejected so a
//! typo cannot silently fall back to a default.

use crate::error::{Result, SelfsimError};
use crate::geometry::PhysicalParams;
use crate::solver::{SolverConfig, StepMode};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Surface-tension coefficient.
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Effective mobility 2·K₁K₂/(K₁+K₂).
    #[serde(default = "default_k_eff")]
    pub k_eff: f64,
    /// Mobility contrast (K₂−K₁)/(K₁+K₂); −1 is the one-phase limit.
    #[serde(default = "default_atwood")]
    pub atwood: f64,
    /// Cosine mode count N₁.
    #[serde(default = "default_n1")]
    pub n1: usize,
    /// Quadrature node count N₂ (even, ≥ 2·N₁).
    #[serde(default = "default_n2")]
    pub n2: usize,
    /// Pre-specified flux constant.
    #[serde(default)]
    pub c0: f64,
    /// Seed amplitudes keyed by mode number (JSON object keys are strings);
    /// mode "0" defaults to 1.0 when absent.
    #[serde(default)]
    pub initial_modes: BTreeMap<String, f64>,
    #[serde(default)]
    pub newton: NewtonSection,
    #[serde(default)]
    pub line_search: LineSearchSection,
    pub experiment: Experiment,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_tau() -> f64 {
    1.0
}
fn default_k_eff() -> f64 {
    2.0
}
fn default_atwood() -> f64 {
    -1.0
}
fn default_n1() -> usize {
    128
}
fn default_n2() -> usize {
    512
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    /// Rebuild the Jacobian every this many iterations.
    #[serde(default = "default_refresh")]
    pub refresh: usize,
    #[serde(default)]
    pub step_mode: StepMode,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iters() -> usize {
    200
}
fn default_fd_step() -> f64 {
    1e-6
}
fn default_refresh() -> usize {
    1
}

impl Default for NewtonSection {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iters: default_max_iters(),
            fd_step: default_fd_step(),
            refresh: default_refresh(),
            step_mode: StepMode::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSearchSection {
    #[serde(default = "default_shrink")]
    pub shrink: f64,
    #[serde(default = "default_max_backtracks")]
    pub max_backtracks: usize,
}

fn default_shrink() -> f64 {
    0.5
}
fn default_max_backtracks() -> usize {
    30
}

impl Default for LineSearchSection {
    fn default() -> Self {
        Self {
            shrink: default_shrink(),
            max_backtracks: default_max_backtracks(),
        }
    }
}

/// A sweep axis: an explicit value list or a uniform range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            AxisSpec::Values(v) => {
                if v.is_empty() {
                    return Err(SelfsimError::Config("sweep axis value list is empty".into()));
                }
                Ok(v.clone())
            }
            AxisSpec::Range { start, stop, count } => {
                if *count == 0 {
                    return Err(SelfsimError::Config("sweep axis range count must be >= 1".into()));
                }
                if *count == 1 {
                    return Ok(vec![*start]);
                }
                let step = (stop - start) / (*count as f64 - 1.0);
                Ok((0..*count).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    /// One solve at the configured C₀ and seed.
    Solve,
    /// Cartesian product over a C₀ axis and/or per-mode amplitude axes;
    /// unswept values come from the top-level config.
    Sweep {
        #[serde(default)]
        c0: Option<AxisSpec>,
        /// Mode number (string key) → amplitude axis.
        #[serde(default)]
        modes: BTreeMap<String, AxisSpec>,
    },
    /// The configured solve repeated across a node-count list, with an
    /// exponential error-model fit on the three largest counts.
    Resolution { n2_values: Vec<usize> },
    /// Closed-form flux-constant table for a mode range.
    LinearTable { k_min: usize, k_max: usize },
    /// Oracle suites: circle identities, layer eigenrelations, scaling,
    /// operator equivalence.
    Validate,
}

impl RunConfig {
    /// All documented defaults with the given experiment.
    pub fn with_experiment(experiment: Experiment) -> Self {
        Self {
            tau: default_tau(),
            k_eff: default_k_eff(),
            atwood: default_atwood(),
            n1: default_n1(),
            n2: default_n2(),
            c0: 0.0,
            initial_modes: BTreeMap::new(),
            newton: NewtonSection::default(),
            line_search: LineSearchSection::default(),
            experiment,
            output_dir: default_output_dir(),
        }
    }

    /// Parse and fully validate a JSON config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            SelfsimError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| {
            SelfsimError::Config(format!("cannot parse config {}: {e}", path.display()))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.physical_params().validate()?;
        self.solver_config()?.validate()?;
        match &self.experiment {
            Experiment::Solve | Experiment::Validate => {}
            Experiment::Sweep { c0, modes } => {
                if c0.is_none() && modes.is_empty() {
                    return Err(SelfsimError::Config(
                        "sweep requires at least one axis (experiment.c0 or experiment.modes)"
                            .into(),
                    ));
                }
                if let Some(axis) = c0 {
                    axis.values()?;
                }
                for (key, axis) in modes {
                    let mode = parse_mode_key(key)?;
                    if mode == 0 || mode >= self.n1 {
                        return Err(SelfsimError::Config(format!(
                            "sweep mode {mode} must lie in 1..n1 = {}",
                            self.n1
                        )));
                    }
                    axis.values()?;
                }
            }
            Experiment::Resolution { n2_values } => {
                if n2_values.is_empty() {
                    return Err(SelfsimError::Config(
                        "resolution experiment requires a nonempty n2_values list".into(),
                    ));
                }
                for &n2 in n2_values {
                    if n2 % 2 != 0 || n2 < 2 * self.n1 {
                        return Err(SelfsimError::Config(format!(
                            "resolution n2 = {n2} must be even and >= 2·n1 = {}",
                            2 * self.n1
                        )));
                    }
                }
            }
            Experiment::LinearTable { k_min, k_max } => {
                if *k_min < 3 {
                    return Err(SelfsimError::Config(format!(
                        "linear-table k_min must be >= 3, got {k_min}"
                    )));
                }
                if k_max < k_min {
                    return Err(SelfsimError::Config(format!(
                        "linear-table k_max = {k_max} must be >= k_min = {k_min}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn physical_params(&self) -> PhysicalParams {
        PhysicalParams {
            tau: self.tau,
            k_eff: self.k_eff,
            atwood: self.atwood,
        }
    }

    /// Seed modes with numeric keys; mode 0 omitted here (the solver defaults
    /// it to 1).
    pub fn seed_modes(&self) -> Result<BTreeMap<usize, f64>> {
        let mut out = BTreeMap::new();
        for (key, &value) in &self.initial_modes {
            let mode = parse_mode_key(key)?;
            if mode >= self.n1 {
                return Err(SelfsimError::Config(format!(
                    "initial_modes key {mode} is outside the n1 = {} range",
                    self.n1
                )));
            }
            out.insert(mode, value);
        }
        Ok(out)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        Ok(SolverConfig {
            n1: self.n1,
            n2: self.n2,
            c0: self.c0,
            initial_modes: self.seed_modes()?,
            newton_tol: self.newton.tol,
            max_iters: self.newton.max_iters,
            fd_step: self.newton.fd_step,
            ls_shrink: self.line_search.shrink,
            ls_max_backtracks: self.line_search.max_backtracks,
            jacobian_refresh: self.newton.refresh,
            circle_threshold: 1e-8,
            step_mode: self.newton.step_mode,
        })
    }
}

fn parse_mode_key(key: &str) -> Result<usize> {
    key.parse::<usize>().map_err(|_| {
        SelfsimError::Config(format!("mode key '{key}' is not a nonnegative integer"))
    })
}
