//! Experiment drivers behind the CLI: single solves, parameter sweeps,
//! resolution studies, linear-theory tables, and validation suites, plus the
//! flat-file artifacts each one writes.
//!
//! Numeric CSV output is printed with 17 significant digits and is
//! deterministic for a fixed config: grid points run in a fixed order and no
//! wall-clock value enters a summary table (timestamps live only in the
//! JSON records).

use crate::config::{Experiment, RunConfig};
use crate::error::Result;
use crate::geometry::{sample_interface, FourierShape};
use crate::linear_theory;
use crate::oracle::{self, ValidationReport};
use crate::solver::{solve_self_similar, SolveResult, SolveStatus, SolverConfig};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// One grid point's outcome: the full input echo (re-runnable as a `solve`
/// config), the solve outputs, and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    /// Re-runnable single-solve config reproducing this point.
    pub config: RunConfig,
    pub timestamp: String,
    pub version: String,
    /// None when the point errored before producing a solver outcome.
    pub status: Option<SolveStatus>,
    pub error: Option<String>,
    pub c_converged: Option<f64>,
    pub c_spread: Option<f64>,
    pub shape_factor: Option<f64>,
    pub dominant_fold: Option<usize>,
    pub iterations: Option<usize>,
    pub final_residual: Option<f64>,
    pub residual_history: Vec<f64>,
    /// Cosine coefficients of the final shape (normalized when converged).
    pub coefficients: Vec<f64>,
}

/// Exponential error-model fit v(N) = L + β₁·e^{−β₂·N} through the three
/// largest node counts.
#[derive(Debug, Clone, Serialize)]
pub struct ResolutionFit {
    pub n2_used: Vec<usize>,
    /// L: the N → ∞ limit; equals the finest-grid value when degenerate.
    pub extrapolated: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// True when the differences cannot support the model (noise floor,
    /// sign change, or non-decaying); the fit fields are then placeholders.
    pub degenerate: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearRow {
    pub k: usize,
    pub linear: f64,
    /// Empirical power-law variant; defined for k ≥ 4 only.
    pub fitted: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationOutput {
    pub timestamp: String,
    pub version: String,
    pub all_pass: bool,
    pub reports: Vec<ValidationReport>,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub fit: Option<ResolutionFit>,
    pub linear_rows: Vec<LinearRow>,
    pub validation: Option<ValidationOutput>,
}

impl ExperimentResult {
    /// Status that should drive the process exit code for `solve` runs.
    pub fn solve_status(&self) -> Option<SolveStatus> {
        self.records.first().and_then(|r| r.status)
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// A single-solve config echo for one grid point.
fn point_config(base: &RunConfig, sc: &SolverConfig) -> RunConfig {
    let mut echo = base.clone();
    echo.c0 = sc.c0;
    echo.n2 = sc.n2;
    echo.initial_modes = sc
        .initial_modes
        .iter()
        .map(|(&k, &v)| (k.to_string(), v))
        .collect();
    echo.experiment = Experiment::Solve;
    echo
}

fn record_point(base: &RunConfig, sc: &SolverConfig, outcome: Result<SolveResult>) -> RunRecord {
    let config = point_config(base, sc);
    match outcome {
        Ok(res) => RunRecord {
            config,
            timestamp: now(),
            version: version(),
            status: Some(res.status),
            error: None,
            c_converged: res.c_converged,
            c_spread: res.c_spread,
            shape_factor: Some(res.shape_factor),
            dominant_fold: Some(res.dominant_fold),
            iterations: Some(res.iterations),
            final_residual: res.residual_history.last().copied(),
            residual_history: res.residual_history,
            coefficients: res.shape.coeffs,
        },
        Err(e) => RunRecord {
            config,
            timestamp: now(),
            version: version(),
            status: None,
            error: Some(e.to_string()),
            c_converged: None,
            c_spread: None,
            shape_factor: None,
            dominant_fold: None,
            iterations: None,
            final_residual: None,
            residual_history: Vec::new(),
            coefficients: Vec::new(),
        },
    }
}

/// Run the configured experiment (no filesystem side effects).
pub fn run(config: &RunConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let params = config.physical_params();
    let mut result = ExperimentResult {
        records: Vec::new(),
        fit: None,
        linear_rows: Vec::new(),
        validation: None,
    };
    match &config.experiment {
        Experiment::Solve => {
            let sc = config.solver_config()?;
            let outcome = solve_self_similar(&sc, &params);
            result.records.push(record_point(config, &sc, outcome));
        }
        Experiment::Sweep { c0, modes } => {
            // Axes in a fixed order: C₀ outermost, then modes ascending.
            // Failures are recorded per point and never abort the sweep.
            let c0_values = match c0 {
                Some(axis) => axis.values()?,
                None => vec![config.c0],
            };
            let mut mode_axes: Vec<(usize, Vec<f64>)> = Vec::new();
            for (key, axis) in modes {
                mode_axes.push((key.parse().expect("validated mode key"), axis.values()?));
            }
            mode_axes.sort_by_key(|(k, _)| *k);
            let base_sc = config.solver_config()?;
            let mut index = vec![0usize; mode_axes.len()];
            for &c0_val in &c0_values {
                loop {
                    let mut sc = base_sc.clone();
                    sc.c0 = c0_val;
                    for (axis_i, (mode, values)) in mode_axes.iter().enumerate() {
                        sc.initial_modes.insert(*mode, values[index[axis_i]]);
                    }
                    let outcome = solve_self_similar(&sc, &params);
                    result.records.push(record_point(config, &sc, outcome));
                    // Odometer increment, last axis fastest.
                    let mut carry = true;
                    for axis_i in (0..mode_axes.len()).rev() {
                        index[axis_i] += 1;
                        if index[axis_i] < mode_axes[axis_i].1.len() {
                            carry = false;
                            break;
                        }
                        index[axis_i] = 0;
                    }
                    if carry {
                        break;
                    }
                }
            }
        }
        Experiment::Resolution { n2_values } => {
            let mut n2s = n2_values.clone();
            n2s.sort_unstable();
            let base_sc = config.solver_config()?;
            for &n2 in &n2s {
                let mut sc = base_sc.clone();
                sc.n2 = n2;
                let outcome = solve_self_similar(&sc, &params);
                result.records.push(record_point(config, &sc, outcome));
            }
            let points: Vec<(usize, f64)> = result
                .records
                .iter()
                .filter_map(|r| Some((r.config.n2, r.shape_factor?)))
                .collect();
            result.fit = Some(fit_resolution(&points));
        }
        Experiment::LinearTable { k_min, k_max } => {
            for k in *k_min..=*k_max {
                result.linear_rows.push(LinearRow {
                    k,
                    linear: linear_theory::linear_flux_constant(k as u32)?,
                    fitted: if k >= 4 {
                        Some(linear_theory::fitted_flux_constant(k as u32)?)
                    } else {
                        None
                    },
                });
            }
        }
        Experiment::Validate => {
            let n2 = config.n2.min(256);
            let mut reports = oracle::circle_identity_suite(n2)?;
            reports.extend(oracle::layer_eigenrelation_check(8, n2)?);
            for shape in oracle::reference_shapes() {
                for beta in [0.5, 1.7] {
                    reports.extend(oracle::scaling_identity_check(&shape, beta, &params, n2)?);
                }
            }
            reports.extend(oracle::operator_equivalence_check(
                &oracle::equivalence_shape(),
                &params,
                32,
                512,
            )?);
            let all_pass = reports.iter().all(|r| r.pass);
            result.validation = Some(ValidationOutput {
                timestamp: now(),
                version: version(),
                all_pass,
                reports,
            });
        }
    }
    Ok(result)
}

/// Three-parameter exponential fit on the three largest node counts.
///
/// With v(N) = L + β₁e^{−β₂N}, the pairwise differences of the three largest
/// values give one scalar equation for β₂ (solved by bisection — the
/// difference ratio is strictly decreasing in β₂), after which β₁ and L
/// follow in closed form.
pub fn fit_resolution(points: &[(usize, f64)]) -> ResolutionFit {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let degenerate = |note: &str, pts: &[(usize, f64)]| ResolutionFit {
        n2_used: pts.iter().map(|p| p.0).collect(),
        extrapolated: pts.last().map(|p| p.1).unwrap_or(f64::NAN),
        beta1: 0.0,
        beta2: 0.0,
        degenerate: true,
        note: note.to_string(),
    };
    if pts.len() < 3 {
        return degenerate("need at least three resolutions", &pts);
    }
    let three = &pts[pts.len() - 3..];
    let (na, va) = three[0];
    let (nb, vb) = three[1];
    let (nc, vc) = three[2];
    let d1 = va - vb;
    let d2 = vb - vc;
    let scale = va.abs().max(vb.abs()).max(vc.abs()).max(1e-300);
    if d1.abs() < 64.0 * f64::EPSILON * scale || d2.abs() < 64.0 * f64::EPSILON * scale {
        return degenerate("differences at the roundoff floor", three);
    }
    if d1 * d2 <= 0.0 {
        return degenerate("differences change sign", three);
    }
    let ratio = d2 / d1;
    let ratio_limit = (nc - nb) as f64 / (nb - na) as f64;
    if ratio >= ratio_limit {
        return degenerate("differences do not decay", three);
    }
    // F(β₂) = (e^{−β₂nb} − e^{−β₂nc})/(e^{−β₂na} − e^{−β₂nb}) falls
    // monotonically from ratio_limit (β₂→0) to 0 (β₂→∞).
    let f = |b2: f64| {
        let (ea, eb, ec) = (
            (-b2 * na as f64).exp(),
            (-b2 * nb as f64).exp(),
            (-b2 * nc as f64).exp(),
        );
        (eb - ec) / (ea - eb)
    };
    let (mut lo, mut hi) = (1e-14, 1.0);
    while f(hi) > ratio && hi < 1e6 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > ratio {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let beta2 = 0.5 * (lo + hi);
    let ea = (-beta2 * na as f64).exp();
    let eb = (-beta2 * nb as f64).exp();
    let ec = (-beta2 * nc as f64).exp();
    let beta1 = d1 / (ea - eb);
    let extrapolated = vc - beta1 * ec;
    ResolutionFit {
        n2_used: vec![na, nb, nc],
        extrapolated,
        beta1,
        beta2,
        degenerate: false,
        note: String::new(),
    }
}

/// Format a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn status_label(record: &RunRecord) -> String {
    match record.status {
        Some(s) => serde_json::to_string(&s).unwrap().trim_matches('"').to_string(),
        None => "error".to_string(),
    }
}

fn modes_label(record: &RunRecord) -> String {
    let mut out = String::new();
    for (key, value) in &record.config.initial_modes {
        if !out.is_empty() {
            out.push(';');
        }
        let _ = write!(out, "{key}={}", fmt17(*value));
    }
    out
}

/// Write the artifact files for a finished experiment into `dir`.
pub fn write_artifacts(result: &ExperimentResult, config: &RunConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if !result.records.is_empty() {
        let json = serde_json::to_string_pretty(&result.records)?;
        std::fs::write(dir.join("results.json"), json)?;
    }
    match &config.experiment {
        Experiment::Solve => {
            let record = &result.records[0];
            if !record.coefficients.is_empty() {
                let shape = FourierShape::new(record.coefficients.clone())?;
                write_shape_csv(&shape, config.n2, &dir.join("shape.csv"))?;
                write_spectrum_csv(&shape, &dir.join("spectrum.csv"))?;
            }
        }
        Experiment::Sweep { .. } => {
            let mut csv = String::from("c0,initial_modes,c_converged,shape_factor,dominant_fold,status\n");
            for r in &result.records {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fmt17(r.config.c0),
                    modes_label(r),
                    r.c_converged.map(fmt17).unwrap_or_default(),
                    r.shape_factor.map(fmt17).unwrap_or_default(),
                    r.dominant_fold.map(|v| v.to_string()).unwrap_or_default(),
                    status_label(r),
                );
            }
            std::fs::write(dir.join("summary.csv"), csv)?;
        }
        Experiment::Resolution { .. } => {
            let mut csv =
                String::from("n2,shape_factor,c_converged,iterations,final_residual,status\n");
            for r in &result.records {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    r.config.n2,
                    r.shape_factor.map(fmt17).unwrap_or_default(),
                    r.c_converged.map(fmt17).unwrap_or_default(),
                    r.iterations.map(|v| v.to_string()).unwrap_or_default(),
                    r.final_residual.map(fmt17).unwrap_or_default(),
                    status_label(r),
                );
            }
            std::fs::write(dir.join("summary.csv"), csv)?;
            if let Some(fit) = &result.fit {
                std::fs::write(dir.join("fit.json"), serde_json::to_string_pretty(fit)?)?;
            }
        }
        Experiment::LinearTable { .. } => {
            let mut csv = String::from("k,linear_flux_constant,fitted_flux_constant\n");
            for row in &result.linear_rows {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    row.k,
                    fmt17(row.linear),
                    row.fitted.map(fmt17).unwrap_or_default(),
                );
            }
            std::fs::write(dir.join("summary.csv"), csv)?;
        }
        Experiment::Validate => {
            if let Some(v) = &result.validation {
                std::fs::write(dir.join("validation.json"), serde_json::to_string_pretty(v)?)?;
                let mut csv = String::from("check,error,tolerance,pass,resolution\n");
                for r in &v.reports {
                    let _ = writeln!(
                        csv,
                        "\"{}\",{},{},{},{}",
                        r.check,
                        fmt17(r.error),
                        fmt17(r.tolerance),
                        r.pass,
                        r.resolution,
                    );
                }
                std::fs::write(dir.join("summary.csv"), csv)?;
            }
        }
    }
    Ok(())
}

fn write_shape_csv(shape: &FourierShape, n2: usize, path: &Path) -> Result<()> {
    let si = sample_interface(shape, n2)?;
    let mut csv = String::from("alpha,r,x,y,kappa\n");
    for i in 0..si.n2 {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt17(si.alpha[i]),
            fmt17(si.r[i]),
            fmt17(si.x[i]),
            fmt17(si.y[i]),
            fmt17(si.kappa[i]),
        );
    }
    std::fs::write(path, csv)?;
    Ok(())
}

fn write_spectrum_csv(shape: &FourierShape, path: &Path) -> Result<()> {
    let mut csv = String::from("mode,amplitude\n");
    for (k, c) in shape.coeffs.iter().enumerate() {
        let _ = writeln!(csv, "{k},{}", fmt17(*c));
    }
    std::fs::write(path, csv)?;
    Ok(())
}

/// Run the experiment and write its artifacts under `config.output_dir`.
pub fn execute(config: &RunConfig) -> Result<ExperimentResult> {
    let result = run(config)?;
    write_artifacts(&result, config, &config.output_dir)?;
    Ok(result)
}
