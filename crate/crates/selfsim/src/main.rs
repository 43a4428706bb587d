//! Configuration-driven experiment runner for self-similar interface shapes.
//!
//! Exit codes: 0 success, 2 config or I/O error, 3 solver non-convergence
//! (solve runs only), 4 validation failure.

use clap::{Args, Parser, Subcommand};
use selfsim::config::{Experiment, RunConfig};
use selfsim::experiment::{self, ExperimentResult};
use selfsim::solver::{SolveStatus, StepMode};
use selfsim::{Result, SelfsimError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "selfsim",
    version,
    about = "Nonlinear self-similar interface shapes in a radial Hele-Shaw cell"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Surface-tension coefficient.
    #[arg(long)]
    tau: Option<f64>,
    /// Effective mobility 2·K₁K₂/(K₁+K₂).
    #[arg(long)]
    k_eff: Option<f64>,
    /// Mobility contrast (K₂−K₁)/(K₁+K₂).
    #[arg(long)]
    atwood: Option<f64>,
    /// Cosine mode count.
    #[arg(long)]
    n1: Option<usize>,
    /// Quadrature node count (even, >= 2·n1).
    #[arg(long)]
    n2: Option<usize>,
    /// Pre-specified flux constant.
    #[arg(long)]
    c0: Option<f64>,
    /// Seed amplitude as MODE=VALUE, repeatable (e.g. --mode 3=0.2).
    #[arg(long = "mode", value_parser = parse_mode_flag)]
    modes: Vec<(usize, f64)>,
    /// Newton stopping tolerance on max|f|.
    #[arg(long)]
    newton_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Forward-difference Jacobian step.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Jacobian refresh cadence in iterations.
    #[arg(long)]
    refresh: Option<usize>,
    /// Newton step reduction: least-squares | fourier-projection.
    #[arg(long, value_parser = parse_step_mode)]
    step_mode: Option<StepMode>,
    /// Line-search shrink factor in (0,1).
    #[arg(long)]
    ls_shrink: Option<f64>,
    #[arg(long)]
    ls_max_backtracks: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one self-similar shape at fixed C₀.
    Solve(CommonArgs),
    /// Run a parameter sweep over C₀ and/or seed amplitudes (config required).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Repeat the configured solve across node counts and fit the error model.
    Resolution {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated node counts (e.g. 256,512,1024,2048).
        #[arg(long, value_delimiter = ',')]
        n2_values: Vec<usize>,
    },
    /// Print the closed-form flux-constant table for a mode range.
    LinearTable {
        #[arg(long, default_value_t = 3)]
        k_min: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the oracle validation suites.
    Validate {
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn parse_mode_flag(text: &str) -> std::result::Result<(usize, f64), String> {
    let (mode, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected MODE=VALUE, got '{text}'"))?;
    let mode = mode
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("mode '{mode}' is not a nonnegative integer"))?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("amplitude '{value}' is not a number"))?;
    Ok((mode, value))
}

fn parse_step_mode(text: &str) -> std::result::Result<StepMode, String> {
    match text.replace('_', "-").as_str() {
        "least-squares" => Ok(StepMode::LeastSquares),
        "fourier-projection" => Ok(StepMode::FourierProjection),
        other => Err(format!(
            "unknown step mode '{other}' (expected least-squares or fourier-projection)"
        )),
    }
}

/// Load the config file or start from defaults, then apply flag overrides.
fn build_config(common: &CommonArgs, default_experiment: Experiment) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::with_experiment(default_experiment.clone()),
    };
    if std::mem::discriminant(&config.experiment) != std::mem::discriminant(&default_experiment) {
        return Err(SelfsimError::Config(format!(
            "config file experiment kind does not match the subcommand: {}",
            serde_json::to_value(&config.experiment)?["kind"]
        )));
    }
    if let Some(v) = common.tau {
        config.tau = v;
    }
    if let Some(v) = common.k_eff {
        config.k_eff = v;
    }
    if let Some(v) = common.atwood {
        config.atwood = v;
    }
    if let Some(v) = common.n1 {
        config.n1 = v;
    }
    if let Some(v) = common.n2 {
        config.n2 = v;
    }
    if let Some(v) = common.c0 {
        config.c0 = v;
    }
    for &(mode, value) in &common.modes {
        config.initial_modes.insert(mode.to_string(), value);
    }
    if let Some(v) = common.newton_tol {
        config.newton.tol = v;
    }
    if let Some(v) = common.max_iters {
        config.newton.max_iters = v;
    }
    if let Some(v) = common.fd_step {
        config.newton.fd_step = v;
    }
    if let Some(v) = common.refresh {
        config.newton.refresh = v;
    }
    if let Some(v) = common.step_mode {
        config.newton.step_mode = v;
    }
    if let Some(v) = common.ls_shrink {
        config.line_search.shrink = v;
    }
    if let Some(v) = common.ls_max_backtracks {
        config.line_search.max_backtracks = v;
    }
    if let Some(v) = &common.output_dir {
        config.output_dir = v.clone();
    }
    config.validate()?;
    Ok(config)
}

fn print_solve_summary(result: &ExperimentResult) {
    for record in &result.records {
        if let Some(err) = &record.error {
            println!("status: error ({err})");
            continue;
        }
        let status = serde_json::to_value(record.status).unwrap();
        println!(
            "status: {}  iterations: {}  final residual: {}",
            status.as_str().unwrap_or("?"),
            record.iterations.unwrap_or(0),
            record
                .final_residual
                .map(experiment::fmt17)
                .unwrap_or_default()
        );
        if let Some(c) = record.c_converged {
            println!(
                "c_converged: {}  (spread {})",
                experiment::fmt17(c),
                record.c_spread.map(experiment::fmt17).unwrap_or_default()
            );
        }
        if let Some(sf) = record.shape_factor {
            println!(
                "shape factor delta/R: {}  dominant fold: {}",
                experiment::fmt17(sf),
                record.dominant_fold.unwrap_or(0)
            );
        }
    }
}

fn run_command(command: Command) -> Result<u8> {
    match command {
        Command::Solve(common) => {
            let config = build_config(&common, Experiment::Solve)?;
            let result = experiment::execute(&config)?;
            print_solve_summary(&result);
            println!("artifacts: {}", config.output_dir.display());
            let code = match result.solve_status() {
                Some(SolveStatus::Converged) | Some(SolveStatus::TrivialCircle) => 0,
                _ => 3,
            };
            Ok(code)
        }
        Command::Sweep { config, output_dir } => {
            let common = CommonArgs {
                config: Some(config),
                output_dir,
                ..Default::default()
            };
            // The experiment axes come from the file; discriminant checking
            // happens against a placeholder sweep.
            let config = build_config(
                &common,
                Experiment::Sweep {
                    c0: None,
                    modes: Default::default(),
                },
            )?;
            let result = experiment::execute(&config)?;
            let failed = result.records.iter().filter(|r| r.error.is_some()).count();
            println!(
                "sweep: {} grid points, {} errored",
                result.records.len(),
                failed
            );
            println!("artifacts: {}", config.output_dir.display());
            Ok(0)
        }
        Command::Resolution { common, n2_values } => {
            let mut config = build_config(
                &common,
                Experiment::Resolution {
                    n2_values: n2_values.clone(),
                },
            )?;
            if !n2_values.is_empty() {
                config.experiment = Experiment::Resolution { n2_values };
                config.validate()?;
            }
            let result = experiment::execute(&config)?;
            for record in &result.records {
                println!(
                    "n2 = {:5}  delta/R = {}  status: {}",
                    record.config.n2,
                    record
                        .shape_factor
                        .map(experiment::fmt17)
                        .unwrap_or_default(),
                    record
                        .error
                        .clone()
                        .unwrap_or_else(|| serde_json::to_value(record.status).unwrap()
                            .as_str()
                            .unwrap_or("?")
                            .to_string()),
                );
            }
            if let Some(fit) = &result.fit {
                if fit.degenerate {
                    println!("fit: degenerate ({}); limit taken at finest grid", fit.note);
                }
                println!(
                    "extrapolated delta/R = {}  beta1 = {}  beta2 = {}",
                    experiment::fmt17(fit.extrapolated),
                    experiment::fmt17(fit.beta1),
                    experiment::fmt17(fit.beta2)
                );
            }
            println!("artifacts: {}", config.output_dir.display());
            Ok(0)
        }
        Command::LinearTable {
            k_min,
            k_max,
            output_dir,
        } => {
            let mut config = RunConfig::with_experiment(Experiment::LinearTable { k_min, k_max });
            if let Some(dir) = output_dir {
                config.output_dir = dir;
            }
            config.validate()?;
            let result = experiment::execute(&config)?;
            println!("k,linear_flux_constant,fitted_flux_constant");
            for row in &result.linear_rows {
                println!(
                    "{},{},{}",
                    row.k,
                    experiment::fmt17(row.linear),
                    row.fitted.map(experiment::fmt17).unwrap_or_default()
                );
            }
            println!("artifacts: {}", config.output_dir.display());
            Ok(0)
        }
        Command::Validate { n2, output_dir } => {
            let mut config = RunConfig::with_experiment(Experiment::Validate);
            if let Some(n2) = n2 {
                config.n2 = n2;
            }
            if let Some(dir) = output_dir {
                config.output_dir = dir;
            }
            config.validate()?;
            let result = experiment::execute(&config)?;
            let validation = result.validation.expect("validate kind produces reports");
            for report in &validation.reports {
                println!(
                    "[{}] {}  error {:.3e} vs tol {:.1e} (n = {})",
                    if report.pass { "PASS" } else { "FAIL" },
                    report.check,
                    report.error,
                    report.tolerance,
                    report.resolution
                );
            }
            println!(
                "validation: {}/{} checks passed",
                validation.reports.iter().filter(|r| r.pass).count(),
                validation.reports.len()
            );
            println!("artifacts: {}", config.output_dir.display());
            Ok(if validation.all_pass { 0 } else { 4 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
