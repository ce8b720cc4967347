//! Batch front end: load a run configuration, run one command, write CSVs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};

use log::info;
use pde_ssc_core::analysis::verify_decay;
use pde_ssc_core::lmi::{search_feasible, GammaInputs, SearchProblem, SearchReport};
use pde_ssc_core::{cost_integral_i, simulate, ControllerSpec, Order, TrajectoryRecord};
use thiserror::Error;

pub mod config;
pub mod output;

pub use config::{load, load_config, ConfigError, Issue, RunConfig, Source};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    LmiCheck,
    Compare,
    Verify,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] pde_ssc_core::Error),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub(crate) fn csv(path: &Path, e: csv::Error) -> Self {
        Self::io(path, e)
    }

    pub fn exit_code(&self) -> i32 {
        use pde_ssc_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Config(_) | E::SupportExceedsInterval { .. }) => 2,
            CliError::Core(E::Divergence { .. }) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Infeasible,
    Violation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Infeasible | Status::Violation => 4,
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub artifacts: Vec<PathBuf>,
    pub message: String,
}

pub fn run_command(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    match command {
        Command::Simulate => run_simulate(cfg),
        Command::LmiCheck => run_lmi_check(cfg),
        Command::Compare => run_compare(cfg),
        Command::Verify => run_verify(cfg),
    }
}

fn artifact(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(format!("{}{name}", cfg.prefix))
}

/// `<scenario>_<shape>_<K>`, with `open-loop_0` for uncontrolled runs.
pub fn run_stem(cfg: &RunConfig, controller: Option<&ControllerSpec>) -> String {
    match controller {
        Some(c) => format!("{}_{}_{}", cfg.scenario, c.shape().label(), c.gain()),
        None => format!("{}_open-loop_0", cfg.scenario),
    }
}

fn require_controller(cfg: &RunConfig, command: &str) -> Result<ControllerSpec, CliError> {
    cfg.controller.clone().ok_or_else(|| {
        ConfigError::Invalid(vec![Issue {
            key: "controller.gain".into(),
            message: format!("`{command}` needs a controller section"),
        }])
        .into()
    })
}

fn write_run(cfg: &RunConfig, record: &TrajectoryRecord, artifacts: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let stem = run_stem(cfg, record.controller.as_ref());
    let traj = artifact(cfg, &format!("{stem}.csv"));
    output::write_trajectory(&traj, record)?;
    let summary = artifact(cfg, &format!("{stem}_summary.csv"));
    output::write_summary(&summary, record)?;
    artifacts.push(traj);
    artifacts.push(summary);
    Ok(())
}

fn run_simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let record = simulate(&cfg.plant, cfg.controller.as_ref(), &cfg.simulation)?;
    let mut artifacts = Vec::new();
    write_run(cfg, &record, &mut artifacts)?;
    Ok(Outcome {
        status: Status::Ok,
        message: format!("{} steps of dt = {}", record.steps, record.dt),
        artifacts,
    })
}

/// Runs the configured certificate search.
pub fn certificate_search(cfg: &RunConfig, gains: Option<Vec<f64>>) -> Result<SearchReport, CliError> {
    let lmi = &cfg.lmi;
    let problem = match cfg.plant.order() {
        Order::Parabolic => SearchProblem::parabolic(&lmi.bounds, lmi.spacing),
        Order::Hyperbolic => SearchProblem::hyperbolic(&lmi.bounds, lmi.spacing)?,
    };
    let fx_sq_sup = match &cfg.controller {
        Some(c) => c.shape().fx_sq_sup(c.partition(), lmi.reading_bound, 33),
        None => cfg.shape.fx_sq_sup(&cfg.partition, lmi.reading_bound, 33),
    };
    let inputs = GammaInputs {
        f_sq_sup: lmi.bounds.f_abs_max.powi(2) * cfg.plant.length(),
        fx_sq_sup,
    };
    let mut grid = lmi.grid.clone();
    if let Some(g) = gains {
        grid.gain = g;
    }
    let report = search_feasible(&problem, &grid, inputs, lmi.tolerance)?;
    info!(
        "certificate search: {} of {} grid points feasible",
        report.feasible_points, report.evaluated
    );
    Ok(report)
}

fn run_lmi_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = certificate_search(cfg, None)?;
    let path = artifact(cfg, &format!("{}_certificate.csv", cfg.scenario));
    output::write_certificate(&path, &report.best)?;
    let (status, message) = if report.feasible() {
        (
            Status::Ok,
            format!(
                "feasible: K = {}, delta = {}, bound = {}",
                report.best.tuning().gain,
                report.best.decay_rate(),
                report.best.bound
            ),
        )
    } else {
        (
            Status::Infeasible,
            format!(
                "infeasible on all {} grid points; smallest worst eigenvalue {}",
                report.evaluated,
                report.best.worst_eigenvalue()
            ),
        )
    };
    Ok(Outcome {
        status,
        artifacts: vec![path],
        message,
    })
}

fn run_compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = require_controller(cfg, "compare")?;
    if cfg.baseline.label() == c.shape().label() {
        return Err(ConfigError::Invalid(vec![Issue {
            key: "compare.baseline".into(),
            message: format!("baseline and shape are both {:?}", c.shape().label()),
        }])
        .into());
    }
    let base = ControllerSpec::new(c.gain(), cfg.baseline.clone(), c.partition().clone())?;
    let (a, b) = rayon::join(
        || simulate(&cfg.plant, Some(&base), &cfg.simulation),
        || simulate(&cfg.plant, Some(&c), &cfg.simulation),
    );
    let (a, b) = (a?, b?);
    let report = cost_integral_i(&a, &b)?;
    let mut artifacts = Vec::new();
    write_run(cfg, &a, &mut artifacts)?;
    write_run(cfg, &b, &mut artifacts)?;
    let path = artifact(
        cfg,
        &format!("{}_cost_{}_vs_{}_{}.csv", cfg.scenario, report.label_a, report.label_b, c.gain()),
    );
    output::write_cost(&path, &report)?;
    artifacts.push(path);
    Ok(Outcome {
        status: Status::Ok,
        message: format!("I(t_end) = {}", report.final_i()),
        artifacts,
    })
}

fn run_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = require_controller(cfg, "verify")?;
    let search = certificate_search(cfg, Some(vec![c.gain()]))?;
    let cert_path = artifact(cfg, &format!("{}_certificate.csv", cfg.scenario));
    output::write_certificate(&cert_path, &search.best)?;
    let mut artifacts = vec![cert_path];
    if !search.feasible() {
        return Ok(Outcome {
            status: Status::Infeasible,
            message: format!(
                "no certificate at K = {}; smallest worst eigenvalue {}",
                c.gain(),
                search.best.worst_eigenvalue()
            ),
            artifacts,
        });
    }
    let record = simulate(&cfg.plant, Some(&c), &cfg.simulation)?;
    write_run(cfg, &record, &mut artifacts)?;
    let report = verify_decay(&record, &search.best)?;
    let path = artifact(cfg, &format!("{}_decay.csv", run_stem(cfg, Some(&c))));
    output::write_decay(&path, &report)?;
    artifacts.push(path);
    let allowed = cfg.threshold * report.initial_value();
    let status = if report.violation <= allowed {
        Status::Ok
    } else {
        Status::Violation
    };
    Ok(Outcome {
        status,
        message: format!(
            "delta = {}, gamma = {}, violation = {} (allowed {allowed})",
            report.delta, report.gamma, report.violation
        ),
        artifacts,
    })
}
