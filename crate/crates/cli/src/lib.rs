//! File formats and command implementations behind the `orbitspace` binary.
//!
//! [`run`] turns a resolved [`RunConfig`] into the bytes of one artifact,
//! CSV or a JSON report, and a pass/fail flag. It never touches stdout, so
//! the same call backs the binary and the tests.

pub mod config;
pub mod input;
pub mod output;

use orbitspace::beltrami::{beltrami_field, log_polar_grid, BeltramiField, FdStep};
use orbitspace::maps::{DehnSchedule, Map};
use orbitspace::realizer::{
    verify_realization, Planner, Realization, VerificationReport, VerifyOptions,
};
use orbitspace::rescale::{
    default_tail_levels, omega_limit, ring_bound_estimate, trace_orbit, LimitSetEstimate, OrbitTrace, TraceParams,
};
use orbitspace::scenarios::{
    catalog_experiment, dehn_derivative_pair, dehn_grid, default_profile, oscillation_experiment, CatalogResult,
    DehnPair, OscillationReport, OSCILLATION_TAILS,
};
use orbitspace::Point;
use serde::{Deserialize, Serialize};

pub use config::{Command, Format, RunConfig, Scenario};
use input::{load_map, load_target, MapInput};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error in {source_name} at line {line}, column {column}: {message}")]
    Parse { source_name: String, line: usize, column: usize, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Library(#[from] orbitspace::Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for bad input, 3 for I/O, 4 for numerical failures. Exit code 1 is
    /// reserved for a verification that ran but did not pass.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Library(orbitspace::Error::Descriptor(_) | orbitspace::Error::Domain(_)) => 2,
            CliError::Library(_) => 4,
            CliError::Io { .. } => 3,
        }
    }
}

/// The artifact of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub bytes: Vec<u8>,
    /// False only when a verification ran and failed.
    pub passed: bool,
}

/// A JSON report: the resolved configuration followed by the result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report<T> {
    pub config: RunConfig,
    pub result: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalPoint {
    pub x: Point,
    pub value: Point,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaResult {
    pub estimate: LimitSetEstimate,
    pub ring_bounds: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DehnResult {
    pub schedule: DehnSchedule,
    pub pair: DehnPair,
}

pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    config.validate()?;
    let json_only = |what: &str| -> Result<(), CliError> {
        if config.format == Format::Csv {
            return Err(CliError::Usage(format!("{what} only writes JSON reports")));
        }
        Ok(())
    };
    let ok = |bytes| Ok(Output { bytes, passed: true });
    match config.command {
        Command::Eval => {
            let map = load_map(config)?.into_map()?;
            let points: Vec<EvalPoint> = config.x.iter().map(|&x| EvalPoint { x, value: map.eval(x) }).collect();
            match config.format {
                Format::Csv => ok(output::points_csv(points.iter().map(|p| p.value))?),
                Format::Json => ok(output::json(config, &points)?),
            }
        }
        Command::Beltrami => {
            let field = beltrami(config)?;
            match config.format {
                Format::Csv => ok(output::beltrami_csv(&field)?),
                Format::Json => ok(output::json(config, &field)?),
            }
        }
        Command::Trace => {
            let trace = trace(config)?;
            match config.format {
                Format::Csv => ok(output::trace_csv(&trace)?),
                Format::Json => ok(output::json(config, &trace)?),
            }
        }
        Command::Omega => {
            let trace = trace(config)?;
            let estimate = omega_limit(&trace, &default_tail_levels(&trace), config.tol_converge)?;
            let result = OmegaResult { ring_bounds: ring_bound_estimate(&trace)?, estimate };
            match config.format {
                Format::Csv => ok(output::points_csv(result.estimate.points.iter().copied())?),
                Format::Json => ok(output::json(config, &result)?),
            }
        }
        Command::Realize => {
            json_only("realize")?;
            ok(output::json(config, &realize(config)?)?)
        }
        Command::Verify => {
            json_only("verify")?;
            let report = verify(config)?;
            Ok(Output { bytes: output::json(config, &report)?, passed: report.passed })
        }
        Command::Scenario => {
            json_only("scenario")?;
            let scenario = config
                .scenario
                .ok_or_else(|| CliError::Usage("scenario needs one of dehn, oscillating, catalog".into()))?;
            match scenario {
                Scenario::Dehn => ok(output::json(config, &dehn(config)?)?),
                Scenario::Oscillating => ok(output::json(config, &oscillating(config)?)?),
                Scenario::Catalog => ok(output::json(config, &catalog(config)?)?),
            }
        }
    }
}

fn single_probe(config: &RunConfig) -> Result<Point, CliError> {
    match config.x.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::Usage(format!("{:?} takes exactly one --x", config.command))),
    }
}

fn trace(config: &RunConfig) -> Result<OrbitTrace, CliError> {
    let map = load_map(config)?.into_map()?;
    let probe = single_probe(config)?;
    let params = TraceParams { rho: config.rho_method(), ..TraceParams::new(config.t_hi, config.t_lo) }
        .per_decade(config.per_decade);
    Ok(trace_orbit(&map, probe, &params)?)
}

/// Log-polar grid over `t_lo ≤ |z| ≤ t_hi`.
fn beltrami(config: &RunConfig) -> Result<BeltramiField, CliError> {
    let map = load_map(config)?.into_map()?;
    let grid = log_polar_grid(config.t_lo, config.t_hi, config.grid.0, config.grid.1);
    Ok(beltrami_field(&map, &grid, FdStep::Relative(config.fd_step))?)
}

fn realize(config: &RunConfig) -> Result<Realization, CliError> {
    let target = load_target(config)?;
    let planner = Planner::new(target.bound, config.plan_policy())?;
    Ok(planner.synthesize_to_depth(&target, 1, config.k_max, config.depth)?)
}

fn verify(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let target = load_target(config)?;
    let input = load_map(config)?;
    let options = VerifyOptions {
        depth: config.depth,
        per_decade: config.per_decade,
        grid_radii: config.grid.0,
        grid_angles: config.grid.1,
        fd_step: config.fd_step,
        tol_hausdorff: config.tol_hausdorff,
        tol_converge: config.tol_converge,
        ..VerifyOptions::default()
    };
    let (map, plan) = match input {
        MapInput::Descriptor(d) => (Map::new(d)?, None),
        MapInput::Realization(r) => (Map::new(r.map)?, Some(r.plan)),
    };
    Ok(verify_realization(&map, &target, plan.as_ref(), &options)?)
}

fn dehn(config: &RunConfig) -> Result<DehnResult, CliError> {
    let schedule = DehnSchedule::geometric(config.levels, config::DEFAULT_DEHN_RADIUS)?;
    let grid = dehn_grid(schedule.probe_radius, config.grid.0, config.grid.1);
    let pair = dehn_derivative_pair(&schedule, &grid)?;
    Ok(DehnResult { schedule, pair })
}

fn oscillating(config: &RunConfig) -> Result<OscillationReport, CliError> {
    Ok(oscillation_experiment(default_profile(), config.depth, &OSCILLATION_TAILS)?)
}

fn catalog(config: &RunConfig) -> Result<Vec<CatalogResult>, CliError> {
    Ok(catalog_experiment(config.depth, config.per_decade)?)
}
