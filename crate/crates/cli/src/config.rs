//! Resolved run configuration. Every numeric default lives here and every
//! report echoes the resolved values.

use clap::ValueEnum;
use orbitspace::realizer::PlanPolicy;
use orbitspace::rescale::{RasterOptions, RhoMethod, DEFAULT_CONTOUR_SAMPLES, DEFAULT_PER_DECADE};
use orbitspace::scenarios::OSCILLATION_DEPTH;
use orbitspace::Point;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_T_HI: f64 = 1.0;
pub const DEFAULT_T_LO: f64 = 1e-6;
pub const DEFAULT_GRID: (usize, usize) = (100, 100);
pub const DEFAULT_FD_STEP: f64 = orbitspace::beltrami::DEFAULT_FD_STEP;
pub const DEFAULT_TOL_HAUSDORFF: f64 = 0.05;
pub const DEFAULT_DEPTH: f64 = 1e-6;
pub const DEFAULT_K_MAX: usize = 3;
pub const DEFAULT_DEHN_LEVELS: usize = 6;
pub const DEFAULT_DEHN_RADIUS: f64 = 1.0;
pub const DEFAULT_SMALL_TWIST_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Eval,
    Beltrami,
    Trace,
    Omega,
    Realize,
    Verify,
    Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Dehn,
    Oscillating,
    Catalog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RhoChoice {
    Auto,
    Analytic,
    Contour,
    Raster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    /// Distortion-calibrated twist and ring ratio.
    Default,
    /// Half the admissibility bounds.
    HalfBound,
    /// Twist small enough that the distortion stays near `C²`.
    SmallTwist,
}

/// Everything a run depends on, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: Option<Scenario>,
    /// Descriptor as given: a path or inline JSON.
    pub map: Option<String>,
    pub target: Option<String>,
    pub x: Vec<Point>,
    pub t_hi: f64,
    pub t_lo: f64,
    pub per_decade: usize,
    pub grid: (usize, usize),
    pub fd_step: f64,
    pub tol_hausdorff: f64,
    pub tol_converge: Option<f64>,
    pub depth: f64,
    pub rho: RhoChoice,
    pub seed: Option<u64>,
    pub bound: Option<f64>,
    pub k_max: usize,
    pub policy: PolicyChoice,
    pub margin: f64,
    pub levels: usize,
    pub out: Option<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            scenario: None,
            map: None,
            target: None,
            x: vec![Point::new(1.0, 0.0)],
            t_hi: DEFAULT_T_HI,
            t_lo: DEFAULT_T_LO,
            per_decade: DEFAULT_PER_DECADE,
            grid: DEFAULT_GRID,
            fd_step: DEFAULT_FD_STEP,
            tol_hausdorff: DEFAULT_TOL_HAUSDORFF,
            tol_converge: None,
            depth: DEFAULT_DEPTH,
            rho: RhoChoice::Auto,
            seed: None,
            bound: None,
            k_max: DEFAULT_K_MAX,
            policy: PolicyChoice::Default,
            margin: DEFAULT_SMALL_TWIST_MARGIN,
            levels: DEFAULT_DEHN_LEVELS,
            out: None,
            format: default_format(command),
        }
    }

    /// Depth default for a scenario, used when `--depth` is not given.
    pub fn scenario_depth(scenario: Scenario) -> f64 {
        match scenario {
            Scenario::Oscillating => OSCILLATION_DEPTH,
            Scenario::Dehn | Scenario::Catalog => DEFAULT_DEPTH,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("--t-hi", self.t_hi),
            ("--t-lo", self.t_lo),
            ("--fd-step", self.fd_step),
            ("--tol-hausdorff", self.tol_hausdorff),
            ("--depth", self.depth),
            ("--margin", self.margin),
        ];
        for (flag, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{flag} must be positive and finite, got {v}")));
            }
        }
        if let Some(tol) = self.tol_converge {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Usage(format!("--tol-converge must be positive, got {tol}")));
            }
        }
        if self.t_lo >= self.t_hi {
            return Err(CliError::Usage(format!("need --t-lo < --t-hi, got {} >= {}", self.t_lo, self.t_hi)));
        }
        if self.grid.0 == 0 || self.grid.1 == 0 {
            return Err(CliError::Usage("--grid needs positive sizes".into()));
        }
        if self.k_max == 0 {
            return Err(CliError::Usage("--k-max must be at least 1".into()));
        }
        if self.x.is_empty() {
            return Err(CliError::Usage("at least one --x is required".into()));
        }
        if self.seed.is_some() && self.rho != RhoChoice::Raster {
            return Err(CliError::Usage("--seed only applies with --rho raster".into()));
        }
        Ok(())
    }

    pub fn rho_method(&self) -> RhoMethod {
        match self.rho {
            RhoChoice::Auto => RhoMethod::Auto,
            RhoChoice::Analytic => RhoMethod::Analytic,
            RhoChoice::Contour => RhoMethod::Contour { samples: DEFAULT_CONTOUR_SAMPLES },
            RhoChoice::Raster => RhoMethod::Raster(RasterOptions { seed: self.seed, ..RasterOptions::default() }),
        }
    }

    pub fn plan_policy(&self) -> PlanPolicy {
        match self.policy {
            PolicyChoice::Default => PlanPolicy::default(),
            PolicyChoice::HalfBound => PlanPolicy::half_bound(),
            PolicyChoice::SmallTwist => PlanPolicy::small_twist(self.margin),
        }
    }
}

/// Traces and fields default to CSV; everything else is a JSON report.
pub fn default_format(command: Command) -> Format {
    match command {
        Command::Eval | Command::Beltrami | Command::Trace | Command::Omega => Format::Csv,
        Command::Realize | Command::Verify | Command::Scenario => Format::Json,
    }
}

/// Parses `re,im` or a bare real number.
pub fn parse_point(s: &str) -> Result<Point, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Point::new(num(re)?, 0.0)),
        [re, im] => Ok(Point::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

/// Parses `N` or `NxM`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let num = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("bad grid size {p:?}: {e}"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((num(a)?, num(b)?)),
        None => {
            let n = num(s)?;
            Ok((n, n))
        }
    }
}
