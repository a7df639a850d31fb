//! Independent checks of a synthesized map against its target.

use alloc::vec::Vec;

use super::plan::CoverPlan;
use super::target::TargetSet;
use crate::beltrami::{beltrami_field, log_polar_grid, FdStep, DEFAULT_FD_STEP};
use crate::error::{bail, Result};
use crate::geometry::{hausdorff, Point};
use crate::maps::Map;
use crate::rescale::{
    default_tail_levels, gamma, omega_limit, ring_bound_estimate, trace_orbit, RhoMethod, TraceParams,
    DEFAULT_PER_DECADE,
};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerifyOptions {
    /// Smallest `t` of the trace.
    pub depth: f64,
    pub per_decade: usize,
    /// Radii and angles of the log-polar Beltrami grid.
    pub grid_radii: usize,
    pub grid_angles: usize,
    /// Finite-difference step relative to `|z|`.
    pub fd_step: f64,
    pub tol_hausdorff: f64,
    /// Tail stabilization tolerance; twice the sampling gap when unset.
    pub tol_converge: Option<f64>,
    pub tol_breakpoint: f64,
    /// Ring slack for `1/C − tol ≤ |γ| ≤ C + tol`.
    pub tol_ring: f64,
    /// Distortion limit; `4C²` when unset.
    pub distortion_limit: Option<f64>,
    /// Spacing used to resample the target polyline.
    pub target_spacing: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            depth: 1e-6,
            per_decade: DEFAULT_PER_DECADE,
            grid_radii: 100,
            grid_angles: 100,
            fd_step: DEFAULT_FD_STEP,
            tol_hausdorff: 0.05,
            tol_converge: None,
            tol_breakpoint: 1e-6,
            tol_ring: 1e-9,
            distortion_limit: None,
            target_spacing: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub options: VerifyOptions,
    pub t_hi: f64,
    pub trace_samples: usize,
    pub tail_levels: Vec<f64>,
    pub stabilization: Vec<f64>,
    pub stabilization_tolerance: f64,
    pub converged: bool,
    /// Hausdorff distance between the ω-limit estimate and the target.
    pub hausdorff: f64,
    pub ring_bounds: (f64, f64),
    pub ring_ok: bool,
    /// Largest `|γ_1(r) − s·e^{iθ}|` over planned breakpoints; `None`
    /// without a plan.
    pub breakpoint_error: Option<f64>,
    pub max_distortion: f64,
    pub distortion_limit: f64,
    pub grid_points: usize,
    pub flagged_stencils: usize,
    pub planned_distortion: Option<f64>,
    pub passed: bool,
}

/// Traces `γ_1` down to `options.depth`, estimates its ω-limit set and
/// compares it with the target; also checks breakpoints, ring bounds and
/// the numerical Beltrami coefficient.
///
/// With a plan, the trace starts at `plan.r_start`, tails begin at the pass
/// start radii and the Beltrami grid spans the planned rings. Without one
/// the trace starts at `t = 1` with the default decade tails.
pub fn verify_realization(
    map: &Map,
    target: &TargetSet,
    plan: Option<&CoverPlan>,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    target.validate()?;
    let depth = options.depth;
    if !(depth > 0.0) {
        bail!(Domain, "depth must be positive");
    }
    let t_hi = match plan {
        Some(p) => {
            if depth > p.r_min {
                bail!(
                    InsufficientDepth,
                    "trace depth {depth} does not reach the innermost planned ring at {}",
                    p.r_min
                );
            }
            p.r_start
        }
        None => 1.0,
    };
    let params = TraceParams { rho: RhoMethod::Auto, ..TraceParams::new(t_hi, depth).per_decade(options.per_decade) };
    let trace = trace_orbit(map, Point::new(1.0, 0.0), &params)?;
    let levels = match plan {
        Some(p) => {
            let radii = p.pass_radii();
            radii[radii.len().saturating_sub(3)..].to_vec()
        }
        None => default_tail_levels(&trace),
    };
    let omega = omega_limit(&trace, &levels, options.tol_converge)?;
    let hausdorff = hausdorff(&omega.points, &target.samples(options.target_spacing))?;
    let ring_bounds = ring_bound_estimate(&trace)?;
    let c = target.bound;
    let ring_ok = ring_bounds.0 >= 1.0 / c - options.tol_ring && ring_bounds.1 <= c + options.tol_ring;

    let breakpoint_error = match plan {
        Some(p) => {
            let mut worst: f64 = 0.0;
            for b in &p.breakpoints {
                let g = gamma(map, Point::new(1.0, 0.0), b.radius, &RhoMethod::Analytic)?;
                worst = worst.max((g - b.expected).norm());
            }
            Some(worst)
        }
        None => None,
    };

    let (r_lo, r_hi) = match plan {
        Some(p) => (p.r_min, p.r_start),
        None => (depth, 1.0),
    };
    let grid = log_polar_grid(r_lo, r_hi, options.grid_radii, options.grid_angles);
    let field = beltrami_field(map, &grid, FdStep::Relative(options.fd_step))?;
    let distortion_limit = options.distortion_limit.unwrap_or(4.0 * c * c);

    let passed = omega.converged
        && hausdorff <= options.tol_hausdorff
        && ring_ok
        && breakpoint_error.is_none_or(|e| e <= options.tol_breakpoint)
        && field.max_distortion <= distortion_limit;
    Ok(VerificationReport {
        options: *options,
        t_hi,
        trace_samples: trace.samples.len(),
        tail_levels: omega.tail_levels,
        stabilization: omega.stabilization,
        stabilization_tolerance: omega.tolerance,
        converged: omega.converged,
        hausdorff,
        ring_bounds,
        ring_ok,
        breakpoint_error,
        max_distortion: field.max_distortion,
        distortion_limit,
        grid_points: grid.len(),
        flagged_stencils: field.flagged.len(),
        planned_distortion: plan.map(|p| p.distortion_bound),
        passed,
    })
}
