//! Reproducible experiments: nested Dehn twists, an oscillating circle
//! twist, and a catalog of maps with known orbits.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::{Euclid, Float};

use crate::error::{bail, Result};
use crate::geometry::{hausdorff, Point};
use crate::maps::{AngleProfile, DehnSchedule, Map, MapDescriptor, PowerBands};
use crate::rescale::{
    default_tail_levels, derivative_sample, omega_limit, ring_bound_estimate, trace_orbit, DerivativeSample,
    LimitSetEstimate, Rescaling, TraceParams,
};

/// The map that twists by `f⁺` on each `[t_n, s_n]` and by `f⁻` on each
/// `[r_{n+1}, u_n]`.
pub fn dehn_twist_map(schedule: &DehnSchedule) -> Result<MapDescriptor> {
    schedule.validate()?;
    Ok(MapDescriptor::TwistSchedule { schedule: schedule.clone() })
}

/// Rescalings of the Dehn twist map along `δ_n = r_n/R` and `ε_n = t_n/R`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DehnPair {
    pub delta: DerivativeSample,
    pub epsilon: DerivativeSample,
    /// `sup |f_{δ_n} − f_{ε_n}|` over grid points with `|z| < R`, per `n`.
    pub inside: Vec<f64>,
    /// The same over `R < |z| < 2R`.
    pub annulus: Vec<f64>,
    /// `sup |f_{δ_n}(z) − z|` over `|z| < R`.
    pub delta_identity_gap: Vec<f64>,
    /// Inside discrepancy never increases with `n`.
    pub inside_monotone: bool,
    /// Annulus discrepancy stays above ten times the last inside value.
    pub separated: bool,
    /// Fewer than three levels: too short to judge a trend.
    pub inconclusive: bool,
}

/// Evaluates `f_{δ_n}` and `f_{ε_n}` on `grid` for every level `n`.
pub fn dehn_derivative_pair(schedule: &DehnSchedule, grid: &[Point]) -> Result<DehnPair> {
    let map = Map::new(dehn_twist_map(schedule)?)?;
    let big_r = schedule.probe_radius;
    if grid.is_empty() {
        bail!(Domain, "empty grid");
    }
    let deltas: Vec<f64> = schedule.levels.iter().map(|l| l.r / big_r).collect();
    let epsilons: Vec<f64> = schedule.levels.iter().map(|l| l.t / big_r).collect();
    let rescaling = Rescaling::centered(&map)?;
    // Convergence is judged separately below; the samples only record values.
    let delta = derivative_sample(&rescaling, &deltas, grid, f64::MAX)?;
    let epsilon = derivative_sample(&rescaling, &epsilons, grid, f64::MAX)?;

    let sup_where = |a: &[Point], b: &[Point], keep: &dyn Fn(f64) -> bool| {
        grid.iter()
            .zip(a.iter().zip(b))
            .filter(|(z, _)| keep(z.norm()))
            .map(|(_, (x, y))| (x - y).norm())
            .fold(0.0, f64::max)
    };
    let inside_region = |r: f64| r < big_r;
    let annulus_region = |r: f64| r > big_r && r < 2.0 * big_r;
    let mut inside = Vec::new();
    let mut annulus = Vec::new();
    let mut delta_identity_gap = Vec::new();
    for (dv, ev) in delta.values.iter().zip(&epsilon.values) {
        inside.push(sup_where(dv, ev, &inside_region));
        annulus.push(sup_where(dv, ev, &annulus_region));
        delta_identity_gap.push(sup_where(dv, grid, &inside_region));
    }
    let inside_monotone = inside.windows(2).all(|w| w[1] <= w[0]);
    let last_inside = *inside.last().expect("nonempty schedule");
    let separated = annulus.iter().all(|&a| a > 10.0 * last_inside);
    Ok(DehnPair {
        delta,
        epsilon,
        inconclusive: inside.len() < 3,
        inside,
        annulus,
        delta_identity_gap,
        inside_monotone,
        separated,
    })
}

/// Log-polar grid for the Dehn experiment: `n_r` radii from `10⁻³·R` to
/// just below `2R`, `n_theta` angles each.
pub fn dehn_grid(probe_radius: f64, n_r: usize, n_theta: usize) -> Vec<Point> {
    crate::beltrami::log_polar_grid(1e-3 * probe_radius, 1.99 * probe_radius, n_r, n_theta)
}

/// The circle twist map with angle profile `θ(r)`.
pub fn oscillating_map(profile: AngleProfile) -> Result<MapDescriptor> {
    profile.validate()?;
    Ok(MapDescriptor::OscillatingTwist { profile })
}

/// Orbits of `1` and `−1` under an oscillating circle twist.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OscillationReport {
    pub profile: AngleProfile,
    pub depth: f64,
    pub positive: LimitSetEstimate,
    pub negative: LimitSetEstimate,
    /// Hausdorff distance from the orbit of `1` to `{1}`.
    pub positive_error: f64,
    /// Hausdorff distance from the orbit of `−1` to the expected arc.
    pub negative_error: f64,
    /// Range of `arg γ_{−1}` over the deepest tail, in `[0, 2π)`.
    pub angle_range: (f64, f64),
}

/// Tail levels for the oscillating experiment. The default profile moves
/// with `ln ln(1/t)`, so the tails have to reach far below `1e-20`.
pub const OSCILLATION_TAILS: [f64; 3] = [1e-20, 1e-50, 1e-100];
pub const OSCILLATION_DEPTH: f64 = 1e-300;

/// Traces `γ_{±1}` of the oscillating map down to `depth`.
///
/// The orbit of `−1` is compared with the set of angles the profile sweeps
/// over the deepest tail; for the default profile that is the semicircle
/// `θ ∈ [π/2, 3π/2]`.
pub fn oscillation_experiment(profile: AngleProfile, depth: f64, tails: &[f64]) -> Result<OscillationReport> {
    let map = Map::new(oscillating_map(profile.clone())?)?;
    let params = TraceParams::new(1.0, depth);
    let plus = trace_orbit(&map, Point::new(1.0, 0.0), &params)?;
    let minus = trace_orbit(&map, Point::new(-1.0, 0.0), &params)?;
    let positive = omega_limit(&plus, tails, None)?;
    let negative = omega_limit(&minus, tails, None)?;
    let positive_error = hausdorff(&positive.points, &[Point::new(1.0, 0.0)])?;
    let angles: Vec<f64> = negative.points.iter().map(|p| Euclid::rem_euclid(&p.arg(), &(2.0 * PI))).collect();
    let lo = angles.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = angles.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (a, b) = match profile {
        AngleProfile::LogLog { amplitude, .. } => (PI - amplitude.abs(), PI + amplitude.abs()),
        AngleProfile::Constant { angle } => (angle, angle),
        AngleProfile::Knots { .. } => (lo, hi),
    };
    let n = 4096;
    let arc: Vec<Point> = (0..=n).map(|j| Point::from_polar(1.0, a + (b - a) * j as f64 / n as f64)).collect();
    let negative_error = hausdorff(&negative.points, &arc)?;
    Ok(OscillationReport { profile, depth, positive, negative, positive_error, negative_error, angle_range: (lo, hi) })
}

/// What the orbit of the probe should look like.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "shape", rename_all = "snake_case"))]
pub enum ExpectedOrbit {
    Point { at: Point },
    Circle { radius: f64 },
    Segment { from: Point, to: Point },
}

impl ExpectedOrbit {
    /// Dense samples of the expected set.
    pub fn samples(&self, n: usize) -> Vec<Point> {
        match *self {
            ExpectedOrbit::Point { at } => alloc::vec![at],
            ExpectedOrbit::Circle { radius } => crate::geometry::circle_points(Point::new(0.0, 0.0), radius, n),
            ExpectedOrbit::Segment { from, to } => {
                (0..=n).map(|j| from + (to - from) * (j as f64 / n as f64)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CatalogEntry {
    pub name: String,
    pub descriptor: MapDescriptor,
    pub probe: Point,
    pub expected: ExpectedOrbit,
    /// Stand-in for a map that is not constructed exactly.
    pub illustrative: bool,
}

/// Maps with closed-form orbits: a rotation, a power map, a logarithmic
/// spiral, and a radial power map whose orbit of `2` is a segment.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    let entry = |name: &str, descriptor, probe, expected, illustrative| CatalogEntry {
        name: String::from(name),
        descriptor,
        probe,
        expected,
        illustrative,
    };
    alloc::vec![
        entry(
            "linear",
            MapDescriptor::Linear { multiplier: Point::new(0.0, 1.0) },
            Point::new(1.0, 0.0),
            ExpectedOrbit::Point { at: Point::new(0.0, 1.0) },
            false,
        ),
        entry(
            "power",
            MapDescriptor::Power { degree: 3 },
            Point::from_polar(0.9, 0.5),
            ExpectedOrbit::Point { at: Point::from_polar(0.9f64.powi(3), 1.5) },
            false,
        ),
        entry(
            "log_spiral",
            MapDescriptor::LogSpiral { twist: 1.0 },
            Point::new(1.0, 0.0),
            ExpectedOrbit::Circle { radius: 1.0 },
            false,
        ),
        entry(
            "radial_power",
            MapDescriptor::RadialPower { bands: PowerBands { low_exponent: 1.0, high_exponent: 2.0, period: 1.0 } },
            Point::new(2.0, 0.0),
            ExpectedOrbit::Segment { from: Point::new(2.0, 0.0), to: Point::new(4.0, 0.0) },
            true,
        ),
    ]
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CatalogResult {
    pub name: String,
    pub estimate: LimitSetEstimate,
    pub ring_bounds: (f64, f64),
    pub error: f64,
}

/// Traces every catalog entry from `t = 1` to `depth` and measures the
/// Hausdorff distance of its ω-limit estimate to the expected orbit.
pub fn catalog_experiment(depth: f64, per_decade: usize) -> Result<Vec<CatalogResult>> {
    builtin_catalog()
        .into_iter()
        .map(|e| {
            let map = Map::new(e.descriptor.clone())?;
            let trace = trace_orbit(&map, e.probe, &TraceParams::new(1.0, depth).per_decade(per_decade))?;
            let estimate = omega_limit(&trace, &default_tail_levels(&trace), None)?;
            let error = hausdorff(&estimate.points, &e.expected.samples(20_000))?;
            Ok(CatalogResult { name: e.name, ring_bounds: ring_bound_estimate(&trace)?, estimate, error })
        })
        .collect()
}

/// Default oscillation profile: `π + (π/2)·sin(2π·ln ln(1/r))`.
pub fn default_profile() -> AngleProfile {
    AngleProfile::LogLog { amplitude: FRAC_PI_2, frequency: 1.0 }
}
