//! Mean radius, rescaled maps and orbit curves.
//!
//! For a map `f` and a base point `x₀` the rescaled maps are
//! `f_t(x) = (f(x₀ + t·x) − f(x₀)) / ρ_f(t)`, where `ρ_f(t)` is the radius of
//! the disk with the same area as `f(B(x₀, t))`. The orbit curve of a probe
//! `x` is `γ_x(t) = f_t(x)`, and its ω-limit set is estimated from the
//! tails of a log-spaced trace.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{bail, Result};
use crate::geometry::{enclosed_area, hausdorff, Point};
use crate::maps::{circle_image_at, Map, MapDescriptor};

/// Default trace density.
pub const DEFAULT_PER_DECADE: usize = 64;
/// Default sample count for contour areas.
pub const DEFAULT_CONTOUR_SAMPLES: usize = 4096;

/// How `ρ_f` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "method", rename_all = "snake_case"))]
pub enum RhoMethod {
    /// Closed form if available, else contour for injective maps, else raster.
    #[default]
    Auto,
    Analytic,
    /// Shoelace area of the image of the circle; injective maps only.
    Contour { samples: usize },
    /// Area of a rasterized image of the disk, counting overlaps once.
    Raster(RasterOptions),
}

/// The backend that actually produced `ρ_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RhoBackend {
    Analytic,
    Contour,
    Raster,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RasterOptions {
    /// Target ratio of boundary-band area to image area.
    pub max_band_fraction: f64,
    /// Cap on cells along the longer side of the bounding box.
    pub max_resolution: usize,
    /// Rings and spokes of the polar mesh pushed forward by the map.
    pub mesh_rings: usize,
    pub mesh_spokes: usize,
    /// Seed for a random sub-cell offset of the grid; `None` keeps the grid
    /// aligned with the bounding box.
    pub seed: Option<u64>,
}

impl Default for RasterOptions {
    fn default() -> Self {
        RasterOptions {
            max_band_fraction: 0.005,
            max_resolution: 4096,
            mesh_rings: 64,
            mesh_spokes: 2048,
            seed: None,
        }
    }
}

/// Closed-form `ρ_f(r)` around `x₀`, if the family has one.
pub fn analytic_mean_radius(map: &Map, x0: Point, r: f64) -> Option<f64> {
    use MapDescriptor as D;
    let centered = x0.norm() == 0.0;
    let rho = match map.descriptor() {
        D::Linear { multiplier } => multiplier.norm() * r,
        D::AffineStretch { stretch, .. } => stretch.sqrt() * r,
        _ if !centered => return None,
        D::Power { degree } => r.powi(*degree as i32),
        D::Spiral { stretch, .. } => stretch.sqrt() * r,
        D::LogSpiral { .. } | D::DehnTwist { .. } | D::OscillatingTwist { .. } | D::TwistSchedule { .. } => r,
        D::RadialStretch { outer_stretch, inner_stretch, inner_radius } => {
            let factor = if r >= 1.0 {
                *outer_stretch
            } else if r <= *inner_radius {
                *inner_stretch
            } else {
                let nu = crate::maps::formulas::radial_exponent(*outer_stretch, *inner_stretch, *inner_radius);
                outer_stretch * r.powf(nu)
            };
            factor.sqrt() * r
        }
        D::PiecewiseAnnulus { .. } => map.annulus()?.area_stretch(r).sqrt() * r,
        D::RadialPower { bands } => bands.log_modulus(r).exp(),
    };
    Some(rho)
}

/// `ρ_f(r)` for the disk `B(x₀, r)` with the backend chosen by `method`.
pub fn mean_radius_at(map: &Map, x0: Point, r: f64, method: &RhoMethod) -> Result<(f64, RhoBackend)> {
    if !(r > 0.0 && r.is_finite()) {
        bail!(Domain, "radius must be positive, got {r}");
    }
    let backend = resolve_backend(map, x0, method)?;
    let rho = match (backend, method) {
        (RhoBackend::Analytic, _) => analytic_mean_radius(map, x0, r).expect("resolved backend"),
        (RhoBackend::Contour, RhoMethod::Contour { samples }) => contour_mean_radius(map, x0, r, *samples)?,
        (RhoBackend::Contour, _) => contour_mean_radius(map, x0, r, DEFAULT_CONTOUR_SAMPLES)?,
        (RhoBackend::Raster, RhoMethod::Raster(opts)) => raster_mean_radius(map, x0, r, opts)?,
        (RhoBackend::Raster, _) => raster_mean_radius(map, x0, r, &RasterOptions::default())?,
    };
    Ok((rho, backend))
}

/// `ρ_f(r)` for the disk `B(0, r)`.
pub fn mean_radius(map: &Map, r: f64, method: &RhoMethod) -> Result<f64> {
    mean_radius_at(map, Point::new(0.0, 0.0), r, method).map(|(rho, _)| rho)
}

fn resolve_backend(map: &Map, x0: Point, method: &RhoMethod) -> Result<RhoBackend> {
    let has_analytic = analytic_mean_radius(map, x0, 1.0).is_some();
    match method {
        RhoMethod::Auto if has_analytic => Ok(RhoBackend::Analytic),
        RhoMethod::Auto if map.is_injective() => Ok(RhoBackend::Contour),
        RhoMethod::Auto => Ok(RhoBackend::Raster),
        RhoMethod::Analytic if has_analytic => Ok(RhoBackend::Analytic),
        RhoMethod::Analytic => bail!(
            Capability,
            "no closed-form mean radius for {} at x0 = {x0}",
            map.descriptor().kind_name()
        ),
        RhoMethod::Contour { .. } if !map.is_injective() => bail!(
            Capability,
            "contour area double-counts the non-injective {} map; use the raster method",
            map.descriptor().kind_name()
        ),
        RhoMethod::Contour { .. } => Ok(RhoBackend::Contour),
        RhoMethod::Raster(_) => Ok(RhoBackend::Raster),
    }
}

fn contour_mean_radius(map: &Map, x0: Point, r: f64, samples: usize) -> Result<f64> {
    let image = circle_image_at(map, x0, r, samples)?;
    Ok((enclosed_area(&image)? / PI).sqrt())
}

/// Raster estimate of `ρ_f(r)` with its boundary-band fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RasterArea {
    pub area: f64,
    /// Cells touching the image boundary, as a fraction of covered cells.
    pub band_fraction: f64,
    pub resolution: usize,
}

fn raster_mean_radius(map: &Map, x0: Point, r: f64, opts: &RasterOptions) -> Result<f64> {
    Ok((raster_area(map, x0, r, opts)?.area / PI).sqrt())
}

/// Area of `f(B(x₀, r))` from a triangulated polar mesh of the disk whose
/// image triangles are scan-converted onto a grid. A cell counts once no
/// matter how many triangles cover its centre, so overlapping sheets of a
/// non-injective map are not double-counted.
///
/// The grid is refined until boundary cells make up at most
/// `max_band_fraction` of the covered cells, or the resolution cap is hit.
pub fn raster_area(map: &Map, x0: Point, r: f64, opts: &RasterOptions) -> Result<RasterArea> {
    if !(r > 0.0 && r.is_finite()) {
        bail!(Domain, "radius must be positive, got {r}");
    }
    if opts.mesh_rings < 1 || opts.mesh_spokes < 8 || opts.max_resolution < 16 {
        bail!(Domain, "raster mesh needs at least 1 ring, 8 spokes and 16 cells");
    }
    let f0 = map.eval(x0);
    let (n_r, n_a) = (opts.mesh_rings, opts.mesh_spokes);
    let mut nodes = Vec::with_capacity(n_r * n_a + 1);
    nodes.push(map.eval(x0) - f0);
    for i in 1..=n_r {
        let rad = r * i as f64 / n_r as f64;
        for j in 0..n_a {
            nodes.push(map.eval(x0 + Point::from_polar(rad, TAU * j as f64 / n_a as f64)) - f0);
        }
    }
    let node = |i: usize, j: usize| if i == 0 { 0 } else { 1 + (i - 1) * n_a + j % n_a };
    let mut triangles = Vec::with_capacity(2 * n_r * n_a);
    for j in 0..n_a {
        triangles.push([node(0, 0), node(1, j), node(1, j + 1)]);
    }
    for i in 1..n_r {
        for j in 0..n_a {
            triangles.push([node(i, j), node(i + 1, j), node(i + 1, j + 1)]);
            triangles.push([node(i, j), node(i + 1, j + 1), node(i, j + 1)]);
        }
    }

    let (mut lo, mut hi) = (nodes[0], nodes[0]);
    for p in &nodes {
        lo = Point::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Point::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let extent = (hi.re - lo.re).max(hi.im - lo.im);
    if !(extent > 0.0) {
        bail!(Degenerate, "image of B({x0}, {r}) has zero extent");
    }

    let mut jitter = opts.seed.map(ChaCha8Rng::seed_from_u64);
    let mut resolution = 64usize;
    loop {
        let offset = match jitter.as_mut() {
            Some(rng) => Point::new(unit_f64(rng), unit_f64(rng)),
            None => Point::new(0.5, 0.5),
        };
        let grid = RasterGrid::new(lo, extent, resolution, offset);
        let covered = grid.fill(&nodes, &triangles);
        let (count, band) = covered.count_and_band();
        if count == 0 {
            bail!(Degenerate, "image of B({x0}, {r}) covers no raster cell");
        }
        let band_fraction = band as f64 / count as f64;
        let done = band_fraction <= opts.max_band_fraction || resolution >= opts.max_resolution;
        if done {
            let cell = grid.cell;
            return Ok(RasterArea { area: count as f64 * cell * cell, band_fraction, resolution });
        }
        // Band cells scale like 1/resolution.
        let factor = (band_fraction / opts.max_band_fraction * 1.1).max(1.5);
        resolution = ((resolution as f64 * factor).ceil() as usize).min(opts.max_resolution);
    }
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

struct RasterGrid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
}

struct Coverage {
    bits: Vec<bool>,
    nx: usize,
    ny: usize,
}

impl RasterGrid {
    fn new(lo: Point, extent: f64, resolution: usize, offset: Point) -> Self {
        let cell = extent / resolution as f64;
        // One spare cell on every side so the offset never clips the image.
        let origin = lo - Point::new(cell * (1.0 + offset.re), cell * (1.0 + offset.im));
        let n = resolution + 3;
        RasterGrid { origin, cell, nx: n, ny: n }
    }

    fn fill(&self, nodes: &[Point], triangles: &[[usize; 3]]) -> Coverage {
        let mut bits = vec![false; self.nx * self.ny];
        let to_grid = |p: Point| (p - self.origin) / self.cell;
        for tri in triangles {
            let [a, b, c] = tri.map(|i| to_grid(nodes[i]));
            let det = (b - a).re * (c - a).im - (b - a).im * (c - a).re;
            if det == 0.0 {
                continue;
            }
            // Cell (i, j) has its centre at (i + 1/2, j + 1/2).
            let x0 = (a.re.min(b.re).min(c.re) - 0.5).ceil().max(0.0) as usize;
            let x1 = (a.re.max(b.re).max(c.re) - 0.5).floor().min(self.nx as f64 - 1.0);
            let y0 = (a.im.min(b.im).min(c.im) - 0.5).ceil().max(0.0) as usize;
            let y1 = (a.im.max(b.im).max(c.im) - 0.5).floor().min(self.ny as f64 - 1.0);
            if x1 < x0 as f64 || y1 < y0 as f64 {
                continue;
            }
            let eps = 1e-12 * det.abs();
            for j in y0..=(y1 as usize) {
                for i in x0..=(x1 as usize) {
                    let p = Point::new(i as f64 + 0.5, j as f64 + 0.5);
                    let w0 = orient(b, c, p) * det.signum();
                    let w1 = orient(c, a, p) * det.signum();
                    let w2 = orient(a, b, p) * det.signum();
                    if w0 >= -eps && w1 >= -eps && w2 >= -eps {
                        bits[j * self.nx + i] = true;
                    }
                }
            }
        }
        Coverage { bits, nx: self.nx, ny: self.ny }
    }
}

fn orient(a: Point, b: Point, p: Point) -> f64 {
    (b - a).re * (p - a).im - (b - a).im * (p - a).re
}

impl Coverage {
    fn count_and_band(&self) -> (usize, usize) {
        let at = |i: isize, j: isize| {
            i >= 0
                && j >= 0
                && (i as usize) < self.nx
                && (j as usize) < self.ny
                && self.bits[j as usize * self.nx + i as usize]
        };
        let (mut count, mut band) = (0, 0);
        for j in 0..self.ny as isize {
            for i in 0..self.nx as isize {
                if !at(i, j) {
                    continue;
                }
                count += 1;
                if !(at(i - 1, j) && at(i + 1, j) && at(i, j - 1) && at(i, j + 1)) {
                    band += 1;
                }
            }
        }
        (count, band)
    }
}

/// The family `f_t` of a map around a base point, with a fixed `ρ` backend.
#[derive(Debug, Clone)]
pub struct Rescaling<'a> {
    map: &'a Map,
    x0: Point,
    f_x0: Point,
    method: RhoMethod,
    backend: RhoBackend,
}

impl<'a> Rescaling<'a> {
    pub fn new(map: &'a Map, x0: Point, method: RhoMethod) -> Result<Self> {
        let backend = resolve_backend(map, x0, &method)?;
        Ok(Rescaling { map, x0, f_x0: map.eval(x0), method, backend })
    }

    pub fn centered(map: &'a Map) -> Result<Self> {
        Rescaling::new(map, Point::new(0.0, 0.0), RhoMethod::Auto)
    }

    pub fn backend(&self) -> RhoBackend {
        self.backend
    }

    pub fn base_point(&self) -> Point {
        self.x0
    }

    pub fn rho(&self, t: f64) -> Result<f64> {
        let rho = mean_radius_at(self.map, self.x0, t, &self.method)?.0;
        if !(rho > 0.0 && rho.is_finite()) {
            bail!(Degenerate, "mean radius at t = {t} is {rho}");
        }
        Ok(rho)
    }

    /// `f_t(x)`.
    pub fn eval(&self, t: f64, x: Point) -> Result<Point> {
        let rho = self.rho(t)?;
        Ok(self.eval_with_rho(t, rho, x))
    }

    fn eval_with_rho(&self, t: f64, rho: f64, x: Point) -> Point {
        (self.map.eval(self.x0 + x * t) - self.f_x0) / rho
    }
}

/// `f_t(x) = (f(x₀ + t·x) − f(x₀)) / ρ_f(t)`.
pub fn rescaled_eval(map: &Map, t: f64, x: Point, x0: Point, method: &RhoMethod) -> Result<Point> {
    if !(t > 0.0 && t.is_finite()) {
        bail!(Domain, "rescaling parameter must be positive, got {t}");
    }
    Rescaling::new(map, x0, *method)?.eval(t, x)
}

/// `γ_x(t)` at base point `0`.
pub fn gamma(map: &Map, x: Point, t: f64, method: &RhoMethod) -> Result<Point> {
    rescaled_eval(map, t, x, Point::new(0.0, 0.0), method)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrbitSample {
    pub t: f64,
    pub value: Point,
}

/// Samples of `γ_x` at strictly decreasing `t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrbitTrace {
    pub probe: Point,
    pub base_point: Point,
    pub backend: RhoBackend,
    pub per_decade: usize,
    pub samples: Vec<OrbitSample>,
}

impl OrbitTrace {
    pub fn values(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.value).collect()
    }

    /// Values with `t ≤ level`.
    pub fn tail(&self, level: f64) -> Vec<Point> {
        self.samples.iter().filter(|s| s.t <= level).map(|s| s.value).collect()
    }

    pub fn t_range(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.t, self.samples.last()?.t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceParams {
    pub t_hi: f64,
    pub t_lo: f64,
    pub per_decade: usize,
    pub base_point: Point,
    pub rho: RhoMethod,
}

impl TraceParams {
    pub fn new(t_hi: f64, t_lo: f64) -> Self {
        TraceParams {
            t_hi,
            t_lo,
            per_decade: DEFAULT_PER_DECADE,
            base_point: Point::new(0.0, 0.0),
            rho: RhoMethod::Auto,
        }
    }

    pub fn per_decade(mut self, n: usize) -> Self {
        self.per_decade = n;
        self
    }

    /// The log-spaced parameters `t_hi = t_0 > … > t_n = t_lo`.
    pub fn t_values(&self) -> Result<Vec<f64>> {
        let (hi, lo) = (self.t_hi, self.t_lo);
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            bail!(Domain, "need 0 < t_lo < t_hi, got t_lo = {lo}, t_hi = {hi}");
        }
        if self.per_decade < 8 {
            bail!(Domain, "need at least 8 samples per decade, got {}", self.per_decade);
        }
        let span = (hi.ln() - lo.ln()) / core::f64::consts::LN_10;
        let n = ((span * self.per_decade as f64).ceil() as usize).max(1);
        let (a, b) = (hi.ln(), lo.ln());
        let mut ts: Vec<f64> = (0..=n).map(|k| (a + (b - a) * k as f64 / n as f64).exp()).collect();
        ts[0] = hi;
        ts[n] = lo;
        Ok(ts)
    }
}

/// Samples `γ_x` at log-spaced `t` from `t_hi` down to `t_lo`.
pub fn trace_orbit(map: &Map, probe: Point, params: &TraceParams) -> Result<OrbitTrace> {
    let ts = params.t_values()?;
    let rescaling = Rescaling::new(map, params.base_point, params.rho)?;
    let samples = ts
        .into_iter()
        .map(|t| Ok(OrbitSample { t, value: rescaling.eval(t, probe)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitTrace {
        probe,
        base_point: params.base_point,
        backend: rescaling.backend(),
        per_decade: params.per_decade,
        samples,
    })
}

/// Point cloud approximating `ω(γ_x)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitSetEstimate {
    /// Values of the deepest tail.
    pub points: Vec<Point>,
    /// Tail thresholds, decreasing.
    pub tail_levels: Vec<f64>,
    /// Hausdorff distance between each pair of successive tails.
    pub stabilization: Vec<f64>,
    pub tolerance: f64,
    pub converged: bool,
}

impl LimitSetEstimate {
    pub fn final_stabilization(&self) -> Option<f64> {
        self.stabilization.last().copied()
    }
}

/// Decade thresholds whose tails keep at least half of the trace's
/// logarithmic range, deepest three at most.
///
/// Shallow tails would mostly repeat the transient; tails near `t_lo` hold
/// too few samples to show a whole period of the curve.
pub fn default_tail_levels(trace: &OrbitTrace) -> Vec<f64> {
    let Some((hi, lo)) = trace.t_range() else {
        return Vec::new();
    };
    let half = 0.5 * (hi.log10() - lo.log10());
    let mut levels = Vec::new();
    let mut e = hi.log10().floor() as i32;
    loop {
        let level = 10f64.powi(e);
        if level.log10() - lo.log10() < half - 1e-9 {
            break;
        }
        if level <= hi {
            levels.push(level);
        }
        e -= 1;
    }
    let keep = levels.len().min(3);
    levels.split_off(levels.len() - keep)
}

/// Largest gap between consecutive values of the tail below `level`.
pub fn tail_sampling_gap(trace: &OrbitTrace, level: f64) -> f64 {
    trace
        .tail(level)
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .fold(0.0, f64::max)
}

/// Estimates `ω(γ_x)` from the tails of `trace` below each level.
///
/// The default tolerance is twice the largest sampling gap in the deepest
/// tail. A single level gives no stabilization data and is never marked
/// converged.
pub fn omega_limit(trace: &OrbitTrace, tail_levels: &[f64], tolerance: Option<f64>) -> Result<LimitSetEstimate> {
    if tail_levels.is_empty() {
        bail!(InsufficientDepth, "no tail levels given");
    }
    let mut levels = tail_levels.to_vec();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let mut tails = Vec::with_capacity(levels.len());
    for &level in &levels {
        let tail = trace.tail(level);
        if tail.is_empty() {
            bail!(InsufficientDepth, "trace has no samples with t <= {level}");
        }
        tails.push(tail);
    }
    let stabilization = tails
        .windows(2)
        .map(|w| hausdorff(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let deepest = *levels.last().expect("nonempty");
    let tolerance = tolerance.unwrap_or_else(|| 2.0 * tail_sampling_gap(trace, deepest));
    if !(tolerance >= 0.0) {
        bail!(Domain, "tolerance must be nonnegative");
    }
    let converged = stabilization.last().is_some_and(|&s| s <= tolerance);
    Ok(LimitSetEstimate {
        points: tails.pop().expect("nonempty"),
        tail_levels: levels,
        stabilization,
        tolerance,
        converged,
    })
}

/// Minimum and maximum of `|γ_x(t)|` over the trace, an empirical ring
/// `1/C₁ ≤ |γ| ≤ C₁`.
pub fn ring_bound_estimate(trace: &OrbitTrace) -> Result<(f64, f64)> {
    if trace.samples.is_empty() {
        bail!(Domain, "empty trace");
    }
    Ok(trace.samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| {
        let m = s.value.norm();
        (lo.min(m), hi.max(m))
    }))
}

/// Values of `f_{t_k}` on a grid for a decreasing sequence `t_k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivativeSample {
    pub t_sequence: Vec<f64>,
    pub grid: Vec<Point>,
    /// `values[k][j] = f_{t_k}(grid[j])`.
    pub values: Vec<Vec<Point>>,
    /// `sup_j |f_{t_k}(z_j) − f_{t_{k+1}}(z_j)|` for each consecutive pair.
    pub sup_distances: Vec<f64>,
    pub tolerance: f64,
    pub converged: bool,
}

impl DerivativeSample {
    /// Grid values at the deepest level.
    pub fn limit(&self) -> &[Point] {
        self.values.last().map_or(&[], Vec::as_slice)
    }
}

/// Evaluates `f_{t_k}` at every grid point. Converged when the last pair of
/// levels is within `tolerance` in sup norm.
pub fn derivative_sample(
    rescaling: &Rescaling<'_>,
    t_sequence: &[f64],
    grid: &[Point],
    tolerance: f64,
) -> Result<DerivativeSample> {
    if t_sequence.is_empty() {
        bail!(Domain, "empty t sequence");
    }
    if !t_sequence.iter().all(|&t| t > 0.0 && t.is_finite()) || t_sequence.windows(2).any(|w| w[1] >= w[0]) {
        bail!(Domain, "t sequence must be positive and strictly decreasing");
    }
    if !(tolerance > 0.0) {
        bail!(Domain, "tolerance must be positive");
    }
    let values = t_sequence
        .iter()
        .map(|&t| {
            let rho = rescaling.rho(t)?;
            Ok(grid.iter().map(|&x| rescaling.eval_with_rho(t, rho, x)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_distances: Vec<f64> = values
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        .collect();
    let converged = sup_distances.last().is_some_and(|&d| d <= tolerance);
    Ok(DerivativeSample {
        t_sequence: t_sequence.to_vec(),
        grid: grid.to_vec(),
        values,
        sup_distances,
        tolerance,
        converged,
    })
}
