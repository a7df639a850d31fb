//! Complex dilatation `μ_f = f_z̄ / f_z` and the distortion it encodes.
//!
//! Closed forms are provided for the affine, spiral and radial families,
//! together with a central-difference estimate that works for any map.
//! The sharp distortion of the spiral and radial families is also computed
//! in closed form; the planner uses it to pick twist rates and ring ratios.

use alloc::format;
use alloc::vec::Vec;

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};
use crate::geometry::Point;
use crate::maps::{Map, MapDescriptor};

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Largest admissible spiral twist `|2K/(1 − K²)|` (infinite at `K = 1`).
pub fn spiral_alpha_max(stretch: f64) -> Result<f64> {
    if !(stretch > 0.0 && stretch.is_finite()) {
        bail!(Domain, "stretch must be positive, got {stretch}");
    }
    if stretch == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok((2.0 * stretch / (1.0 - stretch * stretch)).abs())
}

/// Supremum of admissible inner radii `exp(−|ln(L/K)|)` of a radial stretch.
pub fn radial_ratio_max(outer_stretch: f64, inner_stretch: f64) -> Result<f64> {
    if !(outer_stretch > 0.0 && inner_stretch > 0.0) {
        bail!(Domain, "stretches must be positive");
    }
    Ok((-(inner_stretch / outer_stretch).ln().abs()).exp())
}

/// `(K − 1)/(K + 1)`, the dilatation of every `h_{K,θ}`.
pub fn affine_dilatation(stretch: f64) -> f64 {
    (stretch - 1.0) / (stretch + 1.0)
}

/// Dilatation of the spiral `h_{K,0}(z)·|z|^{iα}` at `z ≠ 0`:
/// `(2k − α sin ψ + iα(cos ψ + k)) / (2 + αk sin ψ + iα(1 + k cos ψ))` with
/// `k = (K−1)/(K+1)` and `ψ = 2 arg z`.
pub fn spiral_dilatation(stretch: f64, twist: f64, z: Point) -> Point {
    let k = affine_dilatation(stretch);
    let psi = 2.0 * z.arg();
    let (s, c) = psi.sin_cos();
    let num = Point::new(2.0 * k - twist * s, twist * (c + k));
    let den = Point::new(2.0 + twist * k * s, twist * (1.0 + k * c));
    num / den
}

/// Dilatation of the radial stretch. Inside `t ≤ |z| ≤ 1`, with
/// `c = K|z|^ν`, `P = (ν+1)cos²φ + sin²φ` and `Q = ν cos φ sin φ`, it is
/// `(c(P + iQ) − 1) / (c(P − iQ) + 1)`; outside the ring it is constant.
pub fn radial_dilatation(outer_stretch: f64, inner_stretch: f64, inner_radius: f64, z: Point) -> Point {
    let r = z.norm();
    if r > 1.0 {
        return Point::new(affine_dilatation(outer_stretch), 0.0);
    }
    if r < inner_radius {
        return Point::new(affine_dilatation(inner_stretch), 0.0);
    }
    let nu = crate::maps::formulas::radial_exponent(outer_stretch, inner_stretch, inner_radius);
    let c = outer_stretch * r.powf(nu);
    let (s, co) = z.arg().sin_cos();
    let p = (nu + 1.0) * co * co + s * s;
    let q = nu * co * s;
    (Point::new(c * p, c * q) - 1.0) / (Point::new(c * p, -c * q) + 1.0)
}

/// Closed-form dilatation for the families that have one.
pub fn beltrami_analytic(map: &Map, z: Point) -> Result<Point> {
    if z.norm() == 0.0 {
        bail!(Domain, "dilatation is not defined at the origin");
    }
    use MapDescriptor as D;
    Ok(match map.descriptor() {
        D::Linear { .. } | D::Power { .. } => Point::new(0.0, 0.0),
        D::AffineStretch { stretch, .. } => Point::new(affine_dilatation(*stretch), 0.0),
        D::Spiral { stretch, twist } => spiral_dilatation(*stretch, *twist, z),
        D::LogSpiral { twist } => spiral_dilatation(1.0, *twist, z),
        D::RadialStretch { outer_stretch, inner_stretch, inner_radius } => {
            radial_dilatation(*outer_stretch, *inner_stretch, *inner_radius, z)
        }
        D::PiecewiseAnnulus { .. } => match map.annulus() {
            Some(a) => a.dilatation(z),
            None => Point::new(0.0, 0.0),
        },
        other => bail!(Capability, "no closed-form dilatation for {}", other.kind_name()),
    })
}

/// Central-difference Wirtinger derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WirtingerEstimate {
    pub f_z: Point,
    pub f_zbar: Point,
    /// False when the stencil straddles a seam of a piecewise map.
    pub reliable: bool,
}

impl WirtingerEstimate {
    pub fn dilatation(&self) -> Point {
        self.f_zbar / self.f_z
    }
}

/// `f_z = (f_x − i f_y)/2` and `f_z̄ = (f_x + i f_y)/2` from central
/// differences of step `h`.
pub fn wirtinger_numeric(map: &Map, z: Point, h: f64) -> Result<WirtingerEstimate> {
    if !(h > 0.0 && h.is_finite()) {
        bail!(Domain, "finite-difference step must be positive, got {h}");
    }
    let stencil = [
        z + Point::new(h, 0.0),
        z - Point::new(h, 0.0),
        z + Point::new(0.0, h),
        z - Point::new(0.0, h),
    ];
    let region = map.region(z);
    let reliable = stencil.iter().all(|&p| map.region(p) == region);
    let v: Vec<Point> = stencil.iter().map(|&p| map.eval(p)).collect();
    let f_x = (v[0] - v[1]) / (2.0 * h);
    let f_y = (v[2] - v[3]) / (2.0 * h);
    let i = Point::new(0.0, 1.0);
    Ok(WirtingerEstimate {
        f_z: (f_x - i * f_y) * 0.5,
        f_zbar: (f_x + i * f_y) * 0.5,
        reliable,
    })
}

/// `(1 + |μ|)/(1 − |μ|)`.
pub fn distortion_of(mu: Point) -> Result<f64> {
    let m = mu.norm();
    if !(m < 1.0) {
        bail!(Degenerate, "|mu| = {m} is not below 1");
    }
    Ok((1.0 + m) / (1.0 - m))
}

fn distortion_from_abs(m: f64) -> f64 {
    if m >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + m) / (1.0 - m)
    }
}

/// Sharp distortion `sup_z (1+|μ_S|)/(1−|μ_S|)` of the spiral.
///
/// `|μ_S|²` is a ratio `(a + p·v)/(b + q·v)` over unit vectors
/// `v = (sin ψ, cos ψ)`; its extreme values are the roots of a quadratic.
pub fn spiral_max_distortion(stretch: f64, twist: f64) -> f64 {
    let k = affine_dilatation(stretch);
    let a2 = twist * twist;
    let a = 4.0 * k * k + a2 * (1.0 + k * k);
    let b = 4.0 + a2 * (1.0 + k * k);
    let sin_coef = 4.0 * k * twist;
    let cos_coef = 2.0 * a2 * k;
    // (a − λb)² = sin_coef²(1 + λ)² + cos_coef²(1 − λ)²
    let s2 = sin_coef * sin_coef;
    let c2 = cos_coef * cos_coef;
    let qa = b * b - s2 - c2;
    let qb = -2.0 * a * b - 2.0 * s2 + 2.0 * c2;
    let qc = a * a - s2 - c2;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let lambda = if qa > 0.0 {
        (-qb + disc.sqrt()) / (2.0 * qa)
    } else {
        return f64::INFINITY;
    };
    distortion_from_abs(lambda.max(0.0).sqrt())
}

/// Sharp distortion of the radial stretch with exponent `ν` on its ring.
///
/// For fixed `c = K|z|^ν` the quantity `D + 1/D` is monotone in
/// `cos 2φ`, and it is convex in `c`, so the supremum is attained at
/// `c ∈ {K, L}` with `D ∈ {c, 1/c, c(1+ν), 1/(c(1+ν))}`.
pub fn radial_max_distortion(outer_stretch: f64, inner_stretch: f64, nu: f64) -> f64 {
    if nu <= -1.0 {
        return f64::INFINITY;
    }
    [outer_stretch, inner_stretch]
        .into_iter()
        .flat_map(|c| [c, c * (1.0 + nu)])
        .map(|x| x.max(1.0 / x))
        .fold(1.0, f64::max)
}

/// Largest twist in `[0, limit]` whose spiral has distortion at most
/// `target`. Distortion grows with `|α|`, so bisection applies.
pub fn spiral_twist_for_distortion(stretch: f64, target: f64, limit: f64) -> Result<f64> {
    let floor = stretch.max(1.0 / stretch);
    if !(target >= floor) {
        bail!(Domain, "distortion target {target} is below max(K, 1/K) = {floor}");
    }
    if !(limit >= 0.0) {
        bail!(Domain, "twist limit must be nonnegative");
    }
    if spiral_max_distortion(stretch, limit) <= target {
        return Ok(limit);
    }
    let (mut lo, mut hi) = (0.0, limit);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spiral_max_distortion(stretch, mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Ok(lo)
}

/// Largest inner radius `t ≤ limit` for which the radial stretch from `K`
/// to `L` has distortion at most `target`.
pub fn radial_ratio_for_distortion(outer_stretch: f64, inner_stretch: f64, target: f64, limit: f64) -> Result<f64> {
    let floor = [outer_stretch, inner_stretch]
        .into_iter()
        .map(|c| c.max(1.0 / c))
        .fold(1.0, f64::max);
    if !(target >= floor) {
        bail!(Domain, "distortion target {target} is below {floor}");
    }
    if !(limit > 0.0 && limit < 1.0) {
        bail!(Domain, "ratio limit must lie in (0, 1)");
    }
    let log_ratio = (inner_stretch / outer_stretch).ln();
    if log_ratio == 0.0 {
        return Ok(limit);
    }
    // Admissible 1 + ν, from c(1+ν) ≤ D and 1/(c(1+ν)) ≤ D at c ∈ {K, L}.
    let lo = 1.0 / (target * outer_stretch.min(inner_stretch));
    let hi = target / outer_stretch.max(inner_stretch);
    // ν has the sign of −ln(L/K); |ν| is the budget on that side.
    let budget = if log_ratio > 0.0 { 1.0 - lo } else { hi - 1.0 };
    let nu_limit = log_ratio / limit.ln();
    if nu_limit.abs() <= budget {
        return Ok(limit);
    }
    let t = (-log_ratio.abs() / budget).exp();
    debug_assert!(radial_max_distortion(outer_stretch, inner_stretch, -log_ratio.signum() * budget) <= target * (1.0 + 1e-12));
    Ok(t.min(limit))
}

/// One sample of a Beltrami field.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BeltramiSample {
    pub z: Point,
    pub mu: Point,
    pub distortion: f64,
}

/// Dilatation sampled on a grid, with the points whose stencil straddled a
/// seam set aside.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BeltramiField {
    pub samples: Vec<BeltramiSample>,
    pub flagged: Vec<Point>,
    pub max_distortion: f64,
}

/// How the finite-difference step is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FdStep {
    Absolute(f64),
    /// Step `h·|z|`, for grids that span many scales.
    Relative(f64),
}

impl FdStep {
    fn at(&self, z: Point) -> f64 {
        match *self {
            FdStep::Absolute(h) => h,
            FdStep::Relative(h) => h * z.norm(),
        }
    }
}

/// Numerical Beltrami field of `map` on `grid`.
///
/// Fails with a degenerate-map error at the first reliable sample with
/// `|μ| ≥ 1`.
pub fn beltrami_field(map: &Map, grid: &[Point], step: FdStep) -> Result<BeltramiField> {
    let mut samples = Vec::with_capacity(grid.len());
    let mut flagged = Vec::new();
    let mut max_distortion: f64 = 1.0;
    for &z in grid {
        let est = wirtinger_numeric(map, z, step.at(z))?;
        if !est.reliable {
            flagged.push(z);
            continue;
        }
        let mu = est.dilatation();
        let distortion = distortion_of(mu).map_err(|_| {
            crate::Error::Degenerate(format!("|mu| = {} at z = {z}", mu.norm()))
        })?;
        max_distortion = max_distortion.max(distortion);
        samples.push(BeltramiSample { z, mu, distortion });
    }
    Ok(BeltramiField { samples, flagged, max_distortion })
}

/// `n_r × n_theta` grid, log-spaced in radius over `[r_lo, r_hi]`.
pub fn log_polar_grid(r_lo: f64, r_hi: f64, n_r: usize, n_theta: usize) -> Vec<Point> {
    let mut grid = Vec::with_capacity(n_r * n_theta);
    let (a, b) = (r_lo.ln(), r_hi.ln());
    for i in 0..n_r {
        let s = if n_r == 1 { 0.5 } else { i as f64 / (n_r - 1) as f64 };
        let r = (a + s * (b - a)).exp();
        for j in 0..n_theta {
            // Half-step offset keeps samples off the coordinate axes.
            let phi = core::f64::consts::TAU * (j as f64 + 0.5) / n_theta as f64;
            grid.push(Point::from_polar(r, phi));
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn map(d: MapDescriptor) -> Map {
        Map::new(d).unwrap()
    }

    #[test]
    fn alpha_bound_values() {
        assert!((spiral_alpha_max(2.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(spiral_alpha_max(1.0).unwrap(), f64::INFINITY);
        assert!((spiral_alpha_max(3.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(spiral_alpha_max(0.0).is_err());
        assert!(spiral_alpha_max(-1.0).is_err());
    }

    #[test]
    fn distortion_values() {
        assert_eq!(distortion_of(Point::new(0.0, 0.0)).unwrap(), 1.0);
        assert!((distortion_of(Point::new(0.0, 1.0 / 3.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((distortion_of(Point::new(0.6, 0.0)).unwrap() - 4.0).abs() < 1e-15);
        assert!(matches!(distortion_of(Point::new(1.0, 0.0)), Err(crate::Error::Degenerate(_))));
    }

    #[test]
    fn analytic_dilatation_examples() {
        let z = Point::from_polar(0.8, 0.3);
        let s = map(MapDescriptor::Spiral { stretch: 3.0, twist: 0.0 });
        assert!((beltrami_analytic(&s, z).unwrap() - Point::new(0.5, 0.0)).norm() < 1e-15);
        let h = map(MapDescriptor::AffineStretch { stretch: 4.0, angle: 2.2 });
        assert!((beltrami_analytic(&h, z).unwrap() - Point::new(0.6, 0.0)).norm() < 1e-15);
        // K = 1: substitute k = 0, giving iα e^{iψ}/(2 + iα).
        let alpha = 1.3;
        let s = map(MapDescriptor::Spiral { stretch: 1.0, twist: alpha });
        let i = Point::new(0.0, 1.0);
        let expected = i * alpha * Point::from_polar(1.0, 0.6) / (2.0 + i * alpha);
        let mu = beltrami_analytic(&s, z).unwrap();
        assert!((mu - expected).norm() < 1e-15);
        assert!((mu.norm() - alpha / (4.0 + alpha * alpha).sqrt()).abs() < 1e-15);
        assert!(beltrami_analytic(&s, Point::new(0.0, 0.0)).is_err());
        let d = map(MapDescriptor::DehnTwist { direction: 1 });
        assert!(matches!(beltrami_analytic(&d, z), Err(crate::Error::Capability(_))));
    }

    #[test]
    fn wirtinger_of_holomorphic_and_affine_maps() {
        let w = Point::new(0.4, -1.7);
        let l = map(MapDescriptor::Linear { multiplier: w });
        let est = wirtinger_numeric(&l, Point::new(0.3, 0.9), DEFAULT_FD_STEP).unwrap();
        assert!((est.f_z - w).norm() < 1e-9);
        assert!(est.f_zbar.norm() < 1e-9);
        let h = map(MapDescriptor::AffineStretch { stretch: 4.0, angle: 0.0 });
        let est = wirtinger_numeric(&h, Point::new(-2.0, 0.5), DEFAULT_FD_STEP).unwrap();
        assert!((est.f_z - Point::new(2.5, 0.0)).norm() < 1e-9);
        assert!((est.f_zbar - Point::new(1.5, 0.0)).norm() < 1e-9);
        assert!(wirtinger_numeric(&h, Point::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn wirtinger_matches_spiral_formula() {
        let s = map(MapDescriptor::Spiral { stretch: 2.0, twist: 0.5 });
        let z = Point::from_polar(1.0, PI / 7.0);
        let num = wirtinger_numeric(&s, z, 1e-5).unwrap().dilatation();
        let ana = beltrami_analytic(&s, z).unwrap();
        assert!((num - ana).norm() < 1e-6, "{num} vs {ana}");
    }

    #[test]
    fn stencil_across_radial_seam_is_flagged() {
        let r = map(MapDescriptor::RadialStretch { outer_stretch: 1.0, inner_stretch: 4.0, inner_radius: 0.125 });
        assert!(!wirtinger_numeric(&r, Point::new(1.0, 0.0), 1e-5).unwrap().reliable);
        assert!(wirtinger_numeric(&r, Point::new(0.5, 0.0), 1e-5).unwrap().reliable);
    }

    fn sampled_spiral_distortion(stretch: f64, twist: f64) -> f64 {
        let m = (0..20000)
            .map(|j| spiral_dilatation(stretch, twist, Point::from_polar(1.0, PI * j as f64 / 20000.0)).norm())
            .fold(0.0, f64::max);
        distortion_from_abs(m)
    }

    #[test]
    fn spiral_max_distortion_matches_sampling() {
        for (k, a) in [(2.25, 0.55), (0.25, 0.2), (1.0, 1.0), (4.0, 0.1), (1.3, 2.0)] {
            let exact = spiral_max_distortion(k, a);
            let sampled = sampled_spiral_distortion(k, a);
            assert!(exact >= sampled - 1e-9 && exact <= sampled * (1.0 + 1e-6), "{k} {a}: {exact} vs {sampled}");
        }
        // K = 1: |μ| = |α|/√(4 + α²), so α = 1/√2 gives distortion 2.
        assert!((spiral_max_distortion(1.0, 0.5f64.sqrt()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_bound_spiral_exceeds_twice_stretch() {
        // The half-bound twist is not enough to keep distortion ≤ 2K.
        let k = 2.25;
        let half = 0.5 * spiral_alpha_max(k).unwrap();
        let d = spiral_max_distortion(k, half);
        assert!(d > 2.0 * k, "{d}");
        let calibrated = spiral_twist_for_distortion(k, 2.0 * k, half).unwrap();
        assert!(calibrated < half);
        assert!((spiral_max_distortion(k, calibrated) - 2.0 * k).abs() < 1e-9);
    }

    fn sampled_radial_distortion(k: f64, l: f64, t: f64) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=200 {
            let r = (t.ln() * i as f64 / 200.0).exp();
            for j in 0..400 {
                let z = Point::from_polar(r, PI * j as f64 / 400.0);
                m = m.max(radial_dilatation(k, l, t, z).norm());
            }
        }
        distortion_from_abs(m)
    }

    #[test]
    fn radial_max_distortion_matches_sampling() {
        for (k, l, t) in [(1.0, 4.0, 0.125), (4.0, 1.0, 0.125), (0.25, 4.0, 1.0 / 32.0), (2.25, 0.64, 0.1)] {
            let nu = crate::maps::formulas::radial_exponent(k, l, t);
            let exact = radial_max_distortion(k, l, nu);
            let sampled = sampled_radial_distortion(k, l, t);
            assert!(exact >= sampled - 1e-9 && exact <= sampled * (1.0 + 1e-3), "{k} {l}: {exact} vs {sampled}");
        }
    }

    #[test]
    fn radial_calibration_meets_target() {
        let (k, l) = (0.25, 4.0);
        let half = 0.5 * radial_ratio_max(k, l).unwrap();
        let target = 2.0 * 4.0;
        let t = radial_ratio_for_distortion(k, l, target, half).unwrap();
        assert!(t < half);
        let nu = crate::maps::formulas::radial_exponent(k, l, t);
        assert!((radial_max_distortion(k, l, nu) - target).abs() < 1e-9);
        // (1, 4) at t = 1/8 is already within budget.
        assert_eq!(radial_ratio_for_distortion(1.0, 4.0, 8.0, 0.125).unwrap(), 0.125);
    }

    #[test]
    fn field_on_affine_map() {
        let h = map(MapDescriptor::AffineStretch { stretch: 3.0, angle: 1.0 });
        let grid = log_polar_grid(0.1, 10.0, 10, 12);
        let field = beltrami_field(&h, &grid, FdStep::Relative(1e-5)).unwrap();
        assert_eq!(field.samples.len(), 120);
        assert!((field.max_distortion - 3.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn numeric_matches_analytic_spiral(
            ln_k in -1.5..1.5f64,
            frac in -0.95..0.95f64,
            r in 0.2..3.0f64,
            phi in -3.1..3.1f64,
        ) {
            let k = ln_k.exp();
            let twist = frac * spiral_alpha_max(k).unwrap().min(20.0);
            let s = map(MapDescriptor::Spiral { stretch: k, twist });
            let z = Point::from_polar(r, phi);
            let num = wirtinger_numeric(&s, z, 1e-5).unwrap().dilatation();
            let ana = beltrami_analytic(&s, z).unwrap();
            prop_assert!((num - ana).norm() < 1e-6);
            prop_assert!(ana.norm() < 1.0);
        }

        #[test]
        fn calibrated_spiral_stays_within_twice_stretch(ln_k in -1.5..1.5f64, phi in -3.1..3.1f64) {
            let k = ln_k.exp();
            let half = (0.5 * spiral_alpha_max(k).unwrap()).min(1.0);
            let twist = spiral_twist_for_distortion(k, 2.0 * k.max(1.0 / k), half).unwrap();
            let s = map(MapDescriptor::Spiral { stretch: k, twist });
            let mu = beltrami_analytic(&s, Point::from_polar(1.0, phi)).unwrap();
            prop_assert!(mu.norm() < 1.0);
            prop_assert!(distortion_of(mu).unwrap() <= 2.0 * k.max(1.0 / k) * (1.0 + 1e-9));
        }

        #[test]
        fn spiral_distortion_grows_with_twist(ln_k in -1.5..1.5f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
            let k = ln_k.exp();
            let bound = spiral_alpha_max(k).unwrap().min(10.0);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(spiral_max_distortion(k, lo * bound) <= spiral_max_distortion(k, hi * bound) * (1.0 + 1e-12));
        }
    }
}
