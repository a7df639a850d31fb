//! Turning cover paths into rings of spirals and radial stretches.

use alloc::vec::Vec;

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::cover::cover_path;
use super::target::{PathSegment, Polar, TargetSet};
use crate::beltrami::{
    radial_max_distortion, radial_ratio_for_distortion, radial_ratio_max, spiral_alpha_max, spiral_max_distortion,
    spiral_twist_for_distortion,
};
use crate::error::{bail, Result};
use crate::geometry::Point;
use crate::maps::formulas::radial_exponent;
use crate::maps::{AffineFill, AnnulusPiece, MapDescriptor, PieceKind, PiecewiseAnnulus};

/// Twist rate of spiral rings: `|α| = min(bound/2, cap)`, further reduced
/// so the ring's distortion stays at most `factor·max{K, 1/K}` when a factor
/// is set.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwistPolicy {
    pub cap: f64,
    pub distortion_factor: Option<f64>,
}

/// Ring ratio of radial rings: `t = min(bound/2, cap)`, further reduced so
/// the distortion stays at most `factor·max{K, L, 1/K, 1/L}` when a factor
/// is set.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatioPolicy {
    pub cap: f64,
    pub distortion_factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanPolicy {
    pub twist: TwistPolicy,
    pub ratio: RatioPolicy,
}

impl Default for PlanPolicy {
    fn default() -> Self {
        PlanPolicy::with_factor(Some(2.0))
    }
}

impl PlanPolicy {
    fn with_factor(factor: Option<f64>) -> Self {
        PlanPolicy {
            twist: TwistPolicy { cap: 1.0, distortion_factor: factor },
            ratio: RatioPolicy { cap: 0.5, distortion_factor: factor },
        }
    }

    /// Half the admissibility bounds with no distortion check.
    pub fn half_bound() -> Self {
        PlanPolicy::with_factor(None)
    }

    /// Keeps every ring within `(1 + margin)` of the distortion of its
    /// boundary stretches. Small margins mean slow spirals and thin radial
    /// steps, hence deep plans.
    pub fn small_twist(margin: f64) -> Self {
        PlanPolicy::with_factor(Some(1.0 + margin))
    }

    pub fn twist_for(&self, stretch: f64) -> Result<f64> {
        let p = self.twist;
        if !(p.cap > 0.0) {
            bail!(Domain, "twist cap must be positive");
        }
        let alpha = (0.5 * spiral_alpha_max(stretch)?).min(p.cap);
        match p.distortion_factor {
            None => Ok(alpha),
            Some(f) => spiral_twist_for_distortion(stretch, f * stretch.max(1.0 / stretch), alpha),
        }
    }

    pub fn ratio_for(&self, outer: f64, inner: f64) -> Result<f64> {
        let p = self.ratio;
        if !(p.cap > 0.0 && p.cap <= 0.5) {
            bail!(Domain, "ratio cap must lie in (0, 1/2]");
        }
        let t = (0.5 * radial_ratio_max(outer, inner)?).min(p.cap);
        match p.distortion_factor {
            None => Ok(t),
            Some(f) => {
                let m = [outer, inner].into_iter().map(|c| c.max(1.0 / c)).fold(1.0, f64::max);
                radial_ratio_for_distortion(outer, inner, f * m, t)
            }
        }
    }
}

/// Expected value of `γ_1` at a ring boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Breakpoint {
    pub radius: f64,
    pub expected: Point,
}

/// One traversal `Γ_k` of the target.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlannedPass {
    pub k: usize,
    /// The cover radius `1/k`.
    pub cover_radius: f64,
    pub segments: Vec<PathSegment>,
    pub outer_radius: f64,
    pub inner_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverPlan {
    pub target_bound: f64,
    pub policy: PlanPolicy,
    pub passes: Vec<PlannedPass>,
    pub breakpoints: Vec<Breakpoint>,
    /// Largest sharp distortion over all rings and fills.
    pub distortion_bound: f64,
    pub r_start: f64,
    pub r_min: f64,
}

impl CoverPlan {
    /// Start radii of the passes, outermost first.
    pub fn pass_radii(&self) -> Vec<f64> {
        self.passes.iter().map(|p| p.outer_radius).collect()
    }
}

/// A synthesized map together with the plan it came from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Realization {
    pub map: MapDescriptor,
    pub plan: CoverPlan,
}

/// Plans rings for targets inside `1/C ≤ |z| ≤ C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Planner {
    pub bound: f64,
    pub policy: PlanPolicy,
}

impl Planner {
    pub fn new(bound: f64, policy: PlanPolicy) -> Result<Self> {
        if !(bound >= 1.0 && bound.is_finite()) {
            bail!(Domain, "ring constant must be at least 1, got {bound}");
        }
        Ok(Planner { bound, policy })
    }

    fn check_radius(&self, s: f64) -> Result<()> {
        let slack = 1e-12 * self.bound;
        if !(s >= 1.0 / self.bound - slack && s <= self.bound + slack) {
            bail!(Domain, "radius {s} lies outside [1/C, C] with C = {}", self.bound);
        }
        Ok(())
    }

    /// Spiral ring moving `γ_1` along `|w| = s` from angle `θ1` to `θ2`.
    ///
    /// The twist has the sign opposite to `θ2 − θ1`, and the ring ends at
    /// `r_in = r_out·exp((θ2 − θ1)/α) < r_out`.
    pub fn arc_piece(&self, s: f64, theta1: f64, theta2: f64, r_out: f64) -> Result<AnnulusPiece> {
        self.check_radius(s)?;
        if !(r_out > 0.0 && r_out.is_finite()) {
            bail!(Domain, "outer radius must be positive, got {r_out}");
        }
        let travel = theta2 - theta1;
        if travel == 0.0 || !travel.is_finite() {
            bail!(Domain, "arc piece needs nonzero angular travel");
        }
        let stretch = s * s;
        let twist = -travel.signum() * self.policy.twist_for(stretch)?;
        let inner_radius = r_out * (travel / twist).exp();
        if !(inner_radius > 0.0) {
            bail!(Domain, "arc piece underflows: r_in = r_out·exp({})", travel / twist);
        }
        let piece = AnnulusPiece {
            outer_radius: r_out,
            inner_radius,
            base_angle: theta1,
            piece: PieceKind::Spiral { stretch, twist },
        };
        piece.validate()?;
        Ok(piece)
    }

    /// Radial ring moving `γ_1` along the ray at `θ` from `s1` to `s2`.
    pub fn radial_piece(&self, s1: f64, s2: f64, theta: f64, r_out: f64) -> Result<AnnulusPiece> {
        self.check_radius(s1)?;
        self.check_radius(s2)?;
        if s1 == s2 {
            bail!(Domain, "radial piece needs s1 != s2");
        }
        self.radial_ring(s1, s2, theta, r_out)
    }

    // Also used with s1 = s2 for the constant rings of a singleton target.
    fn radial_ring(&self, s1: f64, s2: f64, theta: f64, r_out: f64) -> Result<AnnulusPiece> {
        if !(r_out > 0.0 && r_out.is_finite()) {
            bail!(Domain, "outer radius must be positive, got {r_out}");
        }
        let (outer_stretch, inner_stretch) = (s1 * s1, s2 * s2);
        let t = self.policy.ratio_for(outer_stretch, inner_stretch)?;
        let piece = AnnulusPiece {
            outer_radius: r_out,
            inner_radius: r_out * t,
            base_angle: theta,
            piece: PieceKind::Radial { outer_stretch, inner_stretch },
        };
        piece.validate()?;
        Ok(piece)
    }

    fn segment_piece(&self, seg: &PathSegment, r_out: f64) -> Result<AnnulusPiece> {
        match *seg {
            PathSegment::Arc { radius, start_angle, end_angle } => self.arc_piece(radius, start_angle, end_angle, r_out),
            PathSegment::Radial { angle, start_radius, end_radius } => {
                self.radial_piece(start_radius, end_radius, angle, r_out)
            }
        }
    }

    /// Plans passes `Γ_k` for `k = k_min, …, k_max`, rings starting at
    /// `r_start` and shrinking inwards.
    pub fn synthesize(&self, target: &TargetSet, k_min: usize, k_max: usize, r_start: f64) -> Result<Realization> {
        target.validate()?;
        if target.bound > self.bound * (1.0 + 1e-12) {
            bail!(Domain, "target needs C = {}, planner has C = {}", target.bound, self.bound);
        }
        if k_min == 0 || k_max < k_min {
            bail!(EmptyPlan, "need 1 <= k_min <= k_max, got k_min = {k_min}, k_max = {k_max}");
        }
        if !(r_start > 0.0 && r_start.is_finite()) {
            bail!(Domain, "start radius must be positive, got {r_start}");
        }
        let mut pieces: Vec<AnnulusPiece> = Vec::new();
        let mut passes = Vec::new();
        let mut breakpoints = Vec::new();
        let mut r = r_start;
        let mut cursor: Option<Polar> = None;
        for k in k_min..=k_max {
            let segments = cover_path(target, k, cursor)?;
            let outer_radius = r;
            if segments.is_empty() {
                let p = target.polyline[0];
                let (s, theta) = (p.norm(), cursor.map_or(p.arg(), |c| c.angle));
                let piece = self.radial_ring(s, s, theta, r)?;
                breakpoints.push(Breakpoint { radius: r, expected: Point::from_polar(s, theta) });
                r = piece.inner_radius;
                pieces.push(piece);
                cursor = Some(Polar { radius: s, angle: theta });
            }
            for seg in &segments {
                let piece = self.segment_piece(seg, r)?;
                breakpoints.push(Breakpoint { radius: r, expected: seg.start().to_point() });
                r = piece.inner_radius;
                pieces.push(piece);
                cursor = Some(seg.end());
            }
            passes.push(PlannedPass {
                k,
                cover_radius: 1.0 / k as f64,
                segments,
                outer_radius,
                inner_radius: r,
            });
        }
        let Some(end) = cursor else {
            bail!(EmptyPlan, "no rings were planned");
        };
        breakpoints.push(Breakpoint { radius: r, expected: end.to_point() });

        let first = pieces[0].outer_fill();
        let annulus = PiecewiseAnnulus { pieces, outer_fill: AffineFill { stretch: first.stretch, angle: first.angle } };
        annulus.validate()?;
        let distortion_bound = sharp_distortion(&annulus);
        let plan = CoverPlan {
            target_bound: self.bound,
            policy: self.policy,
            passes,
            breakpoints,
            distortion_bound,
            r_start,
            r_min: r,
        };
        Ok(Realization { map: annulus.into(), plan })
    }

    /// Like [`Planner::synthesize`], but places the plan so that its
    /// innermost ring ends at `2·depth`. A trace from `plan.r_start` down to
    /// `depth` then crosses every ring.
    pub fn synthesize_to_depth(&self, target: &TargetSet, k_min: usize, k_max: usize, depth: f64) -> Result<Realization> {
        if !(depth > 0.0 && depth.is_finite()) {
            bail!(Domain, "depth must be positive, got {depth}");
        }
        let unit = self.synthesize(target, k_min, k_max, 1.0)?;
        let scale = 2.0 * depth / unit.plan.r_min;
        if !(scale.is_finite() && (unit.plan.r_start * scale).is_finite()) {
            bail!(Domain, "plan spans too many scales to place above depth {depth}");
        }
        Ok(unit.rescaled(scale))
    }
}

impl Realization {
    /// The same plan with every radius multiplied by `scale`.
    pub fn rescaled(&self, scale: f64) -> Realization {
        let mut out = self.clone();
        if let MapDescriptor::PiecewiseAnnulus { pieces, .. } = &mut out.map {
            for p in pieces {
                p.outer_radius *= scale;
                p.inner_radius *= scale;
            }
        }
        let plan = &mut out.plan;
        for pass in &mut plan.passes {
            pass.outer_radius *= scale;
            pass.inner_radius *= scale;
        }
        for b in &mut plan.breakpoints {
            b.radius *= scale;
        }
        plan.r_start *= scale;
        plan.r_min *= scale;
        out
    }
}

/// Largest sharp distortion over the rings and fills of `annulus`.
pub fn sharp_distortion(annulus: &PiecewiseAnnulus) -> f64 {
    let fill = |k: f64| k.max(1.0 / k);
    annulus
        .pieces
        .iter()
        .map(|p| match p.piece {
            PieceKind::Spiral { stretch, twist } => spiral_max_distortion(stretch, twist),
            PieceKind::Radial { outer_stretch, inner_stretch } => {
                radial_max_distortion(outer_stretch, inner_stretch, radial_exponent(outer_stretch, inner_stretch, p.ratio()))
            }
        })
        .fold(fill(annulus.outer_fill.stretch).max(fill(annulus.inner_fill().stretch)), f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Map;
    use crate::rescale::{gamma, RhoMethod};
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn literal(cap: f64) -> Planner {
        let mut policy = PlanPolicy::half_bound();
        policy.twist.cap = cap;
        Planner::new(2.0, policy).unwrap()
    }

    #[test]
    fn arc_piece_example() {
        let p = literal(0.5).arc_piece(1.5, 0.0, FRAC_PI_2, 1.0).unwrap();
        assert_eq!(p.piece, PieceKind::Spiral { stretch: 2.25, twist: -0.5 });
        assert!((p.inner_radius - (-PI).exp()).abs() < 1e-15);
        assert!((p.inner_fill().angle - FRAC_PI_2).abs() < 1e-15);
        assert!(literal(0.5).arc_piece(1.5, 1.0, 1.0, 1.0).is_err());
        assert!(literal(0.5).arc_piece(3.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn arc_piece_endpoint_via_gamma() {
        let piece = literal(0.5).arc_piece(1.5, 0.0, FRAC_PI_2, 1.0).unwrap();
        let annulus = PiecewiseAnnulus { pieces: vec![piece], outer_fill: piece.outer_fill() };
        let map = Map::new(annulus.into()).unwrap();
        let g = gamma(&map, Point::new(1.0, 0.0), piece.inner_radius, &RhoMethod::Contour { samples: 4096 }).unwrap();
        assert!((g - Point::from_polar(1.5, FRAC_PI_2)).norm() < 1e-4);
    }

    #[test]
    fn unit_stretch_arc_is_log_spiral() {
        let p = literal(0.7).arc_piece(1.0, 0.0, -1.0, 1.0).unwrap();
        assert_eq!(p.piece, PieceKind::Spiral { stretch: 1.0, twist: 0.7 });
    }

    #[test]
    fn radial_piece_examples() {
        let planner = literal(1.0);
        let p = planner.radial_piece(1.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(p.piece, PieceKind::Radial { outer_stretch: 1.0, inner_stretch: 4.0 });
        assert!((p.ratio() - 0.125).abs() < 1e-15);
        let nu = radial_exponent(1.0, 4.0, p.ratio());
        assert!((nu + 2.0 / 3.0).abs() < 1e-15);
        let q = planner.radial_piece(2.0, 1.0, PI, 1.0).unwrap();
        assert!((q.ratio() - 0.125).abs() < 1e-15);
        assert!(planner.radial_piece(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn default_policy_meets_twice_stretch() {
        let planner = Planner::new(2.0, PlanPolicy::default()).unwrap();
        let p = planner.arc_piece(1.5, 0.0, 1.0, 1.0).unwrap();
        let PieceKind::Spiral { stretch, twist } = p.piece else { unreachable!() };
        assert!(spiral_max_distortion(stretch, twist) <= 2.0 * 2.25 * (1.0 + 1e-9));
        let q = planner.radial_piece(0.5, 2.0, 0.0, 1.0).unwrap();
        let nu = radial_exponent(0.25, 4.0, q.ratio());
        assert!(radial_max_distortion(0.25, 4.0, nu) <= 8.0 * (1.0 + 1e-9));
    }

    #[test]
    fn singleton_plan_is_constant() {
        let target = TargetSet::new(vec![Point::from_polar(1.5, 0.7)], 2.0).unwrap();
        let planner = Planner::new(2.0, PlanPolicy::default()).unwrap();
        let real = planner.synthesize(&target, 1, 3, 1.0).unwrap();
        assert_eq!(real.plan.passes.len(), 3);
        let map = Map::new(real.map.clone()).unwrap();
        for r in [2.0, 0.9, 0.3, 0.1, 1e-3] {
            let g = gamma(&map, Point::new(1.0, 0.0), r, &RhoMethod::Analytic).unwrap();
            assert!((g - Point::from_polar(1.5, 0.7)).norm() < 1e-12);
        }
    }

    #[test]
    fn plan_radii_decrease_and_chain() {
        let poly: Vec<Point> = (0..32).map(|j| Point::from_polar(1.5, PI * j as f64 / 31.0)).collect();
        let target = TargetSet::new(poly, 2.0).unwrap();
        let planner = Planner::new(2.0, PlanPolicy::default()).unwrap();
        let real = planner.synthesize(&target, 1, 3, 1.0).unwrap();
        let MapDescriptor::PiecewiseAnnulus { pieces, .. } = &real.map else { unreachable!() };
        assert_eq!(pieces.len(), 3);
        assert!(pieces.iter().all(|p| p.inner_radius < p.outer_radius));
        for w in real.plan.passes.windows(2) {
            assert_eq!(w[0].inner_radius, w[1].outer_radius);
            assert_eq!(w[0].segments.last().unwrap().end(), w[1].segments[0].start());
        }
        assert!(real.plan.distortion_bound <= 16.0);
    }

    #[test]
    fn rescaling_keeps_breakpoints() {
        let poly = vec![Point::new(1.5, 0.0), Point::new(0.0, 1.5), Point::new(0.0, 0.8)];
        let target = TargetSet::new(poly, 2.0).unwrap();
        let planner = Planner::new(2.0, PlanPolicy::default()).unwrap();
        let real = planner.synthesize_to_depth(&target, 1, 2, 1e-6).unwrap();
        assert!((real.plan.r_min - 2e-6).abs() < 1e-18);
        let map = Map::new(real.map.clone()).unwrap();
        for b in &real.plan.breakpoints {
            let g = gamma(&map, Point::new(1.0, 0.0), b.radius, &RhoMethod::Analytic).unwrap();
            assert!((g - b.expected).norm() <= 1e-6, "{g} vs {}", b.expected);
        }
    }

    #[test]
    fn bad_ranges_are_rejected() {
        let target = TargetSet::new(vec![Point::new(1.0, 0.0)], 2.0).unwrap();
        let planner = Planner::new(2.0, PlanPolicy::default()).unwrap();
        assert!(matches!(planner.synthesize(&target, 2, 1, 1.0), Err(crate::Error::EmptyPlan(_))));
        assert!(matches!(planner.synthesize(&target, 0, 1, 1.0), Err(crate::Error::EmptyPlan(_))));
    }
}
