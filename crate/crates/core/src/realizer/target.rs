//! Target sets and the polar path segments that cover them.

use alloc::vec::Vec;

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};
use crate::geometry::Point;

/// A compact connected set, sampled as a polyline, inside the ring
/// `1/C ≤ |z| ≤ C`.
///
/// A polyline whose last vertex repeats the first is closed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TargetSet {
    pub polyline: Vec<Point>,
    /// The ring constant `C ≥ 1`.
    pub bound: f64,
}

impl TargetSet {
    pub fn new(polyline: Vec<Point>, bound: f64) -> Result<Self> {
        let target = TargetSet { polyline, bound };
        target.validate()?;
        Ok(target)
    }

    /// Smallest `C` for which the polyline fits in the ring.
    pub fn fitted(polyline: Vec<Point>) -> Result<Self> {
        let bound = polyline
            .iter()
            .map(|p| p.norm().max(1.0 / p.norm()))
            .fold(1.0, f64::max);
        TargetSet::new(polyline, bound)
    }

    pub fn validate(&self) -> Result<()> {
        if self.polyline.is_empty() {
            bail!(Domain, "target polyline is empty");
        }
        if !(self.bound >= 1.0 && self.bound.is_finite()) {
            bail!(Domain, "ring constant must be at least 1, got {}", self.bound);
        }
        // Small slack so that C computed from the vertices themselves passes.
        let slack = 1e-12 * self.bound;
        for (i, p) in self.polyline.iter().enumerate() {
            let m = p.norm();
            if !(m.is_finite() && m > 0.0) {
                bail!(Domain, "target vertex {i} is at the origin or not finite");
            }
            if m > self.bound + slack || m < 1.0 / self.bound - slack {
                bail!(Domain, "target vertex {i} at |z| = {m} lies outside [1/C, C] with C = {}", self.bound);
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        let n = self.polyline.len();
        n > 2 && (self.polyline[0] - self.polyline[n - 1]).norm() <= 1e-12 * self.bound
    }

    /// True when every vertex coincides with the first.
    pub fn is_singleton(&self) -> bool {
        let first = self.polyline[0];
        self.polyline.iter().all(|p| (p - first).norm() <= 1e-12 * self.bound)
    }

    /// Polyline resampled at `spacing`, for Hausdorff comparisons.
    pub fn samples(&self, spacing: f64) -> Vec<Point> {
        crate::geometry::densify(&self.polyline, spacing)
    }
}

/// A point in polar form with an unwrapped angle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polar {
    pub radius: f64,
    pub angle: f64,
}

impl Polar {
    pub fn to_point(self) -> Point {
        Point::from_polar(self.radius, self.angle)
    }
}

/// A circular arc or radial segment. Angles are unwrapped, so an arc can
/// make several turns.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PathSegment {
    Arc { radius: f64, start_angle: f64, end_angle: f64 },
    Radial { angle: f64, start_radius: f64, end_radius: f64 },
}

impl PathSegment {
    pub fn start(&self) -> Polar {
        match *self {
            PathSegment::Arc { radius, start_angle, .. } => Polar { radius, angle: start_angle },
            PathSegment::Radial { angle, start_radius, .. } => Polar { radius: start_radius, angle },
        }
    }

    pub fn end(&self) -> Polar {
        match *self {
            PathSegment::Arc { radius, end_angle, .. } => Polar { radius, angle: end_angle },
            PathSegment::Radial { angle, end_radius, .. } => Polar { radius: end_radius, angle },
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathSegment::Arc { radius, start_angle, end_angle } => radius * (end_angle - start_angle).abs(),
            PathSegment::Radial { start_radius, end_radius, .. } => (end_radius - start_radius).abs(),
        }
    }

    /// Points along the segment, at most `spacing` apart, endpoints included.
    pub fn sample(&self, spacing: f64) -> Vec<Point> {
        let n = ((self.length() / spacing).ceil() as usize).max(1);
        (0..=n)
            .map(|j| {
                let s = j as f64 / n as f64;
                match *self {
                    PathSegment::Arc { radius, start_angle, end_angle } => {
                        Point::from_polar(radius, start_angle + s * (end_angle - start_angle))
                    }
                    PathSegment::Radial { angle, start_radius, end_radius } => {
                        Point::from_polar(start_radius + s * (end_radius - start_radius), angle)
                    }
                }
            })
            .collect()
    }
}

/// Samples of a whole path.
pub fn sample_path(segments: &[PathSegment], spacing: f64) -> Vec<Point> {
    segments.iter().flat_map(|s| s.sample(spacing)).collect()
}
