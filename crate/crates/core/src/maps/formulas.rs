//! Closed-form map formulas, without parameter checks.
//!
//! [`Map`](super::Map) validates parameters and dispatches here. The raw
//! formulas stay public so that experiments can probe inadmissible
//! parameters (for instance spirals that fail to be injective).

use core::f64::consts::PI;

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::Point;

/// `e^{iθ}·(((K+1)/2)·z + ((K−1)/2)·z̄)`: stretch by `K` along the real axis,
/// then rotate by `θ`.
pub fn affine_stretch(stretch: f64, angle: f64, z: Point) -> Point {
    let stretched = Point::new(stretch * z.re, z.im);
    if angle == 0.0 {
        stretched
    } else {
        Point::from_polar(1.0, angle) * stretched
    }
}

/// `|z|^{iα} = exp(iα·ln|z|)`, taken to be `0` at the origin.
pub fn radial_phase(twist: f64, z: Point) -> Point {
    let r = z.norm();
    if r == 0.0 {
        Point::new(0.0, 0.0)
    } else {
        Point::from_polar(1.0, twist * r.ln())
    }
}

/// Distorted logarithmic spiral `h_{K,0}(z)·|z|^{iα}`.
pub fn spiral(stretch: f64, twist: f64, z: Point) -> Point {
    affine_stretch(stretch, 0.0, z) * radial_phase(twist, z)
}

/// Logarithmic spiral `z·|z|^{iα}`.
pub fn log_spiral(twist: f64, z: Point) -> Point {
    z * radial_phase(twist, z)
}

/// Exponent `ν = ln(L/K) / ln t` of the radial stretch.
pub fn radial_exponent(outer_stretch: f64, inner_stretch: f64, inner_radius: f64) -> f64 {
    (inner_stretch / outer_stretch).ln() / inner_radius.ln()
}

/// Radial stretch `K·|z|^ν·x + iy` on `t ≤ |z| ≤ 1`, extended by `h_{K,0}`
/// outside the unit circle and by `h_{L,0}` inside `|z| = t`.
pub fn radial_stretch(outer_stretch: f64, inner_stretch: f64, inner_radius: f64, z: Point) -> Point {
    let r = z.norm();
    let factor = if r >= 1.0 {
        outer_stretch
    } else if r <= inner_radius {
        inner_stretch
    } else {
        let nu = radial_exponent(outer_stretch, inner_stretch, inner_radius);
        outer_stretch * r.powf(nu)
    };
    Point::new(factor * z.re, z.im)
}

/// Dehn twist of the ring `1 ≤ |z| ≤ 2`: rotation by `±2π(|z| − 1)`,
/// identity elsewhere.
pub fn dehn_twist(direction: i8, z: Point) -> Point {
    let r = z.norm();
    if (1.0..=2.0).contains(&r) {
        z * Point::from_polar(1.0, f64::from(direction) * 2.0 * PI * (r - 1.0))
    } else {
        z
    }
}

/// Rotation of the circle through `z` that fixes the positive real axis and
/// sends the negative real axis to angle `target`.
///
/// The argument `φ ∈ (−π, π]` is moved to `φ + (target − π)·sin²(φ/2)`, which
/// is smooth and strictly increasing when `|target − π| < 2`.
pub fn circle_twist(target: f64, z: Point) -> Point {
    let r = z.norm();
    if r == 0.0 {
        return z;
    }
    let phi = z.arg();
    let s = (0.5 * phi).sin();
    Point::from_polar(r, phi + (target - PI) * s * s)
}
