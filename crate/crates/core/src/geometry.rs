//! Planar point-set utilities: polygon area, crossing tests, Hausdorff distance.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;
// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};

/// A point of the plane, also used as a complex number.
pub type Point = Complex64;

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut a = angle % two_pi;
    if a <= -PI {
        a += two_pi;
    } else if a > PI {
        a -= two_pi;
    }
    a
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Area enclosed by a closed polygon (absolute value of the shoelace sum).
///
/// The closing edge from the last vertex back to the first is implied.
pub fn enclosed_area(polygon: &[Point]) -> Result<f64> {
    if polygon.len() < 3 {
        bail!(Domain, "polygon needs at least 3 vertices, got {}", polygon.len());
    }
    // Shift to the first vertex to limit cancellation for far-off polygons.
    let origin = polygon[0];
    let mut twice = 0.0;
    for (a, b) in polygon.iter().zip(polygon.iter().cycle().skip(1)) {
        let (a, b) = (a - origin, b - origin);
        twice += a.re * b.im - b.re * a.im;
    }
    Ok(0.5 * twice.abs())
}

/// Perimeter of a closed polygon.
pub fn perimeter(polygon: &[Point]) -> f64 {
    if polygon.len() < 2 {
        return 0.0;
    }
    polygon
        .iter()
        .zip(polygon.iter().cycle().skip(1))
        .map(|(a, b)| (b - a).norm())
        .sum()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

/// True when the open segments `ab` and `cd` cross at a single interior point.
pub fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

struct Edge {
    a: Point,
    b: Point,
    lo: (f64, f64),
    hi: (f64, f64),
}

fn closed_edges(poly: &[Point]) -> Vec<Edge> {
    if poly.len() < 2 {
        return Vec::new();
    }
    poly.iter()
        .zip(poly.iter().cycle().skip(1))
        .map(|(&a, &b)| Edge {
            a,
            b,
            lo: (a.re.min(b.re), a.im.min(b.im)),
            hi: (a.re.max(b.re), a.im.max(b.im)),
        })
        .collect()
}

/// True iff some edge of `poly1` properly intersects some edge of `poly2`.
///
/// Both polygons are treated as closed. Touching without crossing does not
/// count.
pub fn curves_cross(poly1: &[Point], poly2: &[Point]) -> bool {
    let e1 = closed_edges(poly1);
    let mut e2 = closed_edges(poly2);
    e2.sort_by(|p, q| p.lo.0.partial_cmp(&q.lo.0).unwrap_or(Ordering::Equal));
    for p in &e1 {
        for q in &e2 {
            if q.lo.0 > p.hi.0 {
                break;
            }
            if q.hi.0 < p.lo.0 || q.hi.1 < p.lo.1 || q.lo.1 > p.hi.1 {
                continue;
            }
            if segments_cross(p.a, p.b, q.a, q.b) {
                return true;
            }
        }
    }
    false
}

fn sorted_by_re(points: &[Point]) -> Vec<Point> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal));
    sorted
}

fn nearest_sq(sorted: &[Point], p: Point) -> f64 {
    let start = sorted.partition_point(|q| q.re < p.re);
    let mut best = f64::INFINITY;
    for q in &sorted[start..] {
        let dx = q.re - p.re;
        if dx * dx >= best {
            break;
        }
        best = best.min((q - p).norm_sqr());
    }
    for q in sorted[..start].iter().rev() {
        let dx = p.re - q.re;
        if dx * dx >= best {
            break;
        }
        best = best.min((q - p).norm_sqr());
    }
    best
}

/// Largest distance from a point of `from` to the nearest point of `to`.
pub fn directed_hausdorff(from: &[Point], to: &[Point]) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        bail!(Domain, "Hausdorff distance of an empty point cloud");
    }
    let sorted = sorted_by_re(to);
    let worst = from
        .iter()
        .map(|&p| nearest_sq(&sorted, p))
        .fold(0.0, f64::max);
    Ok(worst.sqrt())
}

/// Symmetric Hausdorff distance between two finite point clouds.
pub fn hausdorff(a: &[Point], b: &[Point]) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// Resamples an open polyline so that consecutive points are at most
/// `spacing` apart. The original vertices are kept.
pub fn densify(polyline: &[Point], spacing: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(polyline.len());
    let Some(&first) = polyline.first() else {
        return out;
    };
    out.push(first);
    for w in polyline.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = ((b - a).norm() / spacing).ceil().max(1.0) as usize;
        for j in 1..=n {
            out.push(a + (b - a) * (j as f64 / n as f64));
        }
    }
    out
}

/// `n` equally spaced samples of the circle `|z − center| = radius`.
pub fn circle_points(center: Point, radius: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|j| center + Point::from_polar(radius, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(re: f64, im: f64) -> Point {
        Point::new(re, im)
    }

    #[test]
    fn unit_circle_area() {
        let poly = circle_points(p(0.0, 0.0), 1.0, 4096);
        let area = enclosed_area(&poly).unwrap();
        assert!((area - PI).abs() < 1e-5, "{area}");
    }

    #[test]
    fn area_rejects_two_points() {
        assert!(enclosed_area(&[p(0.0, 0.0), p(1.0, 0.0)]).is_err());
    }

    #[test]
    fn orientation_does_not_matter() {
        let mut sq = alloc::vec![p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)];
        assert_eq!(enclosed_area(&sq).unwrap(), 4.0);
        sq.reverse();
        assert_eq!(enclosed_area(&sq).unwrap(), 4.0);
    }

    #[test]
    fn hausdorff_basics() {
        let a = [p(0.0, 0.0)];
        let b = [p(3.0, 4.0)];
        assert_eq!(hausdorff(&a, &b).unwrap(), 5.0);
        let c = circle_points(p(1.0, -2.0), 0.7, 50);
        assert_eq!(hausdorff(&c, &c).unwrap(), 0.0);
        assert!(hausdorff(&[], &c).is_err());
    }

    #[test]
    fn circle_samples_within_half_chord() {
        // Sparse samples against a dense reference: the distance is bounded
        // by the chord from an arc midpoint to its nearest sparse sample.
        let n = 200;
        let sparse = circle_points(p(0.0, 0.0), 2.0, n);
        let dense = circle_points(p(0.0, 0.0), 2.0, 200 * 64);
        let half_gap = 2.0 * 2.0 * (PI / (2.0 * n as f64)).sin();
        let d = hausdorff(&sparse, &dense).unwrap();
        assert!(d <= half_gap + 1e-12, "{d} vs {half_gap}");
        assert!(d > 0.9 * half_gap);
    }

    #[test]
    fn concentric_circles_do_not_cross() {
        let a = circle_points(p(0.0, 0.0), 1.0, 256);
        let b = circle_points(p(0.0, 0.0), 1.05, 256);
        assert!(!curves_cross(&a, &b));
    }

    #[test]
    fn shifted_circles_cross() {
        let a = circle_points(p(0.0, 0.0), 1.0, 256);
        let b = circle_points(p(1.0, 0.0), 1.0, 256);
        assert!(curves_cross(&a, &b));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5 + 8.0 * PI) - 0.5).abs() < 1e-12);
    }

    fn brute_directed(a: &[Point], b: &[Point]) -> f64 {
        a.iter()
            .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn hausdorff_matches_brute_force(
            a in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..40),
            b in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..40),
        ) {
            let a: Vec<Point> = a.into_iter().map(|(x, y)| p(x, y)).collect();
            let b: Vec<Point> = b.into_iter().map(|(x, y)| p(x, y)).collect();
            let fast = hausdorff(&a, &b).unwrap();
            let slow = brute_directed(&a, &b).max(brute_directed(&b, &a));
            prop_assert!((fast - slow).abs() < 1e-12);
            prop_assert_eq!(fast, hausdorff(&b, &a).unwrap());
        }

        #[test]
        fn area_invariant_under_translation(dx in -50.0..50.0f64, dy in -50.0..50.0f64, r in 0.1..5.0f64) {
            let c = circle_points(p(0.0, 0.0), r, 512);
            let shifted: Vec<Point> = c.iter().map(|z| z + p(dx, dy)).collect();
            let a0 = enclosed_area(&c).unwrap();
            let a1 = enclosed_area(&shifted).unwrap();
            prop_assert!((a0 - a1).abs() <= 1e-9 * a0);
        }
    }
}
