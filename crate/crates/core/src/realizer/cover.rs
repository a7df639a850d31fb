//! Staircase paths of arcs and radial segments that follow a target.

use alloc::vec::Vec;

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::target::{PathSegment, Polar, TargetSet};
use crate::error::{bail, Result};
use crate::geometry::{wrap_angle, Point};

/// Polar staircase through the target polyline for covering level `k`.
///
/// The path stays within `1/(2k)` of the polyline and passes through every
/// vertex. Edges that already are arcs (equal radii, small sagitta) or
/// radial segments (equal angles) are kept as they are; other edges are
/// resampled and replaced by alternating arcs and radial steps.
///
/// `start` is the end of the previous path. An open polyline is walked
/// backwards when `start` is nearer its last vertex, so consecutive passes
/// sweep back and forth; a closed polyline is always walked forwards and the
/// angle keeps accumulating. A singleton target gives an empty path.
pub fn cover_path(target: &TargetSet, k: usize, start: Option<Polar>) -> Result<Vec<PathSegment>> {
    target.validate()?;
    if k == 0 {
        bail!(Domain, "covering level k must be at least 1");
    }
    if target.is_singleton() {
        return Ok(Vec::new());
    }
    let mut vertices = target.polyline.clone();
    if let Some(s) = start {
        let p = s.to_point();
        let (first, last) = (vertices[0], vertices[vertices.len() - 1]);
        if !target.is_closed() && (p - last).norm() < (p - first).norm() {
            vertices.reverse();
        }
    }
    let spacing = 1.0 / (8.0 * k as f64 * target.bound.max(1.0));

    let mut cursor = match start {
        Some(s) => s,
        None => Polar { radius: vertices[0].norm(), angle: vertices[0].arg() },
    };
    let mut segments = Vec::new();
    for &v in &vertices {
        step_to(&mut segments, &mut cursor, v, spacing);
    }
    Ok(merge(segments))
}

fn unwrapped(from: f64, p: Point) -> f64 {
    from + wrap_angle(p.arg() - from)
}

fn step_to(out: &mut Vec<PathSegment>, cursor: &mut Polar, v: Point, spacing: f64) {
    let a = cursor.to_point();
    if (v - a).norm() <= 1e-15 * v.norm() {
        return;
    }
    let r = v.norm();
    let angle = unwrapped(cursor.angle, v);
    let dtheta = angle - cursor.angle;
    if (r - cursor.radius).abs() <= 1e-9 * r {
        let sagitta = cursor.radius * (1.0 - (0.5 * dtheta).cos());
        if dtheta.abs() < core::f64::consts::PI && sagitta <= 0.5 * spacing {
            out.push(PathSegment::Arc { radius: cursor.radius, start_angle: cursor.angle, end_angle: angle });
            cursor.angle = angle;
            return;
        }
    } else if dtheta.abs() <= 1e-12 {
        out.push(PathSegment::Radial { angle: cursor.angle, start_radius: cursor.radius, end_radius: r });
        cursor.radius = r;
        return;
    }
    let n = ((v - a).norm() / spacing).ceil().max(1.0) as usize;
    for j in 1..=n {
        let q = a + (v - a) * (j as f64 / n as f64);
        let qa = unwrapped(cursor.angle, q);
        let qr = if j == n { r } else { q.norm() };
        out.push(PathSegment::Arc { radius: cursor.radius, start_angle: cursor.angle, end_angle: qa });
        out.push(PathSegment::Radial { angle: qa, start_radius: cursor.radius, end_radius: qr });
        *cursor = Polar { radius: qr, angle: qa };
    }
}

/// Drops zero-length segments and joins neighbours that continue each
/// other in the same direction.
fn merge(segments: Vec<PathSegment>) -> Vec<PathSegment> {
    let mut out: Vec<PathSegment> = Vec::with_capacity(segments.len());
    for seg in segments {
        if seg.length() == 0.0 {
            continue;
        }
        let joined = match (out.last_mut(), seg) {
            (
                Some(PathSegment::Arc { radius, start_angle, end_angle }),
                PathSegment::Arc { radius: r2, start_angle: s2, end_angle: e2 },
            ) if *radius == r2 && *end_angle == s2 && (*end_angle - *start_angle).signum() == (e2 - s2).signum() => {
                *end_angle = e2;
                true
            }
            (
                Some(PathSegment::Radial { angle, start_radius, end_radius }),
                PathSegment::Radial { angle: a2, start_radius: s2, end_radius: e2 },
            ) if *angle == a2 && *end_radius == s2 && (*end_radius - *start_radius).signum() == (e2 - s2).signum() => {
                *end_radius = e2;
                true
            }
            _ => false,
        };
        if !joined {
            out.push(seg);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hausdorff;
    use crate::realizer::target::sample_path;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, PI};
    use proptest::prelude::*;

    fn arc(radius: f64, a: f64, b: f64, n: usize) -> Vec<Point> {
        (0..n).map(|j| Point::from_polar(radius, a + (b - a) * j as f64 / (n - 1) as f64)).collect()
    }

    fn cover_distance(target: &TargetSet, path: &[PathSegment]) -> f64 {
        hausdorff(&sample_path(path, 1e-3), &target.samples(1e-3)).unwrap()
    }

    #[test]
    fn singleton_gives_empty_path() {
        let t = TargetSet::new(vec![Point::new(1.5, 0.0)], 2.0).unwrap();
        assert!(cover_path(&t, 3, None).unwrap().is_empty());
    }

    #[test]
    fn sampled_arc_becomes_one_arc() {
        let t = TargetSet::new(arc(1.5, 0.0, PI, 64), 2.0).unwrap();
        let path = cover_path(&t, 4, None).unwrap();
        assert_eq!(path.len(), 1);
        let PathSegment::Arc { radius, start_angle, end_angle } = path[0] else {
            panic!("expected an arc, got {path:?}");
        };
        assert_eq!(radius, 1.5);
        assert!(start_angle.abs() < 1e-15 && (end_angle - PI).abs() < 1e-12);
        assert!(cover_distance(&t, &path) <= 1.0 / 8.0);
    }

    #[test]
    fn radial_target_becomes_one_radial_segment() {
        let t = TargetSet::new(vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0)], 2.0).unwrap();
        let path = cover_path(&t, 2, None).unwrap();
        assert_eq!(path, [PathSegment::Radial { angle: 0.0, start_radius: 1.0, end_radius: 2.0 }]);
    }

    #[test]
    fn open_paths_sweep_back_and_forth() {
        let t = TargetSet::new(arc(1.5, 0.0, PI, 64), 2.0).unwrap();
        let first = cover_path(&t, 1, None).unwrap();
        let end = first.last().unwrap().end();
        let second = cover_path(&t, 2, Some(end)).unwrap();
        assert_eq!(second[0].start(), end);
        assert!(second.last().unwrap().end().angle.abs() < 1e-12);
    }

    #[test]
    fn closed_paths_keep_turning() {
        let mut poly = arc(1.5, 0.0, 2.0 * PI, 65);
        poly[64] = poly[0];
        let t = TargetSet::new(poly, 2.0).unwrap();
        let first = cover_path(&t, 1, None).unwrap();
        let end = first.last().unwrap().end();
        assert!((end.angle - 2.0 * PI).abs() < 1e-12);
        let second = cover_path(&t, 2, Some(end)).unwrap();
        assert!((second.last().unwrap().end().angle - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn l_shape_alternates() {
        let mut poly = arc(1.5, 0.0, FRAC_PI_2, 32);
        poly.extend((1..=16).map(|j| Point::from_polar(1.5 - 0.7 * j as f64 / 16.0, FRAC_PI_2)));
        let t = TargetSet::new(poly, 2.0).unwrap();
        let path = cover_path(&t, 1, None).unwrap();
        assert_eq!(path.len(), 2);
        assert!(matches!(path[0], PathSegment::Arc { .. }));
        assert!(matches!(path[1], PathSegment::Radial { .. }));
    }

    #[test]
    fn oblique_segment_is_staircased() {
        let t = TargetSet::new(vec![Point::new(1.0, 0.0), Point::new(0.0, 1.5)], 2.0).unwrap();
        for k in [1, 3, 10] {
            let path = cover_path(&t, k, None).unwrap();
            assert!(path.len() > 2);
            for w in path.windows(2) {
                assert!((w[0].end().to_point() - w[1].start().to_point()).norm() < 1e-12);
            }
            assert!(cover_distance(&t, &path) <= 0.5 / k as f64);
        }
    }

    #[test]
    fn target_validation() {
        assert!(TargetSet::new(vec![], 2.0).is_err());
        assert!(TargetSet::new(vec![Point::new(0.0, 0.0)], 2.0).is_err());
        assert!(TargetSet::new(vec![Point::new(3.0, 0.0)], 2.0).is_err());
        assert!(TargetSet::new(vec![Point::new(0.4, 0.0)], 2.0).is_err());
        assert!(TargetSet::new(vec![Point::new(1.0, 0.0)], 0.5).is_err());
        assert_eq!(TargetSet::fitted(vec![Point::new(0.25, 0.0)]).unwrap().bound, 4.0);
    }

    proptest! {
        #[test]
        fn cover_is_two_sided_close(
            pts in proptest::collection::vec((0.5..2.0f64, -3.1..3.1f64), 2..6),
            k in 1usize..6,
        ) {
            let poly: Vec<Point> = pts.iter().map(|&(r, a)| Point::from_polar(r, a)).collect();
            // Skip chords passing close to the origin.
            let near_origin = poly.windows(2).any(|w| {
                let (a, b) = (w[0], w[1]);
                let d = b - a;
                let s = (-(a.re * d.re + a.im * d.im) / d.norm_sqr()).clamp(0.0, 1.0);
                (a + d * s).norm() < 0.5
            });
            prop_assume!(!near_origin);
            let t = TargetSet::new(poly, 2.0).unwrap();
            let path = cover_path(&t, k, None).unwrap();
            prop_assert!(cover_distance(&t, &path) <= 0.5 / k as f64);
        }
    }
}
