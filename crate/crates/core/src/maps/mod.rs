//! Map descriptors and their evaluation.
//!
//! A [`MapDescriptor`] is plain data (it serializes to a JSON object tagged
//! by `"kind"`). Wrapping it in a [`Map`] checks every invariant once, after
//! which evaluation cannot fail.

pub mod annulus;
pub mod formulas;
pub mod twist;

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Euclid;

pub use annulus::{AffineFill, AnnulusPiece, PieceKind, PiecewiseAnnulus, Ring};
pub use twist::{AngleProfile, DehnSchedule, PowerBands, TwistLevel};

use crate::error::{bail, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum MapDescriptor {
    /// `z ↦ w·z`.
    Linear { multiplier: Point },
    /// `z ↦ z^d`.
    Power { degree: u32 },
    /// `h_{K,θ}`.
    AffineStretch { stretch: f64, angle: f64 },
    /// `h_{K,0}(z)·|z|^{iα}`, admissible for `|α| < |2K/(1 − K²)|`.
    Spiral { stretch: f64, twist: f64 },
    /// `z·|z|^{iα}`.
    LogSpiral { twist: f64 },
    /// `K·|z|^ν·x + iy` on `t ≤ |z| ≤ 1` with `ν = ln(L/K)/ln t`.
    RadialStretch { outer_stretch: f64, inner_stretch: f64, inner_radius: f64 },
    /// Dehn twist `f^±` of the ring `1 ≤ |z| ≤ 2`, identity elsewhere.
    DehnTwist { direction: i8 },
    /// Maps every circle `|z| = r` onto itself, fixes the positive real
    /// axis and sends `−r` to `r·e^{iθ(r)}`.
    OscillatingTwist { profile: AngleProfile },
    /// Rings of rescaled spirals and radial stretches.
    PiecewiseAnnulus {
        pieces: Vec<AnnulusPiece>,
        outer_fill: AffineFill,
    },
    /// Nested Dehn twists with opposite orientations.
    TwistSchedule { schedule: DehnSchedule },
    /// Radial map growing like alternating powers of `r`.
    RadialPower { bands: PowerBands },
}

impl MapDescriptor {
    pub fn identity() -> Self {
        MapDescriptor::Linear { multiplier: Point::new(1.0, 0.0) }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MapDescriptor::Linear { .. } => "linear",
            MapDescriptor::Power { .. } => "power",
            MapDescriptor::AffineStretch { .. } => "affine_stretch",
            MapDescriptor::Spiral { .. } => "spiral",
            MapDescriptor::LogSpiral { .. } => "log_spiral",
            MapDescriptor::RadialStretch { .. } => "radial_stretch",
            MapDescriptor::DehnTwist { .. } => "dehn_twist",
            MapDescriptor::OscillatingTwist { .. } => "oscillating_twist",
            MapDescriptor::PiecewiseAnnulus { .. } => "piecewise_annulus",
            MapDescriptor::TwistSchedule { .. } => "twist_schedule",
            MapDescriptor::RadialPower { .. } => "radial_power",
        }
    }

    pub fn validate(&self) -> Result<()> {
        use annulus::{check_radial, check_spiral, check_stretch};
        match self {
            MapDescriptor::Linear { multiplier } => {
                if !(multiplier.re.is_finite() && multiplier.im.is_finite()) || multiplier.norm() == 0.0 {
                    bail!(Descriptor, "linear multiplier must be finite and nonzero");
                }
            }
            MapDescriptor::Power { degree } => {
                if *degree == 0 {
                    bail!(Descriptor, "power degree must be a positive integer");
                }
            }
            MapDescriptor::AffineStretch { stretch, angle } => {
                check_stretch("stretch", *stretch)?;
                if !(0.0..TAU).contains(angle) {
                    bail!(Descriptor, "affine stretch angle must lie in [0, 2π), got {angle}");
                }
            }
            MapDescriptor::Spiral { stretch, twist } => check_spiral(*stretch, *twist)?,
            MapDescriptor::LogSpiral { twist } => {
                if !twist.is_finite() {
                    bail!(Descriptor, "twist must be finite");
                }
            }
            MapDescriptor::RadialStretch { outer_stretch, inner_stretch, inner_radius } => {
                check_radial(*outer_stretch, *inner_stretch, *inner_radius)?
            }
            MapDescriptor::DehnTwist { direction } => {
                if direction.abs() != 1 {
                    bail!(Descriptor, "Dehn twist direction must be +1 or -1");
                }
            }
            MapDescriptor::OscillatingTwist { profile } => profile.validate()?,
            MapDescriptor::PiecewiseAnnulus { pieces, outer_fill } => {
                // Cloning keeps validation in one place; descriptors are small.
                PiecewiseAnnulus { pieces: pieces.clone(), outer_fill: *outer_fill }.validate()?
            }
            MapDescriptor::TwistSchedule { schedule } => schedule.validate()?,
            MapDescriptor::RadialPower { bands } => bands.validate()?,
        }
        Ok(())
    }
}

impl From<PiecewiseAnnulus> for MapDescriptor {
    fn from(p: PiecewiseAnnulus) -> Self {
        MapDescriptor::PiecewiseAnnulus { pieces: p.pieces, outer_fill: p.outer_fill }
    }
}

/// A validated map.
#[derive(Debug, Clone, PartialEq)]
pub struct Map {
    descriptor: MapDescriptor,
    annulus: Option<PiecewiseAnnulus>,
}

impl TryFrom<MapDescriptor> for Map {
    type Error = crate::Error;

    fn try_from(descriptor: MapDescriptor) -> Result<Self> {
        Map::new(descriptor)
    }
}

impl Map {
    pub fn new(descriptor: MapDescriptor) -> Result<Self> {
        descriptor.validate()?;
        let annulus = match &descriptor {
            MapDescriptor::PiecewiseAnnulus { pieces, outer_fill } => Some(PiecewiseAnnulus {
                pieces: pieces.clone(),
                outer_fill: *outer_fill,
            }),
            _ => None,
        };
        Ok(Map { descriptor, annulus })
    }

    pub fn identity() -> Self {
        Map { descriptor: MapDescriptor::identity(), annulus: None }
    }

    pub fn descriptor(&self) -> &MapDescriptor {
        &self.descriptor
    }

    pub fn annulus(&self) -> Option<&PiecewiseAnnulus> {
        self.annulus.as_ref()
    }

    pub fn eval(&self, z: Point) -> Point {
        use MapDescriptor as D;
        match &self.descriptor {
            D::Linear { multiplier } => multiplier * z,
            D::Power { degree } => z.powu(*degree),
            D::AffineStretch { stretch, angle } => formulas::affine_stretch(*stretch, *angle, z),
            D::Spiral { stretch, twist } => formulas::spiral(*stretch, *twist, z),
            D::LogSpiral { twist } => formulas::log_spiral(*twist, z),
            D::RadialStretch { outer_stretch, inner_stretch, inner_radius } => {
                formulas::radial_stretch(*outer_stretch, *inner_stretch, *inner_radius, z)
            }
            D::DehnTwist { direction } => formulas::dehn_twist(*direction, z),
            D::OscillatingTwist { profile } => formulas::circle_twist(profile.angle(z.norm()), z),
            D::PiecewiseAnnulus { .. } => self.annulus.as_ref().map_or(z, |a| a.eval(z)),
            D::TwistSchedule { schedule } => schedule.eval(z),
            D::RadialPower { bands } => bands.eval(z),
        }
    }

    /// Label of the smooth region containing `z`. Finite-difference
    /// stencils whose points carry different labels straddle a seam.
    pub fn region(&self, z: Point) -> u32 {
        use MapDescriptor as D;
        let r = z.norm();
        match &self.descriptor {
            D::RadialStretch { inner_radius, .. } => {
                if r > 1.0 {
                    0
                } else if r >= *inner_radius {
                    1
                } else {
                    2
                }
            }
            D::DehnTwist { .. } => u32::from((1.0..=2.0).contains(&r)),
            D::OscillatingTwist { profile } => profile.region(r),
            D::PiecewiseAnnulus { .. } => match self.annulus.as_ref().map(|a| a.ring_of(z)) {
                Some(Ring::Piece(i)) => i as u32 + 1,
                Some(Ring::Inside) => u32::MAX,
                _ => 0,
            },
            D::TwistSchedule { schedule } => schedule.region(z),
            D::RadialPower { bands } => bands.region(r),
            _ => 0,
        }
    }

    /// True for families known to be non-injective near the origin.
    pub fn is_injective(&self) -> bool {
        !matches!(self.descriptor, MapDescriptor::Power { degree } if degree > 1)
    }
}

/// Validates `map` and evaluates it at `z`.
pub fn eval(map: &MapDescriptor, z: Point) -> Result<Point> {
    Ok(Map::new(map.clone())?.eval(z))
}

/// Images of `n` equally spaced points of the circle `|z − center| = r`,
/// in parameter order.
pub fn circle_image_at(map: &Map, center: Point, r: f64, n: usize) -> Result<Vec<Point>> {
    if n < 16 {
        bail!(Domain, "circle image needs at least 16 samples, got {n}");
    }
    if !(r > 0.0 && r.is_finite()) {
        bail!(Domain, "circle radius must be positive, got {r}");
    }
    Ok((0..n)
        .map(|j| map.eval(center + Point::from_polar(r, TAU * j as f64 / n as f64)))
        .collect())
}

/// Images of `n` equally spaced points of the circle `|z| = r`.
pub fn circle_image(map: &Map, r: f64, n: usize) -> Result<Vec<Point>> {
    circle_image_at(map, Point::new(0.0, 0.0), r, n)
}

/// Admissible rotation angles for [`MapDescriptor::AffineStretch`] are in
/// `[0, 2π)`; this reduces an arbitrary angle into that range.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = Euclid::rem_euclid(&angle, &TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curves_cross, enclosed_area};
    use core::f64::consts::{FRAC_PI_2, PI};
    use proptest::prelude::*;

    fn map(d: MapDescriptor) -> Map {
        Map::new(d).unwrap()
    }

    fn close(a: Point, b: Point, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn affine_stretch_examples() {
        let h = map(MapDescriptor::AffineStretch { stretch: 4.0, angle: 0.0 });
        assert!(close(h.eval(Point::new(1.0, 0.0)), Point::new(4.0, 0.0), 1e-15));
        assert!(close(h.eval(Point::new(0.0, 1.0)), Point::new(0.0, 1.0), 1e-15));
    }

    #[test]
    fn radial_stretch_matches_affine_on_boundaries() {
        let (k, l, t) = (1.0, 4.0, 0.125);
        let r = map(MapDescriptor::RadialStretch { outer_stretch: k, inner_stretch: l, inner_radius: t });
        let hk = map(MapDescriptor::AffineStretch { stretch: k, angle: 0.0 });
        let hl = map(MapDescriptor::AffineStretch { stretch: l, angle: 0.0 });
        // Oracle for the inner circle: K·(x² + y²)^{ν/2} with ν = ln 4 / ln(1/8) = −2/3.
        let nu = 4f64.ln() / 0.125f64.ln();
        assert!((nu + 2.0 / 3.0).abs() < 1e-15);
        assert!((k * t.powf(nu) - l).abs() < 1e-12);
        for j in 0..64 {
            let phi = TAU * j as f64 / 64.0;
            let z1 = Point::from_polar(1.0, phi);
            let zt = Point::from_polar(t, phi);
            assert!(close(r.eval(z1), hk.eval(z1), 1e-12));
            assert!(close(r.eval(zt), hl.eval(zt), 1e-12));
        }
    }

    #[test]
    fn unit_spiral_example() {
        let s = map(MapDescriptor::Spiral { stretch: 1.0, twist: PI / 2f64.ln() });
        assert!(close(s.eval(Point::new(2.0, 0.0)), Point::new(-2.0, 0.0), 1e-14));
    }

    #[test]
    fn zero_is_fixed_by_power_and_linear() {
        let z0 = Point::new(0.0, 0.0);
        assert_eq!(map(MapDescriptor::Power { degree: 3 }).eval(z0), z0);
        assert_eq!(map(MapDescriptor::Linear { multiplier: Point::new(2.0, 1.0) }).eval(z0), z0);
    }

    #[test]
    fn invalid_descriptors() {
        let bad = [
            MapDescriptor::Linear { multiplier: Point::new(0.0, 0.0) },
            MapDescriptor::Power { degree: 0 },
            MapDescriptor::AffineStretch { stretch: -1.0, angle: 0.0 },
            MapDescriptor::AffineStretch { stretch: 2.0, angle: 7.0 },
            MapDescriptor::Spiral { stretch: 2.0, twist: 4.0 / 3.0 },
            MapDescriptor::RadialStretch { outer_stretch: 1.0, inner_stretch: 4.0, inner_radius: 0.25 },
            MapDescriptor::RadialStretch { outer_stretch: 1.0, inner_stretch: 4.0, inner_radius: 1.5 },
            MapDescriptor::DehnTwist { direction: 2 },
            MapDescriptor::OscillatingTwist { profile: AngleProfile::Constant { angle: 0.1 } },
        ];
        for d in bad {
            assert!(
                matches!(eval(&d, Point::new(1.0, 0.0)), Err(crate::Error::Descriptor(_) | crate::Error::Domain(_))),
                "{d:?}"
            );
        }
        // Any twist is admissible at K = 1.
        assert!(MapDescriptor::Spiral { stretch: 1.0, twist: 1e6 }.validate().is_ok());
    }

    #[test]
    fn identity_circle_image() {
        let img = circle_image(&Map::identity(), 2.0, 64).unwrap();
        assert!(img.iter().all(|z| (z.norm() - 2.0).abs() < 1e-15));
        assert!(circle_image(&Map::identity(), 2.0, 8).is_err());
    }

    #[test]
    fn affine_circle_image_is_ellipse() {
        let h = map(MapDescriptor::AffineStretch { stretch: 4.0, angle: 0.0 });
        let img = circle_image(&h, 1.0, 4096).unwrap();
        for z in &img {
            assert!(((z.re / 4.0).powi(2) + z.im * z.im - 1.0).abs() < 1e-12);
        }
        let area = enclosed_area(&img).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-4);
        let rotated = map(MapDescriptor::AffineStretch { stretch: 4.0, angle: 1.1 });
        let area = enclosed_area(&circle_image(&rotated, 1.0, 4096).unwrap()).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn spiral_circle_image_is_rotated_ellipse() {
        // Oracle: S(r·z) = r^{1+iα}·S(z), so the image of |z| = r is the
        // unit-circle ellipse (semi-axes 2, 1) scaled by r and rotated by α·ln r.
        let alpha = 0.9;
        let s = map(MapDescriptor::Spiral { stretch: 2.0, twist: alpha });
        for r in [0.3f64, 1.7] {
            let rot = Point::from_polar(1.0, -alpha * r.ln());
            for z in circle_image(&s, r, 128).unwrap() {
                let w = z * rot / r;
                assert!(((w.re / 2.0).powi(2) + w.im * w.im - 1.0).abs() < 1e-12);
            }
        }
    }

    fn spiral_circle(stretch: f64, twist: f64, r: f64, n: usize) -> Vec<Point> {
        (0..n)
            .map(|j| formulas::spiral(stretch, twist, Point::from_polar(r, TAU * j as f64 / n as f64)))
            .collect()
    }

    #[test]
    fn admissible_spiral_images_do_not_cross() {
        let a = spiral_circle(2.0, 0.6, 1.0, 1024);
        let b = spiral_circle(2.0, 0.6, 1.05, 1024);
        assert!(!curves_cross(&a, &b));
    }

    #[test]
    fn strongly_twisted_spiral_images_cross() {
        // α = 5 is far beyond the bound 4/3 for K = 2: some ring (1, t]
        // has crossing boundary images.
        let base = spiral_circle(2.0, 5.0, 1.0, 1024);
        let crossed = (1..=20).any(|j| {
            let t = 1.0 + 0.01 * j as f64;
            curves_cross(&base, &spiral_circle(2.0, 5.0, t, 1024))
        });
        assert!(crossed);
    }

    #[test]
    fn descriptor_kind_names_are_distinct() {
        let names = [
            MapDescriptor::identity().kind_name(),
            MapDescriptor::Power { degree: 2 }.kind_name(),
            MapDescriptor::DehnTwist { direction: 1 }.kind_name(),
        ];
        assert_eq!(names, ["linear", "power", "dehn_twist"]);
        assert_eq!(normalize_angle(-FRAC_PI_2), 1.5 * PI);
    }

    proptest! {
        #[test]
        fn spiral_scaling_relation(
            t in 0.001..1.0f64,
            phi in -PI..PI,
            stretch in 0.2..5.0f64,
            frac in -0.99..0.99f64,
        ) {
            let bound = crate::beltrami::spiral_alpha_max(stretch).unwrap().min(50.0);
            let twist = frac * bound;
            let s = map(MapDescriptor::Spiral { stretch, twist });
            let z = Point::from_polar(1.0, phi);
            let scale = Point::from_polar(t, twist * t.ln());
            prop_assert!((s.eval(z * t) - scale * s.eval(z)).norm() <= 1e-10);
        }

        #[test]
        fn radial_stretch_boundary_agreement(ln_k in -2.0..2.0f64, ln_l in -2.0..2.0f64, phi in -PI..PI) {
            let (k, l) = (ln_k.exp(), ln_l.exp());
            let t = 0.5 * (-(ln_l - ln_k).abs()).exp();
            let r = map(MapDescriptor::RadialStretch { outer_stretch: k, inner_stretch: l, inner_radius: t });
            let z1 = Point::from_polar(1.0, phi);
            let zt = Point::from_polar(t, phi);
            prop_assert!((r.eval(z1) - formulas::affine_stretch(k, 0.0, z1)).norm() <= 1e-10);
            prop_assert!((r.eval(zt) - formulas::affine_stretch(l, 0.0, zt)).norm() <= 1e-10);
        }
    }
}
