//! Rings of a piecewise annulus map.
//!
//! Each ring `r_in ≤ |z| ≤ r_out` carries a rescaled spiral or radial
//! stretch, `r_out·e^{iθ}·g(z/r_out)`, which agrees with the affine stretch
//! `h_{K,θ}` on its outer circle and with another affine stretch on its inner
//! circle. Chaining rings whose boundary stretches match gives a continuous
//! map.

use alloc::vec::Vec;

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::formulas;
use crate::beltrami;
use crate::error::{bail, Result};
use crate::geometry::{angle_distance, Point};

/// An affine stretch `h_{K,θ}`, used for the region outside the rings and
/// as the boundary value of each ring.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AffineFill {
    pub stretch: f64,
    pub angle: f64,
}

impl AffineFill {
    pub fn eval(&self, z: Point) -> Point {
        formulas::affine_stretch(self.stretch, self.angle, z)
    }

    /// True when both fills define the same linear map.
    pub fn agrees_with(&self, other: &AffineFill, tol: f64) -> bool {
        (self.stretch - other.stretch).abs() <= tol * self.stretch.max(1.0)
            && angle_distance(self.angle, other.angle) <= tol
    }
}

/// The map carried by one ring.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PieceKind {
    /// Spiral with stretch `K` and twist rate `α`: the boundary angle turns
    /// by `α·ln(r/r_out)` across the ring.
    Spiral { stretch: f64, twist: f64 },
    /// Radial stretch from `K` on the outer circle to `L` on the inner one,
    /// with `t = r_in / r_out`.
    Radial { outer_stretch: f64, inner_stretch: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnulusPiece {
    pub outer_radius: f64,
    pub inner_radius: f64,
    /// Rotation angle of the piece on its outer circle. Unwrapped, so
    /// several turns can accumulate along a plan.
    pub base_angle: f64,
    pub piece: PieceKind,
}

impl AnnulusPiece {
    pub fn ratio(&self) -> f64 {
        self.inner_radius / self.outer_radius
    }

    /// Affine stretch the piece agrees with on its outer circle.
    pub fn outer_fill(&self) -> AffineFill {
        let stretch = match self.piece {
            PieceKind::Spiral { stretch, .. } => stretch,
            PieceKind::Radial { outer_stretch, .. } => outer_stretch,
        };
        AffineFill { stretch, angle: self.base_angle }
    }

    /// Affine stretch the piece agrees with on its inner circle.
    pub fn inner_fill(&self) -> AffineFill {
        match self.piece {
            PieceKind::Spiral { stretch, twist } => AffineFill {
                stretch,
                angle: self.base_angle + twist * self.ratio().ln(),
            },
            PieceKind::Radial { inner_stretch, .. } => AffineFill {
                stretch: inner_stretch,
                angle: self.base_angle,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (ro, ri) = (self.outer_radius, self.inner_radius);
        if !(ro.is_finite() && ri.is_finite() && ri > 0.0 && ri < ro) {
            bail!(Descriptor, "annulus piece needs 0 < r_in < r_out, got r_in = {ri}, r_out = {ro}");
        }
        if !self.base_angle.is_finite() {
            bail!(Descriptor, "annulus piece base angle must be finite");
        }
        match self.piece {
            PieceKind::Spiral { stretch, twist } => check_spiral(stretch, twist),
            PieceKind::Radial { outer_stretch, inner_stretch } => {
                check_radial(outer_stretch, inner_stretch, self.ratio())
            }
        }
    }

    /// Evaluates the piece at `z` (meaningful for `r_in ≤ |z| ≤ r_out`).
    pub fn eval(&self, z: Point) -> Point {
        let w = z / self.outer_radius;
        let inner = match self.piece {
            PieceKind::Spiral { stretch, twist } => formulas::spiral(stretch, twist, w),
            PieceKind::Radial { outer_stretch, inner_stretch } => {
                formulas::radial_stretch(outer_stretch, inner_stretch, self.ratio(), w)
            }
        };
        Point::from_polar(self.outer_radius, self.base_angle) * inner
    }

    /// Effective stretch `K(r)` with `area(f(B(0, r))) = π·K(r)·r²`.
    pub fn area_stretch(&self, r: f64) -> f64 {
        match self.piece {
            PieceKind::Spiral { stretch, .. } => stretch,
            PieceKind::Radial { outer_stretch, inner_stretch } => {
                let nu = formulas::radial_exponent(outer_stretch, inner_stretch, self.ratio());
                let rel = (r / self.outer_radius).clamp(self.ratio(), 1.0);
                outer_stretch * rel.powf(nu)
            }
        }
    }

    /// Complex dilatation inside the ring. Rescaling by `r_out·e^{iθ}` does
    /// not change it.
    pub fn dilatation(&self, z: Point) -> Point {
        let w = z / self.outer_radius;
        match self.piece {
            PieceKind::Spiral { stretch, twist } => beltrami::spiral_dilatation(stretch, twist, w),
            PieceKind::Radial { outer_stretch, inner_stretch } => {
                beltrami::radial_dilatation(outer_stretch, inner_stretch, self.ratio(), w)
            }
        }
    }
}

pub(crate) fn check_stretch(name: &str, k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        bail!(Descriptor, "{name} must be a positive finite number, got {k}");
    }
    Ok(())
}

pub(crate) fn check_spiral(stretch: f64, twist: f64) -> Result<()> {
    check_stretch("stretch", stretch)?;
    if !twist.is_finite() {
        bail!(Descriptor, "twist must be finite");
    }
    let bound = beltrami::spiral_alpha_max(stretch)?;
    if twist.abs() >= bound {
        bail!(
            Descriptor,
            "spiral twist {twist} is not admissible for stretch {stretch}: need |twist| < {bound}"
        );
    }
    Ok(())
}

pub(crate) fn check_radial(outer: f64, inner: f64, ratio: f64) -> Result<()> {
    check_stretch("outer stretch", outer)?;
    check_stretch("inner stretch", inner)?;
    let bound = beltrami::radial_ratio_max(outer, inner)?;
    if !(ratio > 0.0 && ratio < bound) {
        bail!(
            Descriptor,
            "radial stretch needs 0 < t < exp(-|ln(L/K)|) = {bound}, got t = {ratio}"
        );
    }
    Ok(())
}

/// Rings sorted from the outside in, plus the affine stretch used beyond
/// the outermost circle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PiecewiseAnnulus {
    pub pieces: Vec<AnnulusPiece>,
    pub outer_fill: AffineFill,
}

/// Where a point falls in a piecewise annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ring {
    Outside,
    Piece(usize),
    Inside,
}

impl PiecewiseAnnulus {
    /// Relative tolerance for value agreement on shared circles.
    pub const SEAM_TOLERANCE: f64 = 1e-9;

    pub fn validate(&self) -> Result<()> {
        check_stretch("outer fill stretch", self.outer_fill.stretch)?;
        if !self.outer_fill.angle.is_finite() {
            bail!(Descriptor, "outer fill angle must be finite");
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            piece.validate()?;
            if i > 0 {
                let prev = &self.pieces[i - 1];
                let gap = (prev.inner_radius - piece.outer_radius).abs();
                if gap > 1e-12 * piece.outer_radius {
                    bail!(
                        Descriptor,
                        "pieces {} and {i} are not contiguous: r_in = {}, next r_out = {}",
                        i - 1,
                        prev.inner_radius,
                        piece.outer_radius
                    );
                }
            }
        }
        for i in 0..=self.pieces.len() {
            self.check_seam(i)?;
        }
        Ok(())
    }

    // Seam `i` is the outer circle of piece `i` (the last seam is the inner
    // circle of the innermost piece, which needs no check).
    fn check_seam(&self, i: usize) -> Result<()> {
        let Some(piece) = self.pieces.get(i) else {
            return Ok(());
        };
        let r = piece.outer_radius;
        let outside = |z: Point| match i {
            0 => self.outer_fill.eval(z),
            _ => self.pieces[i - 1].eval(z),
        };
        let scale = r * piece.outer_fill().stretch.max(1.0);
        for j in 0..16 {
            let z = Point::from_polar(r, core::f64::consts::PI * j as f64 / 8.0);
            let mismatch = (outside(z) - piece.eval(z)).norm();
            if mismatch > Self::SEAM_TOLERANCE * scale {
                bail!(
                    Descriptor,
                    "piecewise annulus is discontinuous on |z| = {r}: mismatch {mismatch}"
                );
            }
        }
        Ok(())
    }

    pub fn ring_of(&self, z: Point) -> Ring {
        let r = z.norm();
        match self.pieces.first() {
            None => Ring::Outside,
            Some(first) if r > first.outer_radius => Ring::Outside,
            Some(_) => {
                let idx = self.pieces.partition_point(|p| p.inner_radius > r);
                if idx == self.pieces.len() {
                    Ring::Inside
                } else {
                    Ring::Piece(idx)
                }
            }
        }
    }

    /// Affine stretch used inside the innermost ring.
    pub fn inner_fill(&self) -> AffineFill {
        self.pieces.last().map_or(self.outer_fill, AnnulusPiece::inner_fill)
    }

    pub fn eval(&self, z: Point) -> Point {
        match self.ring_of(z) {
            Ring::Outside => self.outer_fill.eval(z),
            Ring::Piece(i) => self.pieces[i].eval(z),
            Ring::Inside => self.inner_fill().eval(z),
        }
    }

    pub fn area_stretch(&self, r: f64) -> f64 {
        match self.ring_of(Point::new(r, 0.0)) {
            Ring::Outside => self.outer_fill.stretch,
            Ring::Piece(i) => self.pieces[i].area_stretch(r),
            Ring::Inside => self.inner_fill().stretch,
        }
    }

    pub fn dilatation(&self, z: Point) -> Point {
        let affine = |fill: AffineFill| Point::new(beltrami::affine_dilatation(fill.stretch), 0.0);
        match self.ring_of(z) {
            Ring::Outside => affine(self.outer_fill),
            Ring::Piece(i) => self.pieces[i].dilatation(z),
            Ring::Inside => affine(self.inner_fill()),
        }
    }

    /// Outermost and innermost planned radii.
    pub fn radial_extent(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.outer_radius, self.pieces.last()?.inner_radius))
    }
}
