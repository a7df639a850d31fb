//! Numerical tools for generalized derivatives of planar quasiconformal maps.
//!
//! The crate evaluates a family of explicit planar maps, computes their
//! Beltrami coefficients, traces the rescaled orbit curves
//! `γ_x(t) = (f(x₀ + t·x) − f(x₀)) / ρ_f(t)` and estimates their ω-limit
//! sets. The [`realizer`] module builds a piecewise annulus map whose orbit
//! of `1` accumulates on a prescribed compact connected set.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the `orbitspace-cli` crate.
#![no_std]

extern crate alloc;


pub mod beltrami;
pub mod error;
pub mod geometry;
pub mod maps;
pub mod realizer;
pub mod rescale;
pub mod scenarios;

pub use error::{Error, Result};
pub use geometry::Point;
pub use maps::{Map, MapDescriptor};
