//! Synthesis of piecewise annulus maps with a prescribed orbit.
//!
//! The target set `X` is walked repeatedly by staircase paths `Γ_k` of
//! circular arcs and radial segments. Each arc becomes a spiral ring and
//! each radial segment a radial stretch ring, chained from `r_start`
//! inwards, so that `γ_1` follows `Γ_k` as `t` decreases and accumulates on
//! `X`.

mod cover;
mod plan;
mod target;
mod verify;

pub use cover::cover_path;
pub use plan::{
    sharp_distortion, Breakpoint, CoverPlan, PlanPolicy, PlannedPass, Planner, RatioPolicy, Realization, TwistPolicy,
};
pub use target::{sample_path, PathSegment, Polar, TargetSet};
pub use verify::{verify_realization, VerificationReport, VerifyOptions};
