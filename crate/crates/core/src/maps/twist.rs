//! Circle-preserving maps: scheduled Dehn twists, oscillating circle twists
//! and radial power surrogates.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

// Resolves to inherent methods when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::formulas;
use crate::error::{bail, Result};
use crate::geometry::Point;

/// One level of a Dehn twist schedule, `r_{n+1} < u_n < t_n < s_n < r_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwistLevel {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

impl TwistLevel {
    /// Inner radius of the level, `r_{n+1} = u_n / 2`.
    pub fn next_r(&self) -> f64 {
        0.5 * self.u
    }
}

/// Radii of the nested Dehn twist construction.
///
/// On `[s_n, r_n]` and `[u_n, t_n]` the map is the identity, on `[t_n, s_n]`
/// it is `t_n·f⁺(z/t_n)` and on `[r_{n+1}, u_n]` it is `r_{n+1}·f⁻(z/r_{n+1})`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DehnSchedule {
    /// Radius `R` of the disk on which the two derivatives agree.
    pub probe_radius: f64,
    pub levels: Vec<TwistLevel>,
}

impl DehnSchedule {
    /// Schedule with `r_n/s_n = t_n/u_n = 2ⁿ`, `s_n/t_n = u_n/r_{n+1} = 2`
    /// and `r_1 = 1`.
    pub fn geometric(n_max: usize, probe_radius: f64) -> Result<Self> {
        if n_max == 0 {
            bail!(Domain, "a Dehn schedule needs at least one level");
        }
        let mut levels = Vec::with_capacity(n_max);
        let mut r = 1.0;
        for n in 1..=n_max {
            let growth = 2f64.powi(n as i32);
            let s = r / growth;
            let t = 0.5 * s;
            let u = t / growth;
            levels.push(TwistLevel { r, s, t, u });
            r = 0.5 * u;
        }
        let schedule = DehnSchedule { probe_radius, levels };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    pub fn validate(&self) -> Result<()> {
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        if !(self.probe_radius.is_finite() && self.probe_radius > 0.0) {
            bail!(Domain, "probe radius must be positive, got {}", self.probe_radius);
        }
        let Some(first) = self.levels.first() else {
            bail!(Domain, "empty Dehn schedule");
        };
        if !rel(first.r, 1.0) {
            bail!(Domain, "Dehn schedule must start at r_1 = 1, got {}", first.r);
        }
        for (n, level) in self.levels.iter().enumerate() {
            let TwistLevel { r, s, t, u } = *level;
            let ordered = level.next_r() > 0.0 && level.next_r() < u && u < t && t < s && s < r;
            if !ordered {
                bail!(Domain, "level {}: need r_(n+1) < u < t < s < r", n + 1);
            }
            if !rel(s / t, 2.0) {
                bail!(Domain, "level {}: s/t must equal 2", n + 1);
            }
            if let Some(next) = self.levels.get(n + 1) {
                if !rel(next.r, level.next_r()) {
                    bail!(Domain, "level {}: u_n / r_(n+1) must equal 2", n + 1);
                }
                if next.r / next.s <= r / s || next.t / next.u <= t / u {
                    bail!(Domain, "level {}: ratios r/s and t/u must grow", n + 2);
                }
            }
        }
        Ok(())
    }

    /// Index of the level with `r_{n+1} ≤ |z| < r_n`.
    fn level_of(&self, r: f64) -> Option<usize> {
        let idx = self.levels.partition_point(|l| l.next_r() > r);
        (idx < self.levels.len() && r < self.levels[idx].r).then_some(idx)
    }

    pub fn eval(&self, z: Point) -> Point {
        let r = z.norm();
        let Some(n) = self.level_of(r) else {
            return z;
        };
        let level = self.levels[n];
        if r >= level.s || (r >= level.u && r <= level.t) {
            z
        } else if r > level.t {
            formulas::dehn_twist(1, z / level.t) * level.t
        } else {
            let inner = level.next_r();
            formulas::dehn_twist(-1, z / inner) * inner
        }
    }

    /// Piecewise region label; changes across every schedule circle.
    pub fn region(&self, z: Point) -> u32 {
        let r = z.norm();
        match self.level_of(r) {
            None => 0,
            Some(n) => {
                let l = self.levels[n];
                let sub = if r >= l.s {
                    0
                } else if r > l.t {
                    1
                } else if r >= l.u {
                    2
                } else {
                    3
                };
                1 + 4 * n as u32 + sub
            }
        }
    }
}

/// Angle `θ(r)` that the negative real axis is rotated to on `|z| = r`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum AngleProfile {
    Constant { angle: f64 },
    /// `π + A·sin(2π·f·ln ln(1/r))` for `r < 1/e`, and `π` above.
    LogLog { amplitude: f64, frequency: f64 },
    /// Piecewise linear in `ln r` through `(radius, angle)` knots sorted by
    /// decreasing radius; constant beyond the first and last knot.
    Knots { knots: Vec<[f64; 2]> },
}

impl Default for AngleProfile {
    fn default() -> Self {
        AngleProfile::LogLog { amplitude: FRAC_PI_2, frequency: 1.0 }
    }
}

impl AngleProfile {
    pub fn validate(&self) -> Result<()> {
        let in_band = |a: f64| (FRAC_PI_2..=1.5 * PI).contains(&a);
        match self {
            AngleProfile::Constant { angle } => {
                if !in_band(*angle) {
                    bail!(Domain, "profile angle {angle} outside [π/2, 3π/2]");
                }
            }
            AngleProfile::LogLog { amplitude, frequency } => {
                if !(amplitude.is_finite() && amplitude.abs() <= FRAC_PI_2) {
                    bail!(Domain, "profile amplitude must lie in [0, π/2], got {amplitude}");
                }
                if !(frequency.is_finite() && *frequency > 0.0) {
                    bail!(Domain, "profile frequency must be positive");
                }
            }
            AngleProfile::Knots { knots } => {
                if knots.is_empty() {
                    bail!(Domain, "knot profile needs at least one knot");
                }
                for w in knots.windows(2) {
                    if !(w[1][0] < w[0][0]) {
                        bail!(Domain, "knot radii must be strictly decreasing");
                    }
                }
                for k in knots {
                    if !(k[0] > 0.0 && k[0].is_finite()) {
                        bail!(Domain, "knot radius must be positive");
                    }
                    if !in_band(k[1]) {
                        bail!(Domain, "profile angle {} outside [π/2, 3π/2]", k[1]);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn angle(&self, r: f64) -> f64 {
        match self {
            AngleProfile::Constant { angle } => *angle,
            AngleProfile::LogLog { amplitude, frequency } => {
                let inv_e = (-1.0f64).exp();
                if r >= inv_e || r <= 0.0 {
                    PI
                } else {
                    let u = (-r.ln()).ln();
                    PI + amplitude * (2.0 * PI * frequency * u).sin()
                }
            }
            AngleProfile::Knots { knots } => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if r >= first[0] {
                    return first[1];
                }
                if r <= last[0] {
                    return last[1];
                }
                let i = knots.partition_point(|k| k[0] > r);
                let (a, b) = (knots[i - 1], knots[i]);
                let s = (r.ln() - a[0].ln()) / (b[0].ln() - a[0].ln());
                a[1] + s * (b[1] - a[1])
            }
        }
    }

    pub fn region(&self, r: f64) -> u32 {
        match self {
            AngleProfile::Constant { .. } => 0,
            AngleProfile::LogLog { .. } => u32::from(r < (-1.0f64).exp()),
            AngleProfile::Knots { knots } => knots.partition_point(|k| k[0] > r) as u32,
        }
    }
}

/// Radial homeomorphism `z ↦ (z/|z|)·g(|z|)` whose logarithmic growth rate
/// `d ln g / d ln r` alternates between two exponents on bands of width
/// `period` in `ln(1/r)`. Above `r = 1` it is `r^{low}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerBands {
    pub low_exponent: f64,
    pub high_exponent: f64,
    pub period: f64,
}

impl PowerBands {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.low_exponent) && ok(self.high_exponent) && ok(self.period)) {
            bail!(Descriptor, "power band exponents and period must be positive");
        }
        Ok(())
    }

    /// `ln g(r)`.
    pub fn log_modulus(&self, r: f64) -> f64 {
        let u = -r.ln();
        if u <= 0.0 {
            return self.low_exponent * r.ln();
        }
        let band = (u / self.period).floor();
        let pairs = (band / 2.0).floor();
        let full = pairs * self.period * (self.low_exponent + self.high_exponent);
        let rest = u - 2.0 * pairs * self.period;
        let partial = if rest <= self.period {
            self.low_exponent * rest
        } else {
            self.low_exponent * self.period + self.high_exponent * (rest - self.period)
        };
        -(full + partial)
    }

    pub fn eval(&self, z: Point) -> Point {
        let r = z.norm();
        if r == 0.0 {
            return z;
        }
        z * (self.log_modulus(r).exp() / r)
    }

    pub fn region(&self, r: f64) -> u32 {
        let u = -r.ln();
        if u <= 0.0 {
            0
        } else {
            1 + (u / self.period).floor() as u32
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_schedule_ratios() {
        let s = DehnSchedule::geometric(6, 1.0).unwrap();
        for (n, l) in s.levels.iter().enumerate() {
            let growth = 2f64.powi(n as i32 + 1);
            assert!((l.r / l.s - growth).abs() < 1e-9 * growth);
            assert!((l.t / l.u - growth).abs() < 1e-9 * growth);
            assert!((l.s / l.t - 2.0).abs() < 1e-12);
        }
        assert_eq!(s.levels[0].r, 1.0);
    }

    #[test]
    fn schedule_rejects_bad_ratio() {
        let mut s = DehnSchedule::geometric(3, 1.0).unwrap();
        s.levels[1].t *= 1.1;
        assert!(s.validate().is_err());
    }

    #[test]
    fn schedule_is_continuous_on_circles() {
        let s = DehnSchedule::geometric(4, 1.0).unwrap();
        for l in &s.levels {
            for r in [l.r, l.s, l.t, l.u, l.next_r()] {
                for j in 0..32 {
                    let phi = j as f64 * 0.19634954084936207;
                    let z_out = Point::from_polar(r * (1.0 + 1e-13), phi);
                    let z_in = Point::from_polar(r * (1.0 - 1e-13), phi);
                    let jump = (s.eval(z_out) - s.eval(z_in)).norm();
                    assert!(jump < 1e-10 * r.max(1e-300) + 1e-12 * r, "r = {r}: {jump}");
                }
            }
        }
    }

    #[test]
    fn loglog_profile_is_continuous_and_bounded() {
        let p = AngleProfile::default();
        let inv_e = (-1.0f64).exp();
        assert!((p.angle(inv_e * (1.0 - 1e-12)) - PI).abs() < 1e-9);
        for j in 1..400 {
            let r = 10f64.powf(-(j as f64));
            let a = p.angle(r);
            assert!((FRAC_PI_2 - 1e-12..=1.5 * PI + 1e-12).contains(&a));
        }
    }

    #[test]
    fn knot_profile_interpolates_in_log_radius() {
        let p = AngleProfile::Knots { knots: alloc::vec![[1.0, PI], [0.01, 2.0]] };
        p.validate().unwrap();
        assert!((p.angle(0.1) - 0.5 * (PI + 2.0)).abs() < 1e-12);
        assert_eq!(p.angle(5.0), PI);
        assert_eq!(p.angle(1e-5), 2.0);
    }

    #[test]
    fn power_bands_grow_at_alternating_rates() {
        let b = PowerBands { low_exponent: 1.0, high_exponent: 2.0, period: 1.0 };
        let r = |u: f64| (-u).exp();
        // Slope of ln g in ln r inside the first two bands.
        let slope = |u0: f64| (b.log_modulus(r(u0 + 0.1)) - b.log_modulus(r(u0))) / (-0.1);
        assert!((slope(0.3) - 1.0).abs() < 1e-12);
        assert!((slope(1.3) - 2.0).abs() < 1e-12);
        assert!((slope(2.3) - 1.0).abs() < 1e-12);
        // Continuity at band edges.
        for u in [1.0, 2.0, 3.0, 4.0] {
            assert!((b.log_modulus(r(u - 1e-12)) - b.log_modulus(r(u + 1e-12))).abs() < 1e-9);
        }
    }
}
