//! Point–circle and circle–circle distances.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{wrap_angle, Circle3, Vec3};
use crate::numeric::brent_min;

/// Number of outer-parameter seeds scanned by [`circle_circle_distance`].
pub const SEEDS: usize = 720;

/// Default solver tolerance in core-radius units.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCircle {
    pub distance: f64,
    pub closest: Vec3,
    /// Circle parameter of `closest`.
    pub angle: f64,
    /// The point lies on the circle's axis, so every circle point is closest.
    pub on_axis: bool,
}

/// Exact distance from `p` to the circle `c`.
pub fn point_circle_distance(p: Vec3, c: &Circle3) -> PointCircle {
    let d = p - c.center;
    let x = d.dot(c.u_axis);
    let y = d.dot(c.v_axis);
    let s = x.hypot(y);
    let on_axis = s <= 1e-15 * (1.0 + d.norm());
    let angle = if on_axis { 0.0 } else { y.atan2(x) };
    let closest = c.point(angle);
    PointCircle {
        distance: p.dist(closest),
        closest,
        angle,
        on_axis,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub distance: f64,
    pub p_on_a: Vec3,
    pub p_on_b: Vec3,
    pub angle_a: f64,
    pub angle_b: f64,
    /// Distinct global minimisers found (within 10·tol of the optimum).
    pub multiplicity: usize,
    /// Set when the minimum is attained on a continuum (coaxial circles);
    /// `multiplicity` is then meaningless.
    pub degenerate: bool,
    /// All tied minimisers as (angle on a, angle on b).
    pub minimizers: Vec<(f64, f64)>,
}

fn profile(a: &Circle3, b: &Circle3, s: f64) -> f64 {
    point_circle_distance(a.point(s), b).distance
}

/// Global minimum distance between two circles.
///
/// Scans [`SEEDS`] parameters on `a`, solves the inner problem on `b` in
/// closed form, refines every local minimum of the scan and reports all
/// minimisers tied with the optimum.
pub fn circle_circle_distance(a: &Circle3, b: &Circle3, tol: f64) -> Result<DistanceResult> {
    if !(tol > 0.0) {
        return Err(invalid(
            "circle_circle_distance",
            format!("tol must be positive, got {tol}"),
        ));
    }
    let h = TAU / SEEDS as f64;
    let vals: Vec<f64> = (0..SEEDS).map(|i| profile(a, b, i as f64 * h)).collect();
    let tie = 10.0 * tol;

    let mut refined: Vec<(f64, f64)> = Vec::new();
    for i in 0..SEEDS {
        let prev = vals[(i + SEEDS - 1) % SEEDS];
        let next = vals[(i + 1) % SEEDS];
        if vals[i] <= prev && vals[i] <= next {
            let c = i as f64 * h;
            let (s, d) = brent_min(|s| profile(a, b, s), c - h, c + h, 1e-12);
            refined.push((wrap_angle(s), d.min(vals[i])));
        }
    }
    let best = refined.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let near = vals.iter().filter(|&&v| v <= best + tie.max(1e-9)).count();
    let degenerate = near * 4 > SEEDS;

    let mut tied: Vec<f64> = Vec::new();
    let mut ordered = refined.clone();
    ordered.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.total_cmp(&y.0)));
    for &(s, d) in &ordered {
        if d <= best + tie && tied.iter().all(|&t| wrap_angle(t - s).abs() > 1e-6) {
            tied.push(s);
        }
    }
    let s0 = tied[0];
    let pc = point_circle_distance(a.point(s0), b);
    let minimizers = tied
        .iter()
        .map(|&s| (s, point_circle_distance(a.point(s), b).angle))
        .collect();
    Ok(DistanceResult {
        distance: pc.distance,
        p_on_a: a.point(s0),
        p_on_b: pc.closest,
        angle_a: s0,
        angle_b: pc.angle,
        multiplicity: tied.len(),
        degenerate,
        minimizers,
    })
}
