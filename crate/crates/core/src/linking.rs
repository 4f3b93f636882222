//! Linking numbers of round circles.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{circle_circle_distance, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::geometry::Circle3;

/// Quadrature nodes per circle for the Gauss integral.
pub const GAUSS_NODES: usize = 512;

/// Circles closer than this are treated as touching.
pub const TOUCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkingNumber {
    pub value: i64,
    /// Raw quadrature value before rounding.
    pub raw: f64,
    /// `|raw − value|`.
    pub residual: f64,
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Gauss linking integral on a uniform `n × n` grid.
pub fn gauss_integral(a: &Circle3, b: &Circle3, n: usize) -> f64 {
    let h = TAU / n as f64;
    let pb: Vec<_> = (0..n)
        .map(|j| (b.point(j as f64 * h), b.tangent(j as f64 * h)))
        .collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = i as f64 * h;
            let (p, t) = (a.point(s), a.tangent(s));
            let terms: Vec<f64> = pb
                .iter()
                .map(|&(q, u)| {
                    let d = p - q;
                    let r = d.norm();
                    d.dot(t.cross(u)) / (r * r * r)
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    pairwise_sum(&rows) * h * h / (4.0 * PI)
}

/// Linking number of two disjoint circles by the Gauss integral.
pub fn linking_number(a: &Circle3, b: &Circle3) -> Result<LinkingNumber> {
    let d = circle_circle_distance(a, b, DEFAULT_TOL)?.distance;
    if d < TOUCH_TOL {
        return Err(Error::NearSingular { distance: d });
    }
    let raw = gauss_integral(a, b, GAUSS_NODES);
    let value = raw.round() as i64;
    Ok(LinkingNumber {
        value,
        raw,
        residual: (raw - value as f64).abs(),
    })
}

/// Signed number of times `b` passes through the flat disk bounded by `a`.
///
/// For round circles this equals the linking number and costs a handful of
/// flops. Returns `None` when `b` meets the rim of `a` or lies in its plane
/// within `eps`.
pub fn disk_crossings(a: &Circle3, b: &Circle3, eps: f64) -> Option<i64> {
    let n = a.normal();
    // height of b(s) above a's plane: h0 + hu cos s + hv sin s
    let h0 = (b.center - a.center).dot(n);
    let hu = b.radius * b.u_axis.dot(n);
    let hv = b.radius * b.v_axis.dot(n);
    let amp = hu.hypot(hv);
    if amp < eps {
        if h0.abs() > eps {
            return Some(0);
        }
        // coplanar: unlinked unless the circles meet
        let d = b.center.dist(a.center);
        let meet = d <= a.radius + b.radius + eps && d + eps >= (a.radius - b.radius).abs();
        return (!meet).then_some(0);
    }
    let c = -h0 / amp;
    if c.abs() >= 1.0 {
        return Some(0);
    }
    let phase = hv.atan2(hu);
    let spread = c.acos();
    let mut total = 0;
    for s in [phase + spread, phase - spread] {
        let p = b.point(s);
        let rim = p.dist(a.center) - a.radius;
        if rim.abs() < eps {
            return None;
        }
        if rim < 0.0 {
            let dh = b.tangent(s).dot(n);
            if dh.abs() < eps {
                return None;
            }
            total += if dh > 0.0 { 1 } else { -1 };
        }
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    /// Symmetric matrix of pairwise linking numbers; the diagonal is 0.
    pub pairwise: Vec<Vec<i64>>,
    pub max_residual: f64,
    pub all_linked: bool,
}

/// Pairwise linking numbers of a family of circles.
pub fn link_report(circles: &[Circle3]) -> Result<LinkReport> {
    let n = circles.len();
    let mut pairwise = vec![vec![0; n]; n];
    let mut max_residual: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let l = linking_number(&circles[i], &circles[j])?;
            pairwise[i][j] = l.value;
            pairwise[j][i] = l.value;
            max_residual = max_residual.max(l.residual);
        }
    }
    let all_linked = (0..n).all(|i| (0..n).all(|j| i == j || pairwise[i][j] != 0));
    Ok(LinkReport {
        pairwise,
        max_residual,
        all_linked,
    })
}
