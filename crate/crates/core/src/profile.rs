//! Master tooth profiles and their offsets.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::wrap_angle;

/// Teeth along a gearing longitude, linear in the torus chart.
///
/// A tooth's centreline is the chart line `α = k·2π/N + flank_slope·(β − β₀)`;
/// across the longitude the radial offset from the pitch torus follows a
/// trapezoid: top land, straight flank, root land, straight flank. Root and
/// top lands take the same fraction of the pitch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToothProfile {
    pub beta0: f64,
    pub tooth_count: usize,
    pub addendum: f64,
    pub dedendum: f64,
    /// dα/dβ of the tooth lines.
    pub flank_slope: f64,
    pub top_land_fraction: f64,
}

impl ToothProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProfile(m));
        if self.tooth_count < 3 {
            return bad(format!("need at least 3 teeth, got {}", self.tooth_count));
        }
        if !(self.addendum > 0.0 && self.dedendum > 0.0) {
            return bad("addendum and dedendum must be positive".into());
        }
        if !(self.top_land_fraction > 0.0 && self.top_land_fraction < 0.5) {
            return bad(format!(
                "top land fraction {} leaves teeth overlapping their neighbours",
                self.top_land_fraction
            ));
        }
        if !self.flank_slope.is_finite() || !self.beta0.is_finite() {
            return bad("non-finite slope or longitude".into());
        }
        Ok(())
    }

    pub fn pitch(&self) -> f64 {
        TAU / self.tooth_count as f64
    }

    /// Radial offset at pitch phase `u` (in pitches, tooth centre at 0).
    pub fn height(&self, u: f64) -> f64 {
        let f = 2.0 * (u - u.round()).abs();
        let t = self.top_land_fraction;
        if f <= t {
            self.addendum
        } else if f >= 1.0 - t {
            -self.dedendum
        } else {
            self.addendum - (f - t) / (1.0 - 2.0 * t) * (self.addendum + self.dedendum)
        }
    }

    /// Pitch phase of chart point (α, β) relative to the band centre `beta0`.
    pub fn phase(&self, alpha: f64, beta: f64) -> f64 {
        (alpha - self.flank_slope * wrap_angle(beta - self.beta0)) / self.pitch()
    }

    /// Corner phases of one tooth, from root end to root end.
    fn corners(&self) -> [f64; 4] {
        let t = self.top_land_fraction;
        [-0.5 + 0.5 * t, -0.5 * t, 0.5 * t, 0.5 - 0.5 * t]
    }
}

/// A planar polyline. With `period = Some(p)` it is an open profile that
/// repeats with shift `(p, 0)`, traversed toward +x with its outside at
/// +y; otherwise it is a closed polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve2 {
    pub points: Vec<[f64; 2]>,
    pub period: Option<f64>,
}

impl Curve2 {
    pub fn closed(points: Vec<[f64; 2]>) -> Curve2 {
        Curve2 {
            points,
            period: None,
        }
    }

    /// Segments, including the closing one (shifted by the period).
    pub fn segments(&self) -> Vec<([f64; 2], [f64; 2])> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let a = self.points[i];
                let mut b = self.points[(i + 1) % n];
                if i + 1 == n {
                    if let Some(p) = self.period {
                        b[0] += p;
                    }
                }
                (a, b)
            })
            .collect()
    }

    fn signed_area(&self) -> f64 {
        self.segments()
            .iter()
            .map(|(a, b)| a[0] * b[1] - b[0] * a[1])
            .sum::<f64>()
            * 0.5
    }

    /// Distance from `q` to the curve (all periodic copies).
    pub fn distance(&self, q: [f64; 2]) -> f64 {
        let segs = self.segments();
        let shifts = match self.period {
            Some(p) => vec![-p, 0.0, p],
            None => vec![0.0],
        };
        let mut best = f64::INFINITY;
        for &s in &shifts {
            for (a, b) in &segs {
                best = best.min(seg_dist([q[0] - s, q[1]], *a, *b));
            }
        }
        best
    }

    /// Whether two non-adjacent segments intersect.
    pub fn self_intersects(&self) -> bool {
        let segs = self.segments();
        let n = segs.len();
        let copies: Vec<(usize, f64)> = match self.period {
            Some(p) => (0..n).flat_map(|i| [(i, -p), (i, 0.0), (i, p)]).collect(),
            None => (0..n).map(|i| (i, 0.0)).collect(),
        };
        for i in 0..n {
            for &(j, s) in &copies {
                let adjacent = (s == 0.0 && (j == i || (j + 1) % n == i || (i + 1) % n == j))
                    || (self.period.is_some()
                        && ((i == 0 && j == n - 1 && s < 0.0)
                            || (i == n - 1 && j == 0 && s > 0.0)));
                if adjacent || (s == 0.0 && j < i) {
                    continue;
                }
                let (c, d) = segs[j];
                if segments_cross(segs[i].0, segs[i].1, [c[0] + s, c[1]], [d[0] + s, d[1]]) {
                    return true;
                }
            }
        }
        false
    }

    /// Largest y over the curve at abscissa `x`, sampled into a table of
    /// `n` values over one period starting at `x0`.
    pub fn upper_envelope(&self, x0: f64, n: usize) -> Vec<f64> {
        let p = self.period.expect("upper_envelope needs a periodic curve");
        let mut table = vec![f64::NEG_INFINITY; n];
        for (a, b) in self.segments() {
            for shift in [-p, 0.0, p] {
                let (ax, bx) = (a[0] + shift, b[0] + shift);
                let (lo, hi) = (ax.min(bx), ax.max(bx));
                let k0 = ((lo - x0) / p * n as f64).ceil() as i64;
                let k1 = ((hi - x0) / p * n as f64).floor() as i64;
                for k in k0.max(0)..=k1.min(n as i64 - 1) {
                    let x = x0 + p * k as f64 / n as f64;
                    let y = if (bx - ax).abs() < 1e-300 {
                        a[1].max(b[1])
                    } else {
                        a[1] + (b[1] - a[1]) * (x - ax) / (bx - ax)
                    };
                    let slot = &mut table[k as usize];
                    *slot = slot.max(y);
                }
            }
        }
        table
    }
}

fn seg_dist(q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 {
        (((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (q[0] - a[0] - t * dx).hypot(q[1] - a[1] - t * dy)
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Proper crossing of segments `ab` and `cd` (shared endpoints excluded).
pub fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// One gearing pattern: band centres (β) and the (α, offset) polyline along
/// each centre over a full turn.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterProfile {
    pub profile: ToothProfile,
    pub centers: Vec<f64>,
    /// Closed in α: the last corner connects to the first across ±π.
    pub curve: Vec<[f64; 2]>,
}

impl MasterProfile {
    /// The profile developed at longitude radius `ell`: x = ell·α.
    pub fn developed(&self, ell: f64) -> Curve2 {
        Curve2 {
            points: self.curve.iter().map(|p| [p[0] * ell, p[1]]).collect(),
            period: Some(TAU * ell),
        }
    }
}

/// Tooth corners along the gearing longitude. With `merged_inner` the
/// pattern is centred on the innermost longitude β = π, replacing the two
/// nearby inner longitudes ±β₀.
pub fn master_tooth_profile(spec: &ToothProfile, merged_inner: bool) -> Result<MasterProfile> {
    spec.validate()?;
    let centers = if merged_inner {
        vec![PI]
    } else {
        vec![spec.beta0, -spec.beta0]
    };
    let p = spec.pitch();
    let mut curve: Vec<[f64; 2]> = Vec::with_capacity(4 * spec.tooth_count);
    for k in 0..spec.tooth_count {
        for (c, u) in spec.corners().into_iter().enumerate() {
            let h = if c == 0 || c == 3 {
                -spec.dedendum
            } else {
                spec.addendum
            };
            curve.push([k as f64 * p + u * p, h]);
        }
    }
    // start the turn at −π
    for q in &mut curve {
        q[0] = wrap_angle(q[0]);
    }
    curve.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let profile = ToothProfile {
        beta0: centers[0],
        ..*spec
    };
    let out = MasterProfile {
        profile,
        centers,
        curve,
    };
    if out.developed(1.0).self_intersects() {
        return Err(Error::InvalidProfile(
            "profile polyline self-intersects".into(),
        ));
    }
    Ok(out)
}

/// Offset a curve by `gap` toward its outside, with round joins at convex
/// corners. Closed polygons are offset away from their interior.
pub fn offset_profile(curve: &Curve2, gap: f64) -> Result<Curve2> {
    if !(gap >= 0.0) {
        return Err(invalid(
            "offset_profile",
            format!("gap must be non-negative, got {gap}"),
        ));
    }
    if gap == 0.0 {
        return Ok(curve.clone());
    }
    let segs = curve.segments();
    let n = segs.len();
    // outside normal: left of travel for periodic profiles, right of a
    // counter-clockwise polygon
    let side = match curve.period {
        Some(_) => 1.0,
        None => {
            if curve.signed_area() > 0.0 {
                -1.0
            } else {
                1.0
            }
        }
    };
    let normal = |(a, b): ([f64; 2], [f64; 2])| {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let l = dx.hypot(dy);
        [-dy / l * side, dx / l * side]
    };
    let mut out: Vec<[f64; 2]> = Vec::new();
    for i in 0..n {
        let prev = segs[(i + n - 1) % n];
        let cur = segs[i];
        let (n0, n1) = (normal(prev), normal(cur));
        let v = cur.0;
        let d_in = [prev.1[0] - prev.0[0], prev.1[1] - prev.0[1]];
        let d_out = [cur.1[0] - cur.0[0], cur.1[1] - cur.0[1]];
        let turn = (d_in[0] * d_out[1] - d_in[1] * d_out[0]) * side;
        if turn < -1e-15 {
            // convex toward the offset side: round join
            let a0 = n0[1].atan2(n0[0]);
            let mut a1 = n1[1].atan2(n1[0]);
            let dir = -side;
            while (a1 - a0) * dir < 0.0 {
                a1 += TAU * dir;
            }
            let sweep = a1 - a0;
            let k = ((sweep.abs() / (PI / 36.0)).ceil() as usize).max(1);
            for j in 0..=k {
                let a = a0 + sweep * j as f64 / k as f64;
                out.push([v[0] + gap * a.cos(), v[1] + gap * a.sin()]);
            }
        } else if turn > 1e-15 {
            // concave: meet the two offset lines
            let p = [v[0] + gap * n0[0], v[1] + gap * n0[1]];
            let q = [v[0] + gap * n1[0], v[1] + gap * n1[1]];
            let den = d_in[0] * d_out[1] - d_in[1] * d_out[0];
            let s = ((q[0] - p[0]) * d_out[1] - (q[1] - p[1]) * d_out[0]) / den;
            out.push([p[0] + s * d_in[0], p[1] + s * d_in[1]]);
        } else {
            out.push([v[0] + gap * n1[0], v[1] + gap * n1[1]]);
        }
    }
    if let Some(p) = curve.period {
        // keep one period starting where the input starts
        let x0 = curve.points[0][0] - 0.5 * p;
        for q in &mut out {
            q[0] = x0 + (q[0] - x0).rem_euclid(p);
        }
        out.sort_by(|a, b| a[0].total_cmp(&b[0]));
    }
    let result = Curve2 {
        points: out,
        period: curve.period,
    };
    let worst = result
        .points
        .iter()
        .map(|&q| curve.distance(q))
        .fold(f64::INFINITY, f64::min);
    if worst < gap - 1e-8 || result.self_intersects() {
        return Err(Error::OffsetTooLarge { gap });
    }
    Ok(result)
}
