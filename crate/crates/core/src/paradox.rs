//! Three same-handed helical screws on parallel axes that all turn the same
//! way yet stay in mesh.
//!
//! Each horizontal section is a three-tooth involute gear. Turning every
//! screw by the same angle is the same as sliding the whole arrangement
//! vertically, so contact is a property of the family of sections: two
//! copies of the section at the same orientation, a distance D apart, touch
//! iff D is at most the profile's width along that direction at some
//! height. The spacing is set just above the largest such width over all
//! orientations, where the touching boundaries have their common normal
//! along the line of centres.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::clearance::{approach, Collider, CoreHint};
use crate::error::{invalid, Error, Result};
use crate::geometry::{compose, rot_z, RigidMotion, Vec3};
use crate::mesh::{helical_sweep, TriMesh};
use crate::numeric::{bisect, brent_min};
use crate::profile::Curve2;

/// Involute of the base circle: u − atan u.
fn inv(u: f64) -> f64 {
    u - u.atan()
}

fn rotate2(p: [f64; 2], a: f64) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// Planar gear section with circle-involute flanks, 20° standard tooth
/// thickness, radial flanks below the base circle and rounded tip corners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvoluteProfile {
    pub base_radius: f64,
    pub tooth_count: usize,
    pub addendum_radius: f64,
    pub pressure_angle: f64,
    pub root_radius: f64,
    pub fillet_radius: f64,
    /// Involute parameter where a flank meets its tip fillet.
    pub flank_end: f64,
    pub curve: Curve2,
}

impl InvoluteProfile {
    pub fn pitch_radius(&self) -> f64 {
        self.base_radius / self.pressure_angle.cos()
    }

    /// Angular half-thickness of a tooth at the base circle.
    pub fn base_half_angle(&self) -> f64 {
        PI / (2.0 * self.tooth_count as f64) + inv(self.pressure_angle.tan())
    }

    /// Point at involute parameter `u` on the upper flank of the tooth
    /// centred on +x, with its outward unit normal.
    pub fn flank_point(&self, u: f64) -> ([f64; 2], [f64; 2]) {
        let th = self.base_half_angle() - inv(u);
        let r = self.base_radius * (1.0 + u * u).sqrt();
        let tangency = th - u.atan();
        (
            [r * th.cos(), r * th.sin()],
            [-tangency.sin(), tangency.cos()],
        )
    }
}

fn sample(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / n as f64)
}

/// Involute gear section with tip fillets of 0.15 module.
pub fn involute_profile(
    base_radius: f64,
    tooth_count: usize,
    addendum_radius: f64,
) -> Result<InvoluteProfile> {
    involute_profile_with_fillet(base_radius, tooth_count, addendum_radius, 0.15)
}

/// Involute gear section with tip fillets of `fillet` module.
pub fn involute_profile_with_fillet(
    base_radius: f64,
    tooth_count: usize,
    addendum_radius: f64,
    fillet: f64,
) -> Result<InvoluteProfile> {
    if !(base_radius > 0.0 && addendum_radius > base_radius) || tooth_count < 3 {
        return Err(invalid(
            "involute_profile",
            format!("need addendum radius > base radius > 0 and at least 3 teeth, got {base_radius}, {addendum_radius}, {tooth_count}"),
        ));
    }
    let pressure_angle = 20f64.to_radians();
    let mut p = InvoluteProfile {
        base_radius,
        tooth_count,
        addendum_radius,
        pressure_angle,
        root_radius: 0.0,
        fillet_radius: 0.0,
        flank_end: 0.0,
        curve: Curve2::closed(Vec::new()),
    };
    let n = tooth_count as f64;
    let module = 2.0 * p.pitch_radius() / n;
    p.root_radius = (p.pitch_radius() - 1.25 * module).max(0.05 * base_radius);
    if !(fillet > 0.0 && fillet < 0.5) {
        return Err(invalid(
            "involute_profile",
            format!("fillet {fillet} module outside (0, 0.5)"),
        ));
    }
    p.fillet_radius = fillet * module;
    let psi = p.base_half_angle();
    let ua = ((addendum_radius / base_radius).powi(2) - 1.0).sqrt();
    if psi - inv(ua) <= 0.0 {
        return Err(invalid(
            "involute_profile",
            "flanks cross below the addendum circle",
        ));
    }
    if p.root_radius >= base_radius || 2.0 * psi >= TAU / n {
        return Err(invalid(
            "involute_profile",
            "teeth leave no room at the root",
        ));
    }
    // fillet centre sits rc inside the flank and rc inside the tip circle
    let rc = p.fillet_radius;
    let centre = |u: f64| {
        let (q, nrm) = p.flank_point(u);
        [q[0] - rc * nrm[0], q[1] - rc * nrm[1]]
    };
    let fit = |u: f64| {
        let c = centre(u);
        c[0].hypot(c[1]) - (addendum_radius - rc)
    };
    let uf = bisect(fit, 0.0, ua, 1e-14)
        .ok_or_else(|| invalid("involute_profile", "tip fillet does not fit"))?;
    let c = centre(uf);
    p.flank_end = uf;
    let tip_angle = c[1].atan2(c[0]);
    if tip_angle <= 0.0 {
        return Err(invalid("involute_profile", "tip fillets overlap"));
    }
    let (_, nrm) = p.flank_point(uf);
    let a_flank = nrm[1].atan2(nrm[0]);

    // upper half of the tooth centred on +x, from tip centre down to the root
    let mut upper = Vec::new();
    for t in sample(0.0, tip_angle, 16) {
        upper.push([addendum_radius * t.cos(), addendum_radius * t.sin()]);
    }
    let mut a_tip = tip_angle;
    while a_tip > a_flank + PI {
        a_tip -= TAU;
    }
    while a_tip < a_flank - PI {
        a_tip += TAU;
    }
    for t in sample(a_tip, a_flank, 10) {
        upper.push([c[0] + rc * t.cos(), c[1] + rc * t.sin()]);
    }
    for k in 0..36 {
        // denser toward the tip, where the section's width peaks
        let w = 1.0 - k as f64 / 36.0;
        upper.push(p.flank_point(uf * w.sqrt()).0);
    }
    upper.push(p.flank_point(0.0).0);
    let root = [p.root_radius * psi.cos(), p.root_radius * psi.sin()];
    let base = upper[upper.len() - 1];
    for t in sample(0.0, 1.0, 3).skip(1) {
        upper.push([
            base[0] + (root[0] - base[0]) * t,
            base[1] + (root[1] - base[1]) * t,
        ]);
    }
    upper.push(root);

    let gap = TAU / n - 2.0 * psi;
    let mut tooth: Vec<[f64; 2]> = upper.iter().skip(1).rev().map(|q| [q[0], -q[1]]).collect();
    tooth.extend(upper);
    for t in sample(psi, psi + gap, 16).skip(1) {
        tooth.push([p.root_radius * t.cos(), p.root_radius * t.sin()]);
    }
    let mut points = Vec::with_capacity(tooth.len() * tooth_count);
    for k in 0..tooth_count {
        points.extend(tooth.iter().map(|&q| rotate2(q, TAU * k as f64 / n)));
    }
    p.curve = Curve2::closed(points);
    if p.curve.self_intersects() {
        return Err(invalid("involute_profile", "profile self-intersects"));
    }
    Ok(p)
}

/// Width of `points` along +x at height `y`.
fn width_at(points: &[[f64; 2]], y: f64) -> f64 {
    let n = points.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        if (a[1] - y) * (b[1] - y) > 0.0 {
            continue;
        }
        let x = if a[1] == b[1] {
            lo = lo.min(a[0].min(b[0]));
            hi = hi.max(a[0].max(b[0]));
            continue;
        } else {
            a[0] + (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1])
        };
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Centre spacing along +x at which two copies of the profile, both turned
/// by `angle`, first touch.
pub fn touch_distance(profile: &InvoluteProfile, angle: f64) -> f64 {
    let pts: Vec<[f64; 2]> = profile
        .curve
        .points
        .iter()
        .map(|&q| rotate2(q, angle))
        .collect();
    pts.iter().map(|q| width_at(&pts, q[1])).fold(0.0, f64::max)
}

/// Largest touching spacing over all orientations, and the angle in
/// [0, π/N) where it occurs.
pub fn critical_spacing(profile: &InvoluteProfile) -> (f64, f64) {
    // widths repeat every half tooth pitch: N-fold symmetry plus the half turn
    let period = PI / profile.tooth_count as f64;
    let n = 240;
    let step = period / n as f64;
    let best = (0..n)
        .map(|k| (k, touch_distance(profile, k as f64 * step)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let centre = best as f64 * step;
    let (a, d) = brent_min(
        |a| -touch_distance(profile, a),
        centre - step,
        centre + step,
        1e-12,
    );
    (-d, a.rem_euclid(period))
}

/// The three screws: identical, axes vertical through the corners of an
/// equilateral triangle centred on the z axis.
#[derive(Debug, Clone)]
pub struct ParadoxScrews {
    pub profile: InvoluteProfile,
    pub pitch: f64,
    pub height: f64,
    pub triangle_side: f64,
    pub centers: [Vec3; 3],
    /// Screw meshes in their rest positions.
    pub meshes: [TriMesh; 3],
}

impl ParadoxScrews {
    /// Screw `k` turned by `angle` about its own axis.
    pub fn motion(&self, k: usize, angle: f64) -> RigidMotion {
        let c = self.centers[k];
        compose(
            &RigidMotion::translation(c),
            &compose(&rot_z(angle), &RigidMotion::translation(c * -1.0)),
        )
    }

    pub fn colliders(&self) -> Result<Vec<Collider>> {
        (0..3)
            .map(|k| {
                let hint = CoreHint::Line {
                    point: self.centers[k],
                    direction: Vec3::new(0.0, 0.0, 1.0),
                    min_radius: self.profile.root_radius,
                    max_radius: self.profile.addendum_radius,
                };
                Collider::new(self.meshes[k].clone(), Some(hint))
            })
            .collect()
    }
}

/// Build the screws. Slices are spaced so the section turns a quarter
/// degree between them.
pub fn paradox_screws(
    profile: &InvoluteProfile,
    pitch: f64,
    height: f64,
    triangle_side: f64,
) -> Result<ParadoxScrews> {
    if !(pitch.is_finite() && pitch != 0.0 && height > 0.0) {
        return Err(invalid(
            "paradox_screws",
            "need a non-zero pitch and positive height",
        ));
    }
    let (touch, _) = critical_spacing(profile);
    if !(triangle_side > touch) {
        return Err(Error::InvalidSpacing {
            clearance: triangle_side - touch,
        });
    }
    let slices = ((height / pitch.abs()) * 1440.0 - 1e-9).ceil().max(1.0) as usize;
    let dz = height / slices as f64;
    let base = helical_sweep(&profile.curve.points, pitch, 0.0, dz, slices)?;
    let radius = triangle_side / 3f64.sqrt();
    let centers: [Vec3; 3] = std::array::from_fn(|k| {
        let a = TAU * k as f64 / 3.0;
        Vec3::new(radius * a.cos(), radius * a.sin(), 0.0)
    });
    // rotate copies about the triangle centre so the three are congruent
    let meshes = std::array::from_fn(|k| {
        let placed = base.transformed(&RigidMotion::translation(centers[0]));
        placed.transformed(&rot_z(TAU * k as f64 / 3.0))
    });
    Ok(ParadoxScrews {
        profile: profile.clone(),
        pitch,
        height,
        triangle_side,
        centers,
        meshes,
    })
}

/// Closest approach of screws 0 and 1 at one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactNormal {
    pub phase: f64,
    /// Angle between the common normal and the line of centres, degrees.
    pub angle_deg: f64,
    pub clearance: f64,
    /// Horizontal distance of the contact from the line of centres.
    pub offset: f64,
}

/// Contact normals with screw `k` turned by `directions[k]·phase`.
pub fn contact_normal_report(
    screws: &ParadoxScrews,
    phases: &[f64],
    directions: [f64; 3],
    threshold: f64,
) -> Result<Vec<ContactNormal>> {
    let cols = screws.colliders()?;
    let (c0, c1) = (screws.centers[0], screws.centers[1]);
    let line = (c1 - c0)
        .normalized()
        .ok_or_else(|| invalid("contact_normal_report", "coincident axes"))?;
    phases
        .iter()
        .map(|&phase| {
            let m0 = screws.motion(0, directions[0] * phase);
            let m1 = screws.motion(1, directions[1] * phase);
            let a = approach(&cols[0], &m0, &cols[1], &m1);
            if a.clearance > threshold {
                return Err(Error::NoContact { phase, threshold });
            }
            let n = (a.surface - a.vertex).normalized().unwrap_or(line);
            let cos = n.dot(line).abs().min(1.0);
            let mid = (a.surface + a.vertex) * 0.5 - c0;
            let along = Vec3::new(mid.x, mid.y, 0.0);
            let offset = (along - line * along.dot(line)).norm();
            Ok(ContactNormal {
                phase,
                angle_deg: cos.acos().to_degrees(),
                clearance: a.clearance,
                offset,
            })
        })
        .collect()
}

/// Minimum pairwise clearance of the three screws with screw `k` turned by
/// `directions[k]·phase`, at each phase.
pub fn screw_clearance(
    screws: &ParadoxScrews,
    phases: &[f64],
    directions: [f64; 3],
) -> Result<Vec<f64>> {
    let cols = screws.colliders()?;
    Ok(phases
        .iter()
        .map(|&phase| {
            let m: Vec<RigidMotion> = (0..3)
                .map(|k| screws.motion(k, directions[k] * phase))
                .collect();
            [(0, 1), (1, 2), (2, 0)]
                .iter()
                .map(|&(i, j)| approach(&cols[i], &m[i], &cols[j], &m[j]).clearance)
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Closest points of two disjoint planar polygons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarContact {
    pub gap: f64,
    pub on_a: [f64; 2],
    pub on_b: [f64; 2],
}

fn closest_on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l = d[0] * d[0] + d[1] * d[1];
    let t = if l > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l).clamp(0.0, 1.0)
    } else {
        0.0
    };
    [a[0] + d[0] * t, a[1] + d[1] * t]
}

pub fn planar_contact(a: &[[f64; 2]], b: &[[f64; 2]]) -> PlanarContact {
    let mut best = PlanarContact {
        gap: f64::INFINITY,
        on_a: a[0],
        on_b: b[0],
    };
    let mut test = |p: [f64; 2], s0: [f64; 2], s1: [f64; 2], p_on_a: bool| {
        let q = closest_on_segment(p, s0, s1);
        let d = (p[0] - q[0]).hypot(p[1] - q[1]);
        if d < best.gap {
            best = if p_on_a {
                PlanarContact {
                    gap: d,
                    on_a: p,
                    on_b: q,
                }
            } else {
                PlanarContact {
                    gap: d,
                    on_a: q,
                    on_b: p,
                }
            };
        }
    };
    for (polys, first) in [((a, b), true), ((b, a), false)] {
        let (from, to) = polys;
        for &p in from {
            for i in 0..to.len() {
                test(p, to[i], to[(i + 1) % to.len()], first);
            }
        }
    }
    best
}

/// Contact normals of an ordinary external pair: two copies of `profile`
/// at the standard centre distance plus `backlash`, turning in opposite
/// directions.
pub fn conventional_pair_report(
    profile: &InvoluteProfile,
    phases: &[f64],
    backlash: f64,
) -> Vec<ContactNormal> {
    let dist = 2.0 * profile.pitch_radius() + backlash;
    let half = PI / profile.tooth_count as f64;
    phases
        .iter()
        .map(|&phase| {
            let a: Vec<[f64; 2]> = profile
                .curve
                .points
                .iter()
                .map(|&q| rotate2(q, phase))
                .collect();
            let b: Vec<[f64; 2]> = profile
                .curve
                .points
                .iter()
                .map(|&q| {
                    let r = rotate2(q, PI + half - phase);
                    [r[0] + dist, r[1]]
                })
                .collect();
            let c = planar_contact(&a, &b);
            let d = [c.on_b[0] - c.on_a[0], c.on_b[1] - c.on_a[1]];
            let cos = (d[0] / c.gap).abs().min(1.0);
            let mid_y = 0.5 * (c.on_a[1] + c.on_b[1]);
            ContactNormal {
                phase,
                angle_deg: cos.acos().to_degrees(),
                clearance: c.gap,
                offset: mid_y.abs(),
            }
        })
        .collect()
}
