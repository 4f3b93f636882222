//! Helical drive axle along the symmetry axis of the triple gear.
//!
//! The axle turns about +z at `speed_ratio` times the gear speed while the gears turn about their
//! own cores. Its solid is invariant under the screw motion of its pitch, so
//! one transverse section describes it: a point (r, ψ, z) of the axle frame
//! lies inside iff r < s(ψ − 2πz/pitch).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::carving::GearSolid;
use crate::design::DesignConfig;
use crate::error::{invalid, Error, Result};
use crate::geometry::{rot_z, RigidMotion, Vec3};
use crate::kinematics::ring_movement;
use crate::mesh::{helical_sweep, validate, TriMesh};
use crate::numeric::brent_min;
use crate::profile::Curve2;

/// Screw axle parameters; `cross_section` is filled in by carving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxleSpec {
    /// Number of thread starts.
    pub starts: usize,
    /// Signed axle speed over gear speed.
    pub speed_ratio: f64,
    /// Axial advance per turn; negative for a left-handed thread.
    pub pitch: f64,
    pub outer_radius: f64,
    /// Clearance left between axle and gear teeth.
    pub gap: f64,
    pub length: f64,
    /// Height of the axle's midpoint.
    pub center_z: f64,
    pub cross_section: Option<Curve2>,
}

/// Parameter and distance of the point of core circle 0 nearest the z axis.
fn nearest_to_axis(cfg: &DesignConfig) -> (f64, f64) {
    let core = cfg.circles[0];
    let radial = |s: f64| {
        let p = core.point(s);
        p.x.hypot(p.y)
    };
    let n = 720;
    let step = TAU / n as f64;
    let k = (0..n)
        .min_by(|&a, &b| radial(step * a as f64).total_cmp(&radial(step * b as f64)))
        .unwrap_or(0);
    let s = step * k as f64;
    brent_min(radial, s - step, s + step, 1e-12)
}

/// Radius of the central hole left by the gears' tooth roots.
pub fn hole_radius(cfg: &DesignConfig, gear: &GearSolid) -> f64 {
    nearest_to_axis(cfg).1 - (gear.field.pitch_radius - gear.spec.profile.dedendum)
}

/// Axle speed at which `starts` thread starts pass one gear tooth per start.
pub fn axle_speed(omega_gear: f64, tooth_count: usize, starts: usize) -> f64 {
    omega_gear * tooth_count as f64 / starts as f64
}

/// Angular speed about z, and axial speed, of the gear point at distance
/// `depth` from the core on the side facing the axle.
fn swirl(cfg: &DesignConfig, depth: f64, omega_gear: f64) -> Result<(f64, f64)> {
    let core = cfg.circles[0];
    let c = core.point(nearest_to_axis(cfg).0);
    let inward = Vec3::new(-c.x, -c.y, 0.0)
        .normalized()
        .ok_or_else(|| invalid("matched_pitch", "core circle meets the axis"))?;
    let q = c + inward * depth;
    let v = core.normal().cross(q - core.center) * omega_gear;
    let r2 = q.x * q.x + q.y * q.y;
    Ok(((q.x * v.y - q.y * v.x) / r2, v.z))
}

/// Pitch that lets the gear point at distance `depth` from the core, on the
/// side facing the axle, slide along the thread without crossing it.
pub fn matched_pitch(
    cfg: &DesignConfig,
    depth: f64,
    omega_gear: f64,
    omega_axle: f64,
) -> Result<f64> {
    let (spin, vz) = swirl(cfg, depth, omega_gear)?;
    let rel = spin - omega_axle;
    if rel.abs() < 1e-9 || vz.abs() < 1e-12 {
        return Err(invalid(
            "matched_pitch",
            "no screw matches the gear motion at this speed",
        ));
    }
    Ok(TAU * vz / rel)
}

impl AxleSpec {
    /// Three starts, turning the way the teeth sweep past the axis, pitch
    /// matched at the tooth roots, radius just short of them.
    pub fn for_gear(cfg: &DesignConfig, gear: &GearSolid) -> Result<AxleSpec> {
        let starts = 3;
        let root = gear.field.pitch_radius - gear.spec.profile.dedendum;
        let (spin, _) = swirl(cfg, root, 1.0)?;
        let speed_ratio = spin.signum() * axle_speed(1.0, gear.spec.profile.tooth_count, starts);
        let gap = gear.spec.gap;
        let (lo, hi) = gear.mesh.bounds();
        Ok(AxleSpec {
            starts,
            speed_ratio,
            pitch: matched_pitch(cfg, root, 1.0, speed_ratio)?,
            outer_radius: hole_radius(cfg, gear) - gap,
            gap,
            length: 2.0 * lo.z.abs().max(hi.z.abs()) + 0.6,
            center_z: 0.0,
            cross_section: None,
        })
    }

    fn check(&self) -> Result<()> {
        let ok = self.starts >= 1
            && self.speed_ratio.is_finite()
            && self.pitch.is_finite()
            && self.pitch != 0.0
            && self.outer_radius > 0.0
            && self.gap >= 0.0
            && self.length > 0.0;
        if !ok {
            return Err(invalid(
                "axle",
                "axle spec needs starts ≥ 1, non-zero pitch and positive sizes",
            ));
        }
        Ok(())
    }

    /// Rigid placement of the axle at time `t` when the gears turn at `omega_gear`.
    pub fn motion(&self, omega_gear: f64, t: f64) -> RigidMotion {
        rot_z(self.speed_ratio * omega_gear * t)
    }
}

fn gear_samples(mesh: &TriMesh, keep: impl Fn(Vec3) -> bool) -> Vec<Vec3> {
    const SUB: usize = 4;
    let mut out = Vec::new();
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.corners(t);
        if !(keep(a) || keep(b) || keep(c)) {
            continue;
        }
        for i in 0..=SUB {
            for j in 0..=SUB - i {
                let (u, v) = (i as f64 / SUB as f64, j as f64 / SUB as f64);
                out.push(a + (b - a) * u + (c - a) * v);
            }
        }
    }
    out
}

/// Section of the largest axle that never meets the turning gears: sweeps
/// the gear surfaces over one tooth period (`steps` instants) into the
/// axle frame and keeps, per screw-identified direction, the smallest
/// radius reached, less the gap.
pub fn carve_axle_section(
    cfg: &DesignConfig,
    gear: &GearSolid,
    seed: &AxleSpec,
    omega_gear: f64,
    omega_axle: f64,
    steps: usize,
) -> Result<Curve2> {
    seed.check()?;
    if steps < 360 {
        return Err(invalid(
            "carve_axle_section",
            format!("need at least 360 steps, got {steps}"),
        ));
    }
    let hole = hole_radius(cfg, gear);
    if seed.outer_radius >= hole {
        return Err(Error::AxleImpossible(format!(
            "radius {} does not fit the central hole of radius {hole}",
            seed.outer_radius
        )));
    }
    let n = gear.spec.profile.tooth_count;
    let period = TAU / (omega_gear.abs() * n as f64);
    // the sweep folds one tooth period onto the thread's symmetry
    let turns = omega_axle * period * seed.starts as f64 / TAU;
    if turns.round() == 0.0 || (turns - turns.round()).abs() > 1e-9 {
        return Err(invalid(
            "carve_axle_section",
            "axle must advance a whole number of starts per gear tooth",
        ));
    }
    let times: Vec<f64> = (0..steps)
        .map(|k| period * k as f64 / steps as f64)
        .collect();
    let sector = TAU / seed.starts as f64;
    let bins = 240;
    let reach = seed.outer_radius + seed.gap + 0.02;
    let mut best = vec![f64::INFINITY; bins];

    for ring in 0..3 {
        let mesh = gear.mesh.transformed(&rot_z(ring as f64 * TAU / 3.0));
        let coarse: Vec<RigidMotion> = times
            .iter()
            .step_by(steps / 12)
            .map(|&t| ring_movement(cfg, ring, omega_gear, t))
            .collect();
        // the slack covers travel between coarse instants
        let slack = 0.1;
        let near = |p: Vec3| {
            coarse.iter().any(|m| {
                let q = m.apply(p);
                q.x.hypot(q.y) < reach + slack
            })
        };
        let pts = gear_samples(&mesh, near);
        for &t in &times {
            let m = ring_movement(cfg, ring, omega_gear, t);
            for &p in &pts {
                let q = m.apply(p);
                let r = q.x.hypot(q.y);
                if r > reach {
                    continue;
                }
                let psi = q.y.atan2(q.x) - omega_axle * t - TAU * q.z / seed.pitch;
                let b = (psi.rem_euclid(sector) / sector * bins as f64) as usize % bins;
                for k in [bins - 1, 0, 1] {
                    let slot = &mut best[(b + k) % bins];
                    *slot = slot.min(r);
                }
            }
        }
    }
    let radii: Vec<f64> = best
        .iter()
        .map(|&r| (r - seed.gap).min(seed.outer_radius))
        .collect();
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    if lo <= 0.0 {
        return Err(Error::AxleImpossible("gear teeth reach the axis".into()));
    }
    let total = bins * seed.starts;
    let points = (0..total)
        .map(|j| {
            let psi = TAU * j as f64 / total as f64;
            let r = radii[j % bins];
            [r * psi.cos(), r * psi.sin()]
        })
        .collect();
    Ok(Curve2::closed(points))
}

/// Solid swept by `section` along the screw motion of `spec.pitch`, capped
/// at both ends.
pub fn axle_mesh(section: &Curve2, spec: &AxleSpec, slice_step: f64) -> Result<TriMesh> {
    spec.check()?;
    if section.points.len() < 3 || section.period.is_some() || section.self_intersects() {
        return Err(invalid(
            "axle_mesh",
            "section must be a simple closed polygon",
        ));
    }
    if !(slice_step > 0.0) {
        return Err(invalid("axle_mesh", "slice step must be positive"));
    }
    let slices = (spec.length / slice_step).round().max(1.0) as usize;
    let z0 = spec.center_z - 0.5 * slices as f64 * slice_step;
    let mesh = helical_sweep(&section.points, spec.pitch, z0, slice_step, slices)?;
    if !validate(&mesh).watertight {
        return Err(Error::NonWatertight {
            op: "axle_mesh",
            edges: mesh.boundary_edges(),
        });
    }
    Ok(mesh)
}
