//! Ring movements, relative motions and the group-law test.

use serde::{Deserialize, Serialize};

use crate::clearance::{self, ClearanceSample, Collider, MovingBody};
use crate::design::DesignConfig;
use crate::error::{invalid, Result};
use crate::geometry::{compose, rotation_about_axis, RigidMotion, Vec3};

/// Every ring spins about its own core axis; the symmetric design uses one
/// common speed. `phase` shifts a ring's angle (used to probe backlash).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompoundMovement {
    pub centers: [Vec3; 3],
    pub normals: [Vec3; 3],
    pub omega: [f64; 3],
    pub phase: [f64; 3],
}

impl CompoundMovement {
    pub fn uniform(cfg: &DesignConfig, omega: f64) -> CompoundMovement {
        CompoundMovement {
            centers: cfg.circles.map(|c| c.center),
            normals: cfg.circles.map(|c| c.normal()),
            omega: [omega; 3],
            phase: [0.0; 3],
        }
    }

    pub fn with_phase(mut self, ring: usize, phase: f64) -> CompoundMovement {
        self.phase[ring] = phase;
        self
    }

    pub fn motion(&self, ring: usize, t: f64) -> RigidMotion {
        rotation_about_axis(
            self.centers[ring],
            self.normals[ring],
            self.omega[ring] * t + self.phase[ring],
        )
        .expect("core normals are unit vectors")
    }
}

/// Rotation of ring `ring` about its core axis by `omega·t`.
pub fn ring_movement(cfg: &DesignConfig, ring: usize, omega: f64, t: f64) -> RigidMotion {
    CompoundMovement::uniform(cfg, omega).motion(ring, t)
}

/// Motion of ring `b` seen from ring `a`.
pub fn relative_motion(cfg: &DesignConfig, a: usize, b: usize, omega: f64, t: f64) -> RigidMotion {
    compose(
        &ring_movement(cfg, a, omega, t).inverse(),
        &ring_movement(cfg, b, omega, t),
    )
}

/// Motions sampled on a uniform time grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionTrace {
    pub times: Vec<f64>,
    pub motions: Vec<RigidMotion>,
}

impl MotionTrace {
    pub fn sample(horizon: f64, samples: usize, f: impl Fn(f64) -> RigidMotion) -> MotionTrace {
        let times: Vec<f64> = (0..samples)
            .map(|i| horizon * i as f64 / (samples - 1) as f64)
            .collect();
        let motions = times.iter().map(|&t| f(t)).collect();
        MotionTrace { times, motions }
    }
}

/// Largest `‖g(s+t) − g(s)∘g(t)‖` over grid pairs with `s + t` on the grid.
pub fn group_law_residual(trace: &MotionTrace) -> Result<(f64, f64, f64)> {
    let n = trace.times.len();
    if n < 64 || trace.motions.len() != n {
        return Err(invalid(
            "is_simple",
            format!("need at least 64 samples, got {n}"),
        ));
    }
    let h = trace.times[1] - trace.times[0];
    let uniform = trace
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !(h > 0.0) || !uniform || trace.times[0].abs() > 1e-12 {
        return Err(invalid(
            "is_simple",
            "times must form a uniform grid starting at 0",
        ));
    }
    let mut worst = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n - i {
            let r = trace.motions[i + j].distance(&compose(&trace.motions[i], &trace.motions[j]));
            if r > worst.0 {
                worst = (r, trace.times[i], trace.times[j]);
            }
        }
    }
    Ok(worst)
}

/// Whether the sampled movement obeys `g(s+t) = g(s)∘g(t)` within `tol`.
pub fn is_simple(trace: &MotionTrace, tol: f64) -> Result<bool> {
    Ok(group_law_residual(trace)?.0 < tol)
}

/// Path of point `p` of ring `a` in the frame of ring `b`.
pub fn trace_point(
    p: Vec3,
    cfg: &DesignConfig,
    a: usize,
    b: usize,
    omega: f64,
    times: &[f64],
) -> Vec<Vec3> {
    times
        .iter()
        .map(|&t| relative_motion(cfg, b, a, omega, t).apply(p))
        .collect()
}

/// Sample instants of one full revolution.
pub fn cycle_times(omega: f64, steps: usize) -> Vec<f64> {
    let period = std::f64::consts::TAU / omega.abs();
    (0..steps)
        .map(|k| period * k as f64 / steps as f64)
        .collect()
}

/// Clearance between two ring meshes over one revolution: the minimum and
/// the instant at which it occurs.
pub fn min_clearance(
    mesh_a: &Collider,
    mesh_b: &Collider,
    ring_a: usize,
    ring_b: usize,
    movement: &CompoundMovement,
    steps: usize,
) -> Result<(f64, f64)> {
    if steps < 36 {
        return Err(invalid(
            "min_clearance",
            format!("need at least 36 steps, got {steps}"),
        ));
    }
    let bodies = [
        MovingBody {
            collider: mesh_a,
            motion: Box::new(move |t| movement.motion(ring_a, t)),
        },
        MovingBody {
            collider: mesh_b,
            motion: Box::new(move |t| movement.motion(ring_b, t)),
        },
    ];
    let samples = clearance::sweep(
        &bodies,
        &[(0, 1)],
        &cycle_times(movement.omega[ring_a], steps),
    );
    let m = clearance::minimum(&samples).expect("steps > 0");
    Ok((m.approach.clearance, m.time))
}

/// Clearance of all three ring pairs over one revolution; `gears[i]` is the
/// mesh of ring `i` in its rest position.
pub fn ring_sweep(
    gears: &[Collider; 3],
    movement: &CompoundMovement,
    steps: usize,
) -> Result<Vec<ClearanceSample>> {
    if steps < 36 {
        return Err(invalid(
            "ring_sweep",
            format!("need at least 36 steps, got {steps}"),
        ));
    }
    let bodies: Vec<MovingBody> = (0..3)
        .map(|i| MovingBody {
            collider: &gears[i],
            motion: Box::new(move |t| movement.motion(i, t)),
        })
        .collect();
    Ok(clearance::sweep(
        &bodies,
        &[(0, 1), (1, 2), (2, 0)],
        &cycle_times(movement.omega[0], steps),
    ))
}
