//! Three-fold symmetric ring placement and its thickness optimisation.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{circle_circle_distance, DistanceResult, DEFAULT_TOL};
use crate::error::{invalid, Error, Result};
use crate::geometry::{chart_coords, rot_z, wrap_angle, Circle3, TorusCoords, TorusSpec, Vec3};
use crate::linking::{disk_crossings, TOUCH_TOL};

/// Restart seeds used by [`maximize_thickness`] besides the initial point.
pub const RESTARTS: usize = 8;
const SEED: u64 = 0x7269_6e67;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricParams {
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
}

impl SymmetricParams {
    pub fn new(r: f64, phi: f64, theta: f64) -> Self {
        SymmetricParams { r, phi, theta }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.r, self.phi, self.theta]
    }
}

/// Optimised design: the three core circles and the ring thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    pub params: SymmetricParams,
    pub thickness: f64,
    pub circles: [Circle3; 3],
    /// Contact points of ring 0 with its neighbours, sorted by α.
    pub contacts: Vec<TorusCoords>,
    /// Minimum core–core distance; twice the thickness.
    pub objective: f64,
}

impl DesignConfig {
    /// Config for given parameters, without contacts.
    pub fn from_params(params: SymmetricParams) -> Result<DesignConfig> {
        let objective = objective(&params)?;
        if !objective.is_finite() {
            return Err(invalid("DesignConfig::from_params", "rings are not linked"));
        }
        Ok(DesignConfig {
            params,
            thickness: objective / 2.0,
            circles: symmetric_config(&params),
            contacts: Vec::new(),
            objective,
        })
    }

    pub fn torus(&self, ring: usize) -> TorusSpec {
        TorusSpec {
            core: self.circles[ring],
            tube_radius: self.thickness,
        }
    }
}

/// Circle 0 centred at (r, 0, 0) with frame U = (cos φ, sin φ, 0),
/// V = (−sin φ sin θ, cos φ sin θ, cos θ); circles 1, 2 are its rotates by
/// 2π/3 and 4π/3 about z.
pub fn symmetric_config(p: &SymmetricParams) -> [Circle3; 3] {
    let (sp, cp) = p.phi.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    let first = Circle3 {
        center: Vec3::new(p.r, 0.0, 0.0),
        u_axis: Vec3::new(cp, sp, 0.0),
        v_axis: Vec3::new(-sp * st, cp * st, ct),
        radius: 1.0,
    };
    let g = rot_z(TAU / 3.0);
    let second = first.transformed(&g);
    let third = second.transformed(&g);
    [first, second, third]
}

/// Minimum distance between neighbouring core circles, or −∞ when the
/// rings are not linked.
pub fn objective(p: &SymmetricParams) -> Result<f64> {
    Ok(pair_distance(p)?.map_or(f64::NEG_INFINITY, |d| d.distance))
}

fn pair_distance(p: &SymmetricParams) -> Result<Option<DistanceResult>> {
    if !(p.r > 0.0) {
        return Ok(None);
    }
    let [a, b, _] = symmetric_config(p);
    let d = circle_circle_distance(&a, &b, DEFAULT_TOL)?;
    if d.distance < TOUCH_TOL {
        return Err(Error::NearSingular {
            distance: d.distance,
        });
    }
    match disk_crossings(&a, &b, 1e-12) {
        Some(0) => Ok(None),
        Some(_) => Ok(Some(d)),
        None => Err(Error::NearSingular {
            distance: d.distance,
        }),
    }
}

fn score(x: &[f64; 3]) -> f64 {
    objective(&SymmetricParams::new(x[0], x[1], x[2])).unwrap_or(f64::NEG_INFINITY)
}

/// Hooke–Jeeves pattern search (maximisation) with step halving.
fn pattern_search(start: [f64; 3], free: [bool; 3], step0: f64, tol: f64) -> ([f64; 3], f64) {
    let mut base = start;
    let mut fbase = score(&base);
    let mut step = step0;
    let explore = |x: [f64; 3], fx: f64, step: f64| {
        let (mut x, mut fx) = (x, fx);
        for k in 0..3 {
            if !free[k] {
                continue;
            }
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[k] += dir * step;
                let fy = score(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    break;
                }
            }
        }
        (x, fx)
    };
    let mut evals = 0usize;
    while step > tol && evals < 200_000 {
        let (x, fx) = explore(base, fbase, step);
        evals += 6;
        if fx > fbase {
            // pattern moves along the improving direction
            let (mut prev, mut cur, mut fcur) = (base, x, fx);
            loop {
                let probe = [
                    2.0 * cur[0] - prev[0],
                    2.0 * cur[1] - prev[1],
                    2.0 * cur[2] - prev[2],
                ];
                let fp = score(&probe);
                let (y, fy) = explore(probe, fp, step);
                evals += 7;
                if fy > fcur {
                    prev = cur;
                    cur = y;
                    fcur = fy;
                } else {
                    break;
                }
            }
            base = cur;
            fbase = fcur;
        } else {
            step *= 0.5;
        }
    }
    (base, fbase)
}

/// Maximise the ring thickness by derivative-free search from `init` and
/// [`RESTARTS`] perturbed seeds; returns the best local maximum with its
/// contact points.
pub fn maximize_thickness(
    init: SymmetricParams,
    fix_phi_zero: bool,
    tol: f64,
) -> Result<DesignConfig> {
    if !(tol > 0.0) {
        return Err(invalid(
            "maximize_thickness",
            format!("tol must be positive, got {tol}"),
        ));
    }
    let mut start = init.as_array();
    if fix_phi_zero {
        start[1] = 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut seeds = vec![start];
    for _ in 0..RESTARTS {
        let mut s = start;
        s[0] *= 1.0 + rng.gen_range(-0.05..0.05);
        if !fix_phi_zero {
            s[1] += rng.gen_range(-0.05..0.05);
        }
        s[2] += rng.gen_range(-0.05..0.05);
        seeds.push(s);
    }
    let free = [true, !fix_phi_zero, true];
    let runs: Vec<([f64; 3], f64)> = seeds
        .par_iter()
        .filter(|s| score(s).is_finite())
        .map(|s| pattern_search(*s, free, 0.05, tol))
        .collect();
    let best = runs
        .into_iter()
        .filter(|r| r.1.is_finite())
        .max_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then_with(|| b.0.partial_cmp(&a.0).unwrap())
        })
        .ok_or(Error::Infeasible)?;
    let x = best.0;
    let params = SymmetricParams::new(x[0], wrap_angle(x[1]), wrap_angle(x[2]));
    let mut cfg = DesignConfig::from_params(params)?;
    cfg.contacts = contact_points(&cfg)?;
    Ok(cfg)
}

/// The four points where ring 0's torus touches its neighbours, sorted by α.
pub fn contact_points(cfg: &DesignConfig) -> Result<Vec<TorusCoords>> {
    let core = cfg.circles[0];
    let mut out = Vec::with_capacity(4);
    for ring in 1..3 {
        let d = circle_circle_distance(&core, &cfg.circles[ring], DEFAULT_TOL)?;
        if d.degenerate || d.multiplicity != 2 {
            return Err(Error::ContactCount {
                ring,
                found: d.multiplicity,
            });
        }
        for &(sa, sb) in &d.minimizers {
            let mid = (core.point(sa) + cfg.circles[ring].point(sb)) * 0.5;
            let (alpha, beta, _) = chart_coords(&core, mid);
            out.push(TorusCoords::new(alpha, beta));
        }
    }
    out.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_parameters() {
        let c = symmetric_config(&SymmetricParams::new(0.7, 0.0, 0.0));
        assert!(c[0].u_axis.dist(Vec3::X) < 1e-15 && c[0].v_axis.dist(Vec3::Z) < 1e-15);
        assert!(c[0].center.dist(Vec3::new(0.7, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn rotation_permutes_circles() {
        let c = symmetric_config(&SymmetricParams::new(0.5, 0.3, -0.7));
        let g = rot_z(TAU / 3.0);
        for i in 0..3 {
            let m = c[i].transformed(&g);
            let n = c[(i + 1) % 3];
            assert!(m.center.dist(n.center) < 1e-12);
            assert!(m.u_axis.dist(n.u_axis) < 1e-12 && m.v_axis.dist(n.v_axis) < 1e-12);
        }
    }

    #[test]
    fn unlinked_is_rejected() {
        // far from the axis the rings are disjoint and unlinked
        assert_eq!(
            objective(&SymmetricParams::new(3.0, 0.0, 0.0)).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(
            objective(&SymmetricParams::new(-1.0, 0.0, 0.0)).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn reflection_and_period() {
        let p = SymmetricParams::new(0.52, 0.11, -0.83);
        let a = objective(&p).unwrap();
        let b = objective(&SymmetricParams::new(0.52, -0.11, 0.83)).unwrap();
        let c = objective(&SymmetricParams::new(
            0.52,
            0.11,
            -0.83 + std::f64::consts::PI,
        ))
        .unwrap();
        assert!(a.is_finite());
        assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
    }

    #[test]
    fn infeasible_start() {
        let r = maximize_thickness(SymmetricParams::new(5.0, 0.0, 0.0), true, 1e-8);
        assert!(matches!(r, Err(Error::Infeasible)));
    }
}
