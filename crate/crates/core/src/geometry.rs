//! Vectors, rigid motions, circles and the torus chart.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const X: Vec3 = Vec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: Vec3 = Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Vec3 {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    /// Any unit vector orthogonal to `self` (which must be non-zero).
    pub fn any_orthogonal(self) -> Vec3 {
        let a = if self.x.abs() < 0.6 { Vec3::X } else { Vec3::Y };
        self.cross(a).normalized().unwrap_or(Vec3::Z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_cols(a: Vec3, b: Vec3, c: Vec3) -> Mat3 {
        Mat3([[a.x, b.x, c.x], [a.y, b.y, c.y], [a.z, b.z, c.z]])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn mul_mat(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn frobenius_dist(&self, o: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = self.0[i][j] - o.0[i][j];
                s += d * d;
            }
        }
        s.sqrt()
    }

    /// Largest deviation of `MᵀM` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let p = self.transpose().mul_mat(self);
        let mut e: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                e = e.max((p.0[i][j] - want).abs());
            }
        }
        e
    }

    fn inverse(&self) -> Option<Mat3> {
        let d = self.det();
        if d.abs() < 1e-300 {
            return None;
        }
        let m = &self.0;
        let c = |a: usize, b: usize, c: usize, e: usize| m[a][b] * m[c][e] - m[a][e] * m[c][b];
        let adj = [
            [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
            [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
            [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
        ];
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = adj[i][j] / d;
            }
        }
        Some(Mat3(r))
    }

    /// Orthogonal polar factor, by Newton iteration `R <- (R + R^-T)/2`.
    pub fn polar_rotation(&self) -> Mat3 {
        let mut r = *self;
        for _ in 0..20 {
            let Some(inv) = r.inverse() else { break };
            let it = inv.transpose();
            let mut next = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    next[i][j] = 0.5 * (r.0[i][j] + it.0[i][j]);
                }
            }
            let next = Mat3(next);
            let step = next.frobenius_dist(&r);
            r = next;
            if step < 1e-16 {
                break;
            }
        }
        r
    }
}

/// Orientation preserving isometry `x -> R x + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Default for RigidMotion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl RigidMotion {
    pub const IDENTITY: RigidMotion = RigidMotion {
        rotation: Mat3::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn translation(t: Vec3) -> RigidMotion {
        RigidMotion {
            rotation: Mat3::IDENTITY,
            translation: t,
        }
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation.mul_vec(p) + self.translation
    }

    pub fn apply_vector(&self, v: Vec3) -> Vec3 {
        self.rotation.mul_vec(v)
    }

    pub fn inverse(&self) -> RigidMotion {
        let rt = self.rotation.transpose();
        RigidMotion {
            rotation: rt,
            translation: -rt.mul_vec(self.translation),
        }
    }

    /// Operator distance: max of the rotation Frobenius difference and the
    /// translation difference.
    pub fn distance(&self, o: &RigidMotion) -> f64 {
        self.rotation
            .frobenius_dist(&o.rotation)
            .max(self.translation.dist(o.translation))
    }

    pub fn is_valid(&self) -> bool {
        self.rotation.orthonormality_error() < 1e-12
            && (self.rotation.det() - 1.0).abs() < 1e-12
            && self.translation.is_finite()
    }
}

/// `outer ∘ inner`: apply `inner` first, then `outer`.
pub fn compose(outer: &RigidMotion, inner: &RigidMotion) -> RigidMotion {
    let mut rotation = outer.rotation.mul_mat(&inner.rotation);
    if rotation.orthonormality_error() > 1e-12 {
        rotation = rotation.polar_rotation();
    }
    RigidMotion {
        rotation,
        translation: outer.rotation.mul_vec(inner.translation) + outer.translation,
    }
}

fn rotation_matrix(d: Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let k = 1.0 - c;
    Mat3([
        [
            c + d.x * d.x * k,
            d.x * d.y * k - d.z * s,
            d.x * d.z * k + d.y * s,
        ],
        [
            d.y * d.x * k + d.z * s,
            c + d.y * d.y * k,
            d.y * d.z * k - d.x * s,
        ],
        [
            d.z * d.x * k - d.y * s,
            d.z * d.y * k + d.x * s,
            c + d.z * d.z * k,
        ],
    ])
}

fn unit_direction(op: &'static str, direction: Vec3) -> Result<Vec3> {
    let n = direction.norm();
    if !(n > 1e-12 && n.is_finite()) {
        return Err(invalid(op, "axis direction is zero"));
    }
    Ok(direction / n)
}

/// Right-handed rotation by `angle` about the line through `point` along
/// `direction`. The direction is normalised; a zero direction is rejected.
pub fn rotation_about_axis(point: Vec3, direction: Vec3, angle: f64) -> Result<RigidMotion> {
    screw_motion(point, direction, angle, 0.0).map_err(|e| match e {
        Error::InvalidInput { msg, .. } => invalid("rotation_about_axis", msg),
        e => e,
    })
}

/// Rotation about the axis followed by a translation of `advance` along it.
pub fn screw_motion(point: Vec3, direction: Vec3, angle: f64, advance: f64) -> Result<RigidMotion> {
    let d = unit_direction("screw_motion", direction)?;
    let rotation = rotation_matrix(d, angle);
    let translation = point - rotation.mul_vec(point) + d * advance;
    Ok(RigidMotion {
        rotation,
        translation,
    })
}

/// Rotation about the z axis through the origin.
pub fn rot_z(angle: f64) -> RigidMotion {
    RigidMotion {
        rotation: rotation_matrix(Vec3::Z, angle),
        translation: Vec3::ZERO,
    }
}

/// Normalise an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle3 {
    pub center: Vec3,
    pub u_axis: Vec3,
    pub v_axis: Vec3,
    pub radius: f64,
}

impl Circle3 {
    pub fn new(center: Vec3, u_axis: Vec3, v_axis: Vec3, radius: f64) -> Result<Circle3> {
        let c = Circle3 {
            center,
            u_axis,
            v_axis,
            radius,
        };
        if !c.is_valid() {
            return Err(invalid(
                "Circle3::new",
                "frame must be orthonormal and radius positive",
            ));
        }
        Ok(c)
    }

    pub fn is_valid(&self) -> bool {
        self.u_axis.dot(self.v_axis).abs() < 1e-12
            && (self.u_axis.norm() - 1.0).abs() < 1e-12
            && (self.v_axis.norm() - 1.0).abs() < 1e-12
            && self.radius > 0.0
            && self.center.is_finite()
    }

    /// Plane normal `U × V`.
    pub fn normal(&self) -> Vec3 {
        self.u_axis.cross(self.v_axis)
    }

    pub fn point(&self, s: f64) -> Vec3 {
        let (sn, cs) = s.sin_cos();
        self.center + (self.u_axis * cs + self.v_axis * sn) * self.radius
    }

    pub fn tangent(&self, s: f64) -> Vec3 {
        let (sn, cs) = s.sin_cos();
        (self.v_axis * cs - self.u_axis * sn) * self.radius
    }

    pub fn transformed(&self, m: &RigidMotion) -> Circle3 {
        Circle3 {
            center: m.apply(self.center),
            u_axis: m.apply_vector(self.u_axis),
            v_axis: m.apply_vector(self.v_axis),
            radius: self.radius,
        }
    }

    /// Same circle traversed the other way.
    pub fn reversed(&self) -> Circle3 {
        Circle3 {
            v_axis: -self.v_axis,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub core: Circle3,
    pub tube_radius: f64,
}

impl TorusSpec {
    pub fn new(core: Circle3, tube_radius: f64) -> Result<TorusSpec> {
        if !(tube_radius > 0.0 && tube_radius < core.radius) {
            return Err(invalid(
                "TorusSpec::new",
                format!("tube radius {tube_radius} must lie in (0, R)"),
            ));
        }
        Ok(TorusSpec { core, tube_radius })
    }
}

/// Angles on the torus chart, both in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusCoords {
    pub alpha: f64,
    pub beta: f64,
}

impl TorusCoords {
    pub fn new(alpha: f64, beta: f64) -> TorusCoords {
        TorusCoords {
            alpha: wrap_angle(alpha),
            beta: wrap_angle(beta),
        }
    }
}

/// Direction in which β increases at β = 0: `V × U`.
///
/// With α measured from U toward V this orientation of β is the one that
/// reproduces the published contact coordinates of the optimal ring.
pub fn meridian_axis(core: &Circle3) -> Vec3 {
    core.v_axis.cross(core.u_axis)
}

/// Point at chart angles (α, β) and distance `h` from the core circle.
pub fn chart_point(core: &Circle3, alpha: f64, beta: f64, h: f64) -> Vec3 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let radial = core.u_axis * ca + core.v_axis * sa;
    core.center + radial * (core.radius + h * cb) + meridian_axis(core) * (h * sb)
}

/// Inverse of [`chart_point`]: returns (α, β, h). Points on the core axis
/// get α = 0.
pub fn chart_coords(core: &Circle3, p: Vec3) -> (f64, f64, f64) {
    let d = p - core.center;
    let x = d.dot(core.u_axis);
    let y = d.dot(core.v_axis);
    let z = d.dot(meridian_axis(core));
    let s = x.hypot(y);
    let alpha = if s > 0.0 { y.atan2(x) } else { 0.0 };
    let w = s - core.radius;
    (wrap_angle(alpha), wrap_angle(z.atan2(w)), w.hypot(z))
}

/// Surface point of the torus at chart angles. β = 0 is the outermost
/// longitude, α = 0 lies in direction U and increases toward V; β increases
/// toward [`meridian_axis`].
pub fn torus_point(t: &TorusSpec, c: TorusCoords) -> Vec3 {
    chart_point(&t.core, c.alpha, c.beta, t.tube_radius)
}

/// Chart angles of a point on the torus surface.
pub fn torus_coords_of(t: &TorusSpec, p: Vec3) -> Result<TorusCoords> {
    let (alpha, beta, h) = chart_coords(&t.core, p);
    let off = (h - t.tube_radius).abs();
    if !(off <= 1e-9 * t.core.radius) {
        return Err(Error::OffSurface { distance: off });
    }
    Ok(TorusCoords { alpha, beta })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Point at parameter `s ∈ [0, 1)` of the (p, q) torus curve: it meets a
/// longitude `p` times and a meridian `q` times.
pub fn pq_curve(t: &TorusSpec, p: i64, q: i64, s: f64) -> Result<Vec3> {
    if p == 0 && q == 0 {
        return Err(invalid("pq_curve", "(p, q) = (0, 0)"));
    }
    if gcd(p, q) != 1 {
        return Err(invalid("pq_curve", format!("({p}, {q}) is not reduced")));
    }
    let a = TAU * q as f64 * s;
    let b = TAU * p as f64 * s;
    Ok(chart_point(&t.core, a, b, t.tube_radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle() -> Circle3 {
        Circle3::new(Vec3::new(0.3, -0.2, 0.5), Vec3::X, Vec3::Z, 1.0).unwrap()
    }

    #[test]
    fn compose_identity_and_full_turn() {
        let m = screw_motion(Vec3::new(1.0, 2.0, 0.0), Vec3::new(1.0, 1.0, 1.0), 0.7, 0.3).unwrap();
        assert!(compose(&RigidMotion::IDENTITY, &m).distance(&m) < 1e-15);
        let full = compose(&rot_z(TAU / 3.0), &rot_z(2.0 * TAU / 3.0));
        assert!(full.distance(&RigidMotion::IDENTITY) < 1e-12);
    }

    #[test]
    fn coaxial_screws_add() {
        let p = Vec3::new(0.5, -1.0, 2.0);
        let d = Vec3::new(0.0, 0.6, 0.8);
        let a = screw_motion(p, d, 0.4, 0.1).unwrap();
        let b = screw_motion(p, d, 1.1, -0.7).unwrap();
        let ab = screw_motion(p, d, 1.5, -0.6).unwrap();
        assert!(compose(&a, &b).distance(&ab) < 1e-12);
        assert!(compose(&b, &a).distance(&ab) < 1e-12);
    }

    #[test]
    fn rotation_right_handed_and_order_three() {
        let q = rotation_about_axis(Vec3::ZERO, Vec3::Z, PI / 2.0).unwrap();
        assert!(q.apply(Vec3::X).dist(Vec3::Y) < 1e-15);
        let g = rotation_about_axis(Vec3::ZERO, Vec3::Z, TAU / 3.0).unwrap();
        let g3 = compose(&g, &compose(&g, &g));
        assert!(g3.distance(&RigidMotion::IDENTITY) < 1e-12);
        let zero = rotation_about_axis(Vec3::X, Vec3::Y, 0.0).unwrap();
        assert!(zero.distance(&RigidMotion::IDENTITY) < 1e-15);
        assert!(matches!(
            rotation_about_axis(Vec3::ZERO, Vec3::ZERO, 1.0),
            Err(Error::InvalidInput { .. })
        ));
    }

    #[test]
    fn axis_is_fixed() {
        let p = Vec3::new(1.0, -2.0, 0.25);
        let d = Vec3::new(2.0, 1.0, -1.0).normalized().unwrap();
        let m = rotation_about_axis(p, d, 2.2).unwrap();
        for k in -3..=3 {
            let q = p + d * k as f64;
            assert!(m.apply(q).dist(q) < 1e-12);
        }
    }

    #[test]
    fn screw_special_cases() {
        let t = screw_motion(Vec3::ZERO, Vec3::Y, 0.0, 2.5).unwrap();
        assert!(t.apply(Vec3::X).dist(Vec3::new(1.0, 2.5, 0.0)) < 1e-15);
        let s = screw_motion(Vec3::ZERO, Vec3::Z, TAU, 0.8).unwrap();
        // helix (cos u, sin u, 0.8 u / 2π) is carried onto itself
        for i in 0..10 {
            let u = i as f64 * 0.37;
            let h = Vec3::new(u.cos(), u.sin(), 0.8 * u / TAU);
            let h2 = Vec3::new(u.cos(), u.sin(), 0.8 * (u + TAU) / TAU);
            assert!(s.apply(h).dist(h2) < 1e-12);
        }
    }

    #[test]
    fn chart_conventions() {
        let core = unit_circle();
        let t = TorusSpec::new(core, 0.25).unwrap();
        let c = core.center;
        assert!(torus_point(&t, TorusCoords::new(0.0, 0.0)).dist(c + core.u_axis * 1.25) < 1e-15);
        assert!(torus_point(&t, TorusCoords::new(0.0, PI)).dist(c + core.u_axis * 0.75) < 1e-15);
        assert!(
            torus_point(&t, TorusCoords::new(PI / 2.0, 0.0)).dist(c + core.v_axis * 1.25) < 1e-15
        );
        let back = torus_coords_of(&t, c + core.u_axis * 1.25).unwrap();
        assert!(back.alpha.abs() < 1e-15 && back.beta.abs() < 1e-15);
    }

    #[test]
    fn off_surface_rejected() {
        let t = TorusSpec::new(unit_circle(), 0.25).unwrap();
        let p = t.core.center + t.core.u_axis * 1.75;
        assert!(matches!(
            torus_coords_of(&t, p),
            Err(Error::OffSurface { .. })
        ));
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn pq_curves() {
        let t = TorusSpec::new(unit_circle(), 0.3).unwrap();
        assert!(pq_curve(&t, 0, 0, 0.1).is_err());
        assert!(pq_curve(&t, 2, 4, 0.1).is_err());
        // (0,1) is the outermost longitude
        for i in 0..8 {
            let p = pq_curve(&t, 0, 1, i as f64 / 8.0).unwrap();
            let (_, b, h) = chart_coords(&t.core, p);
            assert!(b.abs() < 1e-12 && (h - 0.3).abs() < 1e-12);
        }
        // (1,0) is a meridian at α = 0
        for i in 0..8 {
            let p = pq_curve(&t, 1, 0, i as f64 / 8.0).unwrap();
            assert!(chart_coords(&t.core, p).0.abs() < 1e-12);
        }
        let start = pq_curve(&t, 1, 1, 0.0).unwrap();
        let end = pq_curve(&t, 1, 1, 1.0 - 1e-12).unwrap();
        assert!(start.dist(end) < 1e-9);
    }

    #[test]
    fn polar_restores_rotation() {
        let r = rotation_matrix(Vec3::new(0.0, 0.6, 0.8), 0.9);
        let mut drift = r;
        drift.0[0][1] += 1e-9;
        drift.0[2][0] -= 2e-9;
        let fixed = drift.polar_rotation();
        assert!(fixed.orthonormality_error() < 1e-14);
        assert!(fixed.frobenius_dist(&r) < 1e-8);
    }
}
