use std::f64::consts::{PI, TAU};
use triplegear::geometry::{chart_coords, chart_point, wrap_angle};

use nalgebra::{Rotation3, Unit, Vector3};
use proptest::prelude::*;
use triplegear::*;

fn na(v: Vec3) -> Vector3<f64> {
    Vector3::new(v.x, v.y, v.z)
}

fn close(a: Vec3, b: Vector3<f64>, tol: f64) -> bool {
    (a.x - b.x).abs() < tol && (a.y - b.y).abs() < tol && (a.z - b.z).abs() < tol
}

#[test]
fn rotation_matches_nalgebra() {
    let axes = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.3, -2.0, 0.7),
        Vec3::new(-1.0, 1.0, 1.0),
    ];
    for (k, &d) in axes.iter().enumerate() {
        for angle in [-2.5, -0.3, 0.0, 1.0, PI, 4.0] {
            let point = Vec3::new(0.5 * k as f64, -0.2, 1.1);
            let m = rotation_about_axis(point, d, angle).unwrap();
            let r = Rotation3::from_axis_angle(&Unit::new_normalize(na(d)), angle);
            for q in [Vec3::new(1.0, 2.0, 3.0), Vec3::new(-0.4, 0.0, 0.9)] {
                let want = r * (na(q) - na(point)) + na(point);
                assert!(close(m.apply(q), want, 1e-13), "axis {d:?} angle {angle}");
            }
        }
    }
}

#[test]
fn screw_advances_along_axis() {
    let d = Vec3::new(0.0, 1.0, 1.0);
    let m = screw_motion(Vec3::ZERO, d, TAU, 0.5).unwrap();
    let q = Vec3::new(0.3, 0.1, -0.2);
    let unit = d / d.norm();
    assert!(m.apply(q).dist(q + unit * 0.5) < 1e-14);
    assert!(rotation_about_axis(Vec3::ZERO, Vec3::ZERO, 1.0).is_err());
}

#[test]
fn chart_inverts() {
    let core = Circle3::new(
        Vec3::new(0.2, -0.1, 0.4),
        Vec3::new(0.0, 0.6, 0.8),
        Vec3::new(1.0, 0.0, 0.0),
        1.3,
    )
    .unwrap();
    for i in 0..17 {
        for j in 0..13 {
            let (a, b) = (-3.0 + 0.37 * i as f64, -3.1 + 0.47 * j as f64);
            let p = chart_point(&core, a, b, 0.4);
            let (a2, b2, h) = chart_coords(&core, p);
            assert!(
                wrap_angle(a2 - a).abs() < 1e-12
                    && wrap_angle(b2 - b).abs() < 1e-12
                    && (h - 0.4).abs() < 1e-12
            );
        }
    }
}

#[test]
fn meridian_points_along_v_cross_u() {
    let core = Circle3::new(
        Vec3::ZERO,
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        1.0,
    )
    .unwrap();
    let p = chart_point(&core, 0.0, 0.5 * PI, 0.25);
    assert!(p.dist(Vec3::new(1.0, 0.0, -0.25)) < 1e-15);
}

#[test]
fn torus_curves_close() {
    let core = Circle3::new(
        Vec3::ZERO,
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        1.0,
    )
    .unwrap();
    let t = TorusSpec::new(core, 0.3).unwrap();
    for (p, q) in [(1, 0), (0, 1), (2, 3), (-3, 4)] {
        let a = pq_curve(&t, p, q, 0.0).unwrap();
        let b = pq_curve(&t, p, q, 1.0).unwrap();
        assert!(a.dist(b) < 1e-12);
        let mid = pq_curve(&t, p, q, 0.37).unwrap();
        assert!(torus_coords_of(&t, mid).is_ok());
    }
    assert!(pq_curve(&t, 2, 4, 0.1).is_err());
}

fn motion_strategy() -> impl Strategy<Value = RigidMotion> {
    (
        -1.0..1.0f64,
        -1.0..1.0f64,
        0.1..1.0f64,
        -4.0..4.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
    )
        .prop_map(|(x, y, z, ang, tx, ty)| {
            screw_motion(Vec3::new(tx, ty, 0.3), Vec3::new(x, y, z), ang, tx - ty).unwrap()
        })
}

proptest! {
    #[test]
    fn compose_is_associative(a in motion_strategy(), b in motion_strategy(), c in motion_strategy()) {
        let l = compose(&compose(&a, &b), &c);
        let r = compose(&a, &compose(&b, &c));
        prop_assert!(l.distance(&r) < 1e-12);
    }

    #[test]
    fn inverse_undoes(a in motion_strategy(), x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let p = Vec3::new(x, y, x * y);
        prop_assert!(a.inverse().apply(a.apply(p)).dist(p) < 1e-12);
        prop_assert!(compose(&a, &a.inverse()).distance(&RigidMotion::IDENTITY) < 1e-12);
        prop_assert!(a.is_valid());
    }

    #[test]
    fn wrap_is_congruent(a in -50.0..50.0f64) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((a - w) / TAU - ((a - w) / TAU).round()).abs() < 1e-9);
    }
}
