use std::f64::consts::TAU;

use triplegear::axle::{axle_speed, hole_radius, matched_pitch};
use triplegear::geometry::rot_z;
use triplegear::*;

fn optimum() -> DesignConfig {
    maximize_thickness(SymmetricParams::new(0.5, 0.0, -0.8), true, 1e-10).unwrap()
}

#[test]
fn speeds_and_pitch() {
    assert_eq!(axle_speed(1.0, 12, 3), 4.0);
    assert_eq!(axle_speed(-0.5, 12, 4), -1.5);
    let cfg = optimum();
    let root = 0.75 * cfg.thickness;
    let p = matched_pitch(&cfg, root, 1.0, -4.0).unwrap();
    // doubling every speed leaves the pitch alone
    let q = matched_pitch(&cfg, root, 2.0, -8.0).unwrap();
    assert!((p - q).abs() < 1e-12);
    assert!(p.is_finite() && p != 0.0);
}

#[test]
fn smooth_rings_give_a_round_axle() {
    let cfg = optimum();
    let spec = GearSpec::for_design(&cfg).unwrap();
    let tube = cfg.thickness - spec.gap;
    let gear = smooth_gear(&cfg, &spec, tube).unwrap();
    let mut seed = AxleSpec::for_gear(&cfg, &gear).unwrap();
    assert!(seed.outer_radius < hole_radius(&cfg, &gear));
    let section = carve_axle_section(&cfg, &gear, &seed, 1.0, seed.speed_ratio, 360).unwrap();
    let radii: Vec<f64> = section.points.iter().map(|p| p[0].hypot(p[1])).collect();
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().copied().fold(0.0, f64::max);
    assert!(hi - lo < 2e-3, "{lo} {hi}");
    seed.cross_section = Some(section.clone());
    let mesh = axle_mesh(&section, &seed, 0.05).unwrap();
    let rep = validate(&mesh);
    assert!(rep.watertight && rep.orientation_consistent);
    assert_eq!(rep.euler_characteristic, 2);
}

#[test]
fn carved_section_repeats_per_start() {
    let cfg = optimum();
    let spec = GearSpec::for_design(&cfg).unwrap();
    let gear = assemble_gear(&cfg, &spec).unwrap();
    let seed = AxleSpec::for_gear(&cfg, &gear).unwrap();
    assert_eq!(seed.starts, 3);
    assert_eq!(seed.speed_ratio.abs(), 4.0);
    let section = carve_axle_section(&cfg, &gear, &seed, 1.0, seed.speed_ratio, 360).unwrap();
    let n = section.points.len();
    assert_eq!(n % 3, 0);
    let r = rot_z(TAU / 3.0);
    for j in 0..n / 3 {
        let [x, y] = section.points[j];
        let q = r.apply(Vec3::new(x, y, 0.0));
        let [u, v] = section.points[j + n / 3];
        assert!(q.dist(Vec3::new(u, v, 0.0)) < 1e-12);
    }
    let radii: Vec<f64> = section.points.iter().map(|p| p[0].hypot(p[1])).collect();
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().copied().fold(0.0, f64::max);
    assert!(hi <= seed.outer_radius + 1e-12);
    assert!(
        lo > 0.0 && hi - lo > 0.05,
        "threads should be cut: {lo} {hi}"
    );
}

#[test]
fn rejects_bad_requests() {
    let cfg = optimum();
    let spec = GearSpec::for_design(&cfg).unwrap();
    let gear = smooth_gear(&cfg, &spec, cfg.thickness - spec.gap).unwrap();
    let seed = AxleSpec::for_gear(&cfg, &gear).unwrap();
    assert!(carve_axle_section(&cfg, &gear, &seed, 1.0, seed.speed_ratio, 100).is_err());
    assert!(carve_axle_section(&cfg, &gear, &seed, 1.0, 2.5, 360).is_err());
    let fat = AxleSpec {
        outer_radius: 10.0,
        ..seed.clone()
    };
    assert!(matches!(
        carve_axle_section(&cfg, &gear, &fat, 1.0, seed.speed_ratio, 360),
        Err(Error::AxleImpossible(_))
    ));
    let flat = AxleSpec { pitch: 0.0, ..seed };
    assert!(carve_axle_section(&cfg, &gear, &flat, 1.0, 4.0, 360).is_err());
}
