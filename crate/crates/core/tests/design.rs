use std::f64::consts::PI;

use triplegear::geometry::chart_point;
use triplegear::*;

fn optimum() -> DesignConfig {
    maximize_thickness(SymmetricParams::new(0.5, 0.0, -0.8), true, 1e-10).unwrap()
}

#[test]
fn reproduces_published_optimum() {
    let cfg = optimum();
    assert!((cfg.params.r - 0.4950197).abs() < 1e-5);
    assert!((cfg.params.theta + 0.8560281).abs() < 1e-5);
    assert!((cfg.thickness - 0.3228837).abs() < 1e-5);
    assert_eq!(cfg.params.phi, 0.0);
    let d = circle_circle_distance(&cfg.circles[0], &cfg.circles[1], 1e-10).unwrap();
    assert!((d.distance - 0.6457674).abs() < 2e-5);
    assert_eq!(cfg.objective, 2.0 * cfg.thickness);
}

#[test]
fn optimum_is_a_local_maximum() {
    let cfg = optimum();
    let p = cfg.params;
    let best = objective(&p).unwrap();
    for (dr, dt) in [
        (1e-3, 0.0),
        (-1e-3, 0.0),
        (0.0, 1e-3),
        (0.0, -1e-3),
        (1e-3, 1e-3),
        (-1e-3, 1e-3),
    ] {
        let q = SymmetricParams::new(p.r + dr, 0.0, p.theta + dt);
        assert!(objective(&q).unwrap() <= best + 1e-12);
    }
}

#[test]
fn contacts_touch_both_neighbours() {
    let cfg = optimum();
    let contacts = contact_points(&cfg).unwrap();
    assert_eq!(contacts.len(), 4);
    assert!(contacts.windows(2).all(|w| w[0].alpha < w[1].alpha));
    for c in &contacts {
        let p = chart_point(&cfg.circles[0], c.alpha, c.beta, cfg.thickness);
        let d1 = point_circle_distance(p, &cfg.circles[1]).distance;
        let d2 = point_circle_distance(p, &cfg.circles[2]).distance;
        assert!((d1.min(d2) - cfg.thickness).abs() < 1e-7, "{c:?}");
    }
    // two contacts on the inner side of the ring, two on the outer side
    let inner = contacts.iter().filter(|c| c.beta.abs() > PI / 2.0).count();
    assert_eq!(inner, 2);
}

#[test]
fn unlinked_parameters_score_minus_infinity() {
    // circles far from the axis do not reach through each other
    let v = objective(&SymmetricParams::new(5.0, 0.0, 0.0)).unwrap();
    assert_eq!(v, f64::NEG_INFINITY);
}
