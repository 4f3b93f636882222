use std::f64::consts::{PI, TAU};

use triplegear::geometry::{chart_coords, chart_point, rot_z, wrap_angle};
use triplegear::kinematics::ring_sweep;
use triplegear::profile::Curve2;
use triplegear::*;

fn optimum() -> DesignConfig {
    maximize_thickness(SymmetricParams::new(0.5, 0.0, -0.8), true, 1e-10).unwrap()
}

fn spec() -> ToothProfile {
    ToothProfile {
        beta0: PI,
        tooth_count: 12,
        addendum: 0.08,
        dedendum: 0.08,
        flank_slope: -0.05,
        top_land_fraction: 0.2,
    }
}

#[test]
fn offset_keeps_constant_distance() {
    let master = master_tooth_profile(&spec(), true).unwrap();
    let curve = master.developed(0.7);
    let off = offset_profile(&curve, 0.02).unwrap();
    for &q in &off.points {
        assert!((curve.distance(q) - 0.02).abs() < 1e-8, "{q:?}");
    }
    // densely sampled original stays at least the gap away from the offset
    for (a, b) in curve.segments() {
        for k in 0..20 {
            let s = k as f64 / 20.0;
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            assert!(off.distance(p) > 0.02 - 1e-4);
        }
    }
    let square = Curve2::closed(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    let grown = offset_profile(&square, 0.1).unwrap();
    for &q in &grown.points {
        assert!((square.distance(q) - 0.1).abs() < 1e-12);
        assert!(q[0] < -0.05 || q[0] > 1.05 || q[1] < -0.05 || q[1] > 1.05);
    }
    assert!(offset_profile(&square, -0.1).is_err());
}

/// Finely sampled arc β ∈ [0, 2] (times `sign`) of a meridian of ring
/// `ring` at longitude `alpha`; this arc holds the point nearest ring 0 over
/// the first tooth pitch.
fn meridian(cfg: &DesignConfig, ring: usize, alpha: f64, sign: f64) -> Vec<Vec3> {
    (0..=8000)
        .map(|k| {
            chart_point(
                &cfg.circles[ring],
                alpha,
                sign * 2.0 * k as f64 / 8000.0,
                cfg.thickness,
            )
        })
        .collect()
}

fn pitch_times(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (TAU / 12.0) * k as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn flank_starts_at_the_curve_and_is_an_envelope() {
    let cfg = optimum();
    let curve = meridian(&cfg, 1, 2.6, 1.0);
    let times = pitch_times(180);
    let flank = carve_flank(&curve, &cfg, 1, 0, 1.0, &times).unwrap();
    let core = cfg.circles[0];
    // t = 0: relative motion is the identity, so the sample lies on the curve
    let d0 = point_circle_distance(flank.samples[0], &core).distance;
    let best = curve
        .iter()
        .map(|&p| point_circle_distance(p, &core).distance)
        .fold(f64::INFINITY, f64::min);
    assert!(d0 <= best + 1e-12 && best - d0 < 1e-3);
    for (k, &t) in times.iter().enumerate().step_by(7) {
        let family = triplegear::carving::sweep_family(&curve, &cfg, 1, 0, 1.0, t);
        let lowest = family
            .iter()
            .map(|&p| point_circle_distance(p, &core).distance)
            .fold(f64::INFINITY, f64::min);
        assert!(flank.depths[k] <= lowest + 1e-12);
        assert!(flank.chart_point(k).dist(flank.samples[k]) < 1e-12);
    }
    assert!(flank.residual < 1e-4);
    for k in 0..times.len() {
        assert!(flank.fit.eval(times[k]).dist(flank.samples[k]) <= flank.residual + 1e-12);
    }
    assert!(carve_flank(&curve, &cfg, 1, 0, 1.0, &times[..100]).is_err());
}

#[test]
fn flank_respects_the_half_turn_symmetry() {
    // the half turn about ring 0's U axis maps (α, β) to (−α, −β), swaps the
    // neighbours and reverses ring 0's spin, so the mirrored sweep runs backwards
    let cfg = optimum();
    let c0 = cfg.circles[0];
    let d = rotation_about_axis(c0.center, c0.u_axis, PI).unwrap();
    let curve = meridian(&cfg, 1, 2.6, 1.0);
    let a = carve_flank(&curve, &cfg, 1, 0, 1.0, &pitch_times(180)).unwrap();
    let mirrored: Vec<Vec3> = curve.iter().map(|&p| d.apply(p)).collect();
    let b = carve_flank(&mirrored, &cfg, 2, 0, -1.0, &pitch_times(180)).unwrap();
    for k in 0..180 {
        assert!(d.apply(a.samples[k]).dist(b.samples[k]) < 1e-9, "step {k}");
        let (pa, pb) = (a.chart_samples[k], b.chart_samples[k]);
        assert!(
            wrap_angle(pa.alpha + pb.alpha).abs() < 1e-9
                && wrap_angle(pa.beta + pb.beta).abs() < 1e-9
        );
    }
}

#[test]
fn lofted_flanks_interpolate_and_face_out() {
    let cfg = optimum();
    let times = pitch_times(180);
    let flanks: Vec<FlankCurve> = [2.55, 2.6, 2.65]
        .iter()
        .map(|&a| carve_flank(&meridian(&cfg, 1, a, 1.0), &cfg, 1, 0, 1.0, &times).unwrap())
        .collect();
    let patches = flank_surface(&flanks, &spec(), cfg.thickness).unwrap();
    assert_eq!(patches.len(), 2);
    let core = cfg.circles[0];
    for (k, p) in patches.iter().enumerate() {
        for r in 0..2 {
            let f = &flanks[k + r];
            let row: Vec<Vec3> = (0..p.cols).map(|c| p.point(r, c)).collect();
            for s in &f.samples {
                assert!(row.iter().any(|q| q.dist(*s) < 1e-9));
            }
        }
        let (a, b, c) = (p.point(0, 0), p.point(0, 1), p.point(1, 0));
        let n = (b - a).cross(c - a);
        assert!(n.dot(a - point_circle_distance(a, &core).closest) > 0.0);
    }
    assert!(flank_surface(&flanks[..1], &spec(), cfg.thickness).is_err());
}

#[test]
fn truncation_flattens_tips() {
    let cfg = optimum();
    let gear = assemble_gear(&cfg, &GearSpec::for_design(&cfg).unwrap()).unwrap();
    let f = &gear.field;
    let p = &gear.spec.profile;
    let inner = (0..f.betas.len())
        .min_by(|&a, &b| {
            wrap_angle(f.betas[a] - PI)
                .abs()
                .total_cmp(&wrap_angle(f.betas[b] - PI).abs())
        })
        .unwrap();
    let patch = f.patch(inner, inner + 1, p);
    let cut = truncate_top_land(&[patch.clone()], 0.3).unwrap();
    let top = patch.pitch_radius + patch.addendum;
    let row = &cut[0].h;
    let level = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(level <= top + 1e-12);
    let on_top = row.iter().filter(|&&h| (h - level).abs() < 1e-12).count();
    assert!(on_top as f64 >= 0.3 * row.len() as f64 - 1.0);
    for (a, b) in row.iter().zip(&patch.h) {
        assert!(a <= b);
    }
    assert!(truncate_top_land(&[patch.clone()], 0.0).is_err());
    assert!(truncate_top_land(&[patch], 0.6).is_err());
}

#[test]
fn assembled_gear_has_teeth_on_every_band() {
    let cfg = optimum();
    let spec = GearSpec::for_design(&cfg).unwrap();
    let gears = assemble_triple(&cfg, &spec).unwrap();
    let (inner, outer) = triplegear::carving::gearing_longitudes(&cfg).unwrap();
    let f = &gears[0].field;
    assert_eq!(f.teeth_on_row(inner), 12);
    assert_eq!(f.teeth_on_row(outer), 12);
    assert_eq!(f.teeth_on_row(-outer), 12);
    assert_eq!(f.teeth_on_row(0.0), 0);
    let rep = validate(&gears[0].mesh);
    assert!(rep.watertight && rep.orientation_consistent);
    assert_eq!(rep.euler_characteristic, 0);
    let r = rot_z(TAU / 3.0);
    for (a, b) in gears[0].mesh.vertices.iter().zip(&gears[1].mesh.vertices) {
        assert!(r.apply(*a).dist(*b) < 1e-12);
    }
    // heights stay between root and tip everywhere
    let rho = cfg.thickness;
    for &h in &f.heights {
        assert!(
            h > rho - spec.profile.dedendum - spec.gap - 1e-9
                && h <= rho + spec.profile.addendum + 1e-9
        );
    }
    // chart points sit on the recorded heights
    let (_, _, h) = chart_coords(&f.core, f.point(5, 7));
    assert!((h - f.height(5, 7)).abs() < 1e-12);
}

#[test]
fn hollow_gear_has_two_shells() {
    let cfg = optimum();
    let spec = GearSpec {
        hollow: true,
        ..GearSpec::for_design(&cfg).unwrap()
    };
    let g = assemble_gear(&cfg, &spec).unwrap();
    let rep = validate(&g.mesh);
    assert_eq!(rep.component_count, 2);
    assert_eq!(rep.component_euler, vec![0, 0]);
    assert!(rep.signed_volume > 0.0);
}

#[test]
fn carved_gears_clear_each_other() {
    let cfg = optimum();
    let spec = GearSpec::for_design(&cfg).unwrap();
    let gears = assemble_triple(&cfg, &spec).unwrap();
    let cols: Vec<Collider> = gears
        .iter()
        .map(|g| Collider::new(g.mesh.clone(), None).unwrap())
        .collect();
    let cols: [Collider; 3] = cols.try_into().ok().unwrap();
    let s = ring_sweep(&cols, &CompoundMovement::uniform(&cfg, 1.0), 36).unwrap();
    let min = triplegear::clearance::minimum(&s)
        .unwrap()
        .approach
        .clearance;
    assert!(min > 0.0, "{min}");
}
