use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use triplegear::geometry::chart_point;
use triplegear::paradox::critical_spacing;
use triplegear::*;
use triplegear_bench::optimum;

fn design(c: &mut Criterion) {
    let cfg = optimum();
    let (a, b) = (cfg.circles[0], cfg.circles[1]);
    c.bench_function("circle_circle_distance", |bch| {
        bch.iter(|| circle_circle_distance(black_box(&a), black_box(&b), 1e-12).unwrap())
    });
    c.bench_function("objective", |bch| {
        bch.iter(|| objective(black_box(&cfg.params)).unwrap())
    });
    c.bench_function("linking_number", |bch| {
        bch.iter(|| linking_number(black_box(&a), black_box(&b)).unwrap())
    });
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("maximize_thickness", |bch| bch.iter(optimum));
    g.finish();
}

fn carving(c: &mut Criterion) {
    let cfg = optimum();
    let curve: Vec<Vec3> = (0..=2000)
        .map(|k| chart_point(&cfg.circles[1], 2.6, 2.0 * k as f64 / 2000.0, cfg.thickness))
        .collect();
    let times: Vec<f64> = (0..180).map(|k| TAU / 12.0 * k as f64 / 179.0).collect();
    c.bench_function("carve_flank", |bch| {
        bch.iter(|| carve_flank(black_box(&curve), &cfg, 1, 0, 1.0, &times).unwrap())
    });
    let spec = GearSpec::for_design(&cfg).unwrap();
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("assemble_gear", |bch| {
        bch.iter(|| assemble_gear(&cfg, &spec).unwrap())
    });
    let gears = assemble_triple(&cfg, &spec).unwrap();
    let cols = [gears[0].collider().unwrap(), gears[1].collider().unwrap()];
    let mv = CompoundMovement::uniform(&cfg, 1.0);
    g.bench_function("gear_pair_approach", |bch| {
        bch.iter(|| {
            triplegear::clearance::approach(
                &cols[0],
                &mv.motion(0, 0.3),
                &cols[1],
                &mv.motion(1, 0.3),
            )
        })
    });
    g.finish();
    let mesh = &gears[0].mesh;
    c.bench_function("validate_gear_mesh", |bch| {
        bch.iter(|| validate(black_box(mesh)))
    });
    c.bench_function("write_stl_binary", |bch| {
        bch.iter(|| write_stl(black_box(mesh), StlFormat::Binary).unwrap())
    });
}

fn screws(c: &mut Criterion) {
    c.bench_function("involute_profile", |bch| {
        bch.iter(|| involute_profile(1.0, 3, black_box(1.6)).unwrap())
    });
    let p = involute_profile(1.0, 3, 1.6).unwrap();
    c.bench_function("critical_spacing", |bch| {
        bch.iter(|| critical_spacing(black_box(&p)))
    });
}

criterion_group!(benches, design, carving, screws);
criterion_main!(benches);
