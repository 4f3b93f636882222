use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplegear"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn optimized(dir: &TempDir) {
    let out = run(
        dir.path(),
        &["optimize", "--tol", "1e-10", "--out", "cfg.json"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn optimize_writes_the_optimum_deterministically() {
    let dir = TempDir::new().unwrap();
    optimized(&dir);
    let text = std::fs::read_to_string(dir.path().join("cfg.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["r"].as_f64().unwrap() - 0.4950197).abs() < 1e-5);
    assert!((v["theta"].as_f64().unwrap() + 0.8560281).abs() < 1e-5);
    assert_eq!(v["contacts"].as_array().unwrap().len(), 4);
    assert_eq!(v["link_report"]["all_linked"], true);
    let again = run(dir.path(), &["optimize", "--tol", "1e-10"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn contacts_prints_four_pairs() {
    let dir = TempDir::new().unwrap();
    optimized(&dir);
    let out = run(dir.path(), &["contacts", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,beta");
    assert_eq!(lines.len(), 5);
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((first[0] + 2.9419218).abs() < 1e-6 && (first[1] + 1.2298655).abs() < 1e-6);
}

#[test]
fn carve_then_validate() {
    let dir = TempDir::new().unwrap();
    optimized(&dir);
    let out = run(
        dir.path(),
        &["carve", "--config", "cfg.json", "--out", "gear.stl"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = std::fs::read(dir.path().join("gear.stl")).unwrap();
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    assert_eq!(bytes.len(), 84 + 50 * n);
    let out = run(dir.path(), &["validate", "gear.stl"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["watertight"], true);
    assert_eq!(rep["euler_characteristic"], 0);
    // a truncated copy has open edges: computation failure
    let mut cut = bytes.clone();
    cut.truncate(84 + 50 * (n - 1));
    cut[80..84].copy_from_slice(&((n - 1) as u32).to_le_bytes());
    std::fs::write(dir.path().join("cut.stl"), cut).unwrap();
    let out = run(dir.path(), &["validate", "cut.stl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn carve_assembly_has_three_bodies() {
    let dir = TempDir::new().unwrap();
    optimized(&dir);
    let out = run(
        dir.path(),
        &[
            "carve",
            "--config",
            "cfg.json",
            "--assembly",
            "--teeth",
            "12",
            "--gap",
            "0.02",
            "--out",
            "all.stl",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run(dir.path(), &["validate", "all.stl"]);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["component_count"], 3);
}

#[test]
fn axle_and_paradox_write_closed_solids() {
    let dir = TempDir::new().unwrap();
    optimized(&dir);
    let out = run(
        dir.path(),
        &["axle", "--config", "cfg.json", "--out", "axle.stl"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        run(dir.path(), &["validate", "axle.stl"]).status.code(),
        Some(0)
    );
    let out = run(
        dir.path(),
        &["paradox", "--out", "p", "--height", "15", "--phases", "6"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for k in 0..3 {
        assert_eq!(
            run(dir.path(), &["validate", &format!("p-screw{k}.stl")])
                .status
                .code(),
            Some(0)
        );
    }
    let csv = std::fs::read_to_string(dir.path().join("p-contacts.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "phase,contact_angle_deg,clearance");
    assert_eq!(lines.len(), 7);
    for l in &lines[1..] {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[1] < 5.0 && f[2] >= 0.0 && f[2] <= 1e-3);
    }
}

#[test]
fn simulate_reports_every_pair_at_every_step() {
    let dir = TempDir::new().unwrap();
    optimized(&dir);
    let out = run(
        dir.path(),
        &[
            "simulate",
            "--config",
            "cfg.json",
            "--steps",
            "360",
            "--report",
            "sweep.csv",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,time,pair,clearance");
    assert_eq!(lines.len() - 1, 360 * 3);
    let min = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(min >= 0.0, "{min}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(
        run(dir.path(), &["optimize", "--frobnicate"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["contacts", "--config", "missing.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["optimize", "--tol", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["optimize", "--out", "no/such/dir/cfg.json"])
            .status
            .code(),
        Some(2)
    );
    std::fs::write(dir.path().join("bad.json"), "{}").unwrap();
    assert_eq!(
        run(dir.path(), &["carve", "--config", "bad.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn too_wide_screws_fail_to_mesh() {
    let dir = TempDir::new().unwrap();
    // spacing far above the touching distance leaves nothing in contact
    let out = run(
        dir.path(),
        &[
            "paradox", "--out", "w", "--height", "15", "--margin", "0.1", "--phases", "2",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("contact_normal_report"));
}
