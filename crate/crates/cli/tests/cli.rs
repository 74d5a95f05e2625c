//! End-to-end checks of the `wlab` binary: exit-code contract,
//! deterministic outputs, and the file formats.

use std::path::Path;
use std::process::Command;

fn wlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wlab"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn profile_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = wlab()
        .args(["profile", "--neck-r", "0.5", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let csv = read(&out.join("profile.csv"));
    assert!(csv.starts_with("s,y,z,psi,I\r\n"));

    let extrema = read(&out.join("extrema.csv"));
    // Bulge radius R = 2a − r = 1.5 must appear in the extrema table.
    let bulge_line = extrema
        .lines()
        .find(|l| l.ends_with("bulge"))
        .expect("a bulge row");
    let y: f64 = bulge_line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((y - 1.5).abs() < 1e-6, "bulge radius {y}");

    let json: serde_json::Value = serde_json::from_str(&read(&out.join("profile.json"))).unwrap();
    assert!(json["radii_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn cylinder_profile_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = wlab()
        .args(["profile", "--neck-r", "1.0", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("profile.csv"));
    for line in csv.lines().skip(1) {
        let y: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((y - 1.0).abs() < 1e-8, "cylinder radius drifted: {y}");
    }
}

#[test]
fn invalid_parameters_exit_2() {
    // Zero neck radius.
    let dir = tempfile::tempdir().unwrap();
    let status = wlab()
        .args(["profile", "--neck-r", "0", "--out"])
        .arg(dir.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Negative disk radius.
    let status = wlab()
        .args(["bounds", "--disk-radius", "-1", "--out"])
        .arg(dir.path().join("y"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Malformed config document.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"no_such_field": 1}"#).unwrap();
    let status = wlab()
        .args(["sweep", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("z"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // A neck radius below the axis threshold is a valid parameter but the
    // integration reports the near-axis (football) approach.
    let dir = tempfile::tempdir().unwrap();
    let status = wlab()
        .args(["profile", "--neck-r", "1e-12", "--out"])
        .arg(dir.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn parity_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (out1, out2) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out1, &out2] {
        let status = wlab()
            .args(["parity", "--trials", "100", "--seed", "7", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        read(&out1.join("parity.csv")),
        read(&out2.join("parity.csv"))
    );
    assert_eq!(
        read(&out1.join("parity.json")),
        read(&out2.join("parity.json"))
    );
    let csv = read(&out1.join("parity.csv"));
    assert!(csv.starts_with("seed,loop_count,nonzero_windings,verdict\r\n"));
    assert!(!csv.contains("FAIL"));
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (out1, out2) = (dir.path().join("t1"), dir.path().join("t4"));
    for (out, threads) in [(&out1, "1"), (&out2, "4")] {
        let status = wlab()
            .env("WLAB_THREADS", threads)
            .args(["sweep", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        read(&out1.join("family.csv")),
        read(&out2.join("family.csv"))
    );
}

#[test]
fn flux_report_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = wlab()
        .args(["flux", "--neck-r", "0.5", "--n-theta", "512", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&read(&out.join("flux.json"))).unwrap();
    let records = report["records"].as_array().unwrap();
    assert!(records.len() >= 2);
    for r in records {
        assert!(r["rel_err"].as_f64().unwrap() < 1e-3);
    }
    // Homotopic parallels carry the same flux.
    let v0 = records[0]["closed_form"].as_f64().unwrap();
    for r in records {
        let v = r["closed_form"].as_f64().unwrap();
        assert!((v - v0).abs() / v0.abs() < 1e-6);
    }
}

#[test]
fn mass_command_reads_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{
            "mass": {
                "ends": [
                    {"sign": "positive", "r_big": 1.5, "r_small": 0.5, "b": 1.0},
                    {"sign": "negative", "r_big": 1.0, "r_small": 1.0, "b": 1.0}
                ]
            }
        }"#,
    )
    .unwrap();
    let out = dir.path().join("run");
    let status = wlab()
        .args(["mass", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&read(&out.join("mass.json"))).unwrap();
    let masses = report["masses"].as_array().unwrap();
    assert!((masses[0].as_f64().unwrap() - 1.75 * std::f64::consts::PI).abs() < 1e-12);
    let balance = report["balance"].as_f64().unwrap();
    assert!((balance - (1.75 - 2.0) * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn bounds_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // Three positive cylinder ends (mass 2π each) against |D| = 9π.
    std::fs::write(
        &cfg,
        r#"{
            "bounds": {
                "disk_radius": 3.0,
                "ends": [
                    {"sign": "positive", "r_big": 1.0, "r_small": 1.0, "b": 1.0},
                    {"sign": "positive", "r_big": 1.0, "r_small": 1.0, "b": 1.0},
                    {"sign": "positive", "r_big": 1.0, "r_small": 1.0, "b": 1.0}
                ]
            }
        }"#,
    )
    .unwrap();
    let out = dir.path().join("run");
    let status = wlab()
        .args(["bounds", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&read(&out.join("bounds.json"))).unwrap();
    assert_eq!(
        report["report"]["verdict"].as_str().unwrap(),
        "inequality-violated"
    );
    assert_eq!(report["min_positive_ends_for_relation"].as_u64(), Some(3));

    // Zero balance with ends present forces compactness.
    let cfg2 = dir.path().join("cfg2.json");
    std::fs::write(
        &cfg2,
        r#"{
            "bounds": {
                "disk_radius": 1.0,
                "ends": [
                    {"sign": "positive", "r_big": 1.0, "r_small": 1.0, "b": 1.0},
                    {"sign": "negative", "r_big": 1.0, "r_small": 1.0, "b": 1.0}
                ]
            }
        }"#,
    )
    .unwrap();
    let out2 = dir.path().join("run2");
    let status = wlab()
        .args(["bounds", "--config"])
        .arg(&cfg2)
        .arg("--out")
        .arg(&out2)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&read(&out2.join("bounds.json"))).unwrap();
    assert_eq!(
        report["report"]["verdict"].as_str().unwrap(),
        "compact-forced"
    );
}

#[test]
fn alexandrov_alpha_on_generated_member_is_the_axis_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = wlab()
        .args([
            "alexandrov",
            "--neck-r",
            "0.5",
            "--plane-distance",
            "2.0",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let alpha = read(&out.join("alpha.csv"));
    let mut rows = 0;
    for line in alpha.lines().skip(1) {
        let a: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((a - 2.0).abs() < 1e-2, "alpha = {a}");
        rows += 1;
    }
    assert!(rows >= 8);
    // The generated capped tube is mirror-symmetric in all three default
    // scan directions (two through the axis, one through the bulge).
    let scan: serde_json::Value = serde_json::from_str(&read(&out.join("scan.json"))).unwrap();
    for entry in scan["symmetries"].as_array().unwrap() {
        assert!(!entry["plane"].is_null(), "missing {}", entry["direction"]);
    }
}

#[test]
fn alexandrov_ingests_obj_and_rejects_open_meshes() {
    use wlab_core::mesh::{revolve, sphere_mesh};
    use wlab_core::profile::delaunay_family;
    use wlab_core::relation::WeingartenRelation;

    let dir = tempfile::tempdir().unwrap();

    // Closed sphere: symmetry planes in the requested directions.
    let sphere_path = dir.path().join("sphere.obj");
    sphere_mesh([0.0, 0.0, 1.0], 1.0, 48, 24)
        .write_obj(&sphere_path)
        .unwrap();
    let out = dir.path().join("run");
    let status = wlab()
        .args(["alexandrov", "--mesh"])
        .arg(&sphere_path)
        .args(["--plane-distance", "3.0", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let scan: serde_json::Value = serde_json::from_str(&read(&out.join("scan.json"))).unwrap();
    for entry in scan["symmetries"].as_array().unwrap() {
        assert!(
            !entry["plane"].is_null(),
            "sphere symmetry missing in {}",
            entry["direction"]
        );
    }
    let alpha = read(&out.join("alpha.csv"));
    assert!(alpha.starts_with("t,alpha\r\n"));

    // Open tube: exit 2.
    let rel = WeingartenRelation::linear(1.0, 1.0).unwrap();
    let prof = delaunay_family(&rel, 0.5, 1e-10).unwrap();
    let tube_path = dir.path().join("tube.obj");
    revolve(&prof.curve, (0.0, prof.period), 16, 32)
        .unwrap()
        .write_obj(&tube_path)
        .unwrap();
    let status = wlab()
        .args(["alexandrov", "--mesh"])
        .arg(&tube_path)
        .arg("--out")
        .arg(dir.path().join("run2"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
