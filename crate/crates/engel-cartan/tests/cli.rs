//! End-to-end tests of the command-line tool: exit-status contract,
//! report shape, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_engel-cartan"))
}

fn manifest(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad stdout JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| {
        panic!("bad stderr JSON ({e}): {}", String::from_utf8_lossy(&out.stderr))
    })
}

const CUBIC: &str = "format = 1\nkind = \"cubic\"\n";
const B8: &str = "format = 1\nkind = \"normal_form\"\n[coefficients]\nb8 = 0.1\n";

#[test]
fn flatness_verdicts_drive_the_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let cubic = manifest(&dir, "cubic.toml", CUBIC);
    let out = bin().args(["flatness"]).arg(&cubic).arg("--order").arg("4").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["flat"], serde_json::json!(true));
    assert_eq!(report["threshold"], serde_json::json!(1e-7));
    assert_eq!(report["kind"], serde_json::json!("cubic"));

    let perturbed = manifest(&dir, "b8.toml", B8);
    let out = bin().args(["flatness"]).arg(&perturbed).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["flat"], serde_json::json!(false));
    assert!(report["max_residual"].as_f64().unwrap() > 0.1);

    // The verdict threshold is a flag; the report echoes the effective value.
    let out = bin()
        .args(["flatness"])
        .arg(&perturbed)
        .args(["--threshold", "10.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["flat"], serde_json::json!(true));
    assert_eq!(report["threshold"], serde_json::json!(10.0));
}

#[test]
fn invariants_report_values_weights_and_fiber_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let perturbed = manifest(&dir, "b8.toml", B8);
    let out = bin().args(["invariants"]).arg(&perturbed).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let inv = &report["points"][0]["invariants"];
    assert_eq!(inv[3]["name"], serde_json::json!("R^y_{x3}"));
    assert_eq!(inv[3]["weight"], serde_json::json!(3));
    assert!((inv[3]["value"].as_f64().unwrap() + 0.6).abs() < 1e-9);
    for i in 0..3 {
        assert!(inv[i]["value"].as_f64().unwrap().abs() < 1e-9);
    }

    // t = 2 multiplies the weight-3 component by 8.
    let out = bin().args(["invariants"]).arg(&perturbed).args(["--t", "2.0"]).output().unwrap();
    let report = stdout_json(&out);
    let scaled = report["points"][0]["invariants"][3]["value"].as_f64().unwrap();
    assert!((scaled + 4.8).abs() < 1e-8, "got {scaled}");
    assert_eq!(report["gauge"]["fiber_value"], serde_json::json!(2.0));
}

#[test]
fn point_flags_override_the_file_points() {
    let dir = tempfile::tempdir().unwrap();
    let cubic = manifest(&dir, "cubic.toml", CUBIC);
    let out = bin()
        .args(["invariants"])
        .arg(&cubic)
        .args(["--order", "4", "--point", "0.3,-0.2,0.1,0.5", "--point", "1,1,1,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[1]["point"], serde_json::json!([1.0, 1.0, 1.0, 1.0]));
    for p in points {
        assert!(p["max_abs"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn umbilic_verdict_follows_the_locus() {
    let dir = tempfile::tempdir().unwrap();
    let locus = manifest(
        &dir,
        "locus.toml",
        "format = 1\nkind = \"normal_form\"\n[coefficients]\na1 = 1.0\nb4 = -2.0\nb6 = -3.0\n",
    );
    let out = bin().args(["umbilic"]).arg(&locus).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let perturbed = manifest(&dir, "b8.toml", B8);
    let out = bin().args(["umbilic"]).arg(&perturbed).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["umbilic"], serde_json::json!(false));
    assert!(report["points"][0]["residual"].as_f64().unwrap() > 0.1);
}

#[test]
fn errors_exit_2_with_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();

    let degenerate = manifest(&dir, "degen.toml", "format = 1\nkind = \"graph\"\nf1 = []\nf2 = []\n");
    let out = bin().args(["flatness"]).arg(&degenerate).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = stderr_json(&out)["error"].as_str().unwrap().to_string();
    assert!(err.contains("Engel rank"), "{err}");

    let malformed = manifest(&dir, "bad.toml", "format = 1\nkind = \"cubic\"\nf1 = [[[2,0,0");
    let out = bin().args(["invariants"]).arg(&malformed).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out)["error"].as_str().unwrap().to_string();
    assert!(err.contains("line"), "{err}");

    let missing = dir.path().join("nope.toml");
    let out = bin().args(["flatness"]).arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_passes_at_full_order_and_rejects_short_jets() {
    let dir = tempfile::tempdir().unwrap();
    let cubic = manifest(&dir, "cubic.toml", CUBIC);
    let out = bin().args(["check"]).arg(&cubic).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        assert_eq!(c["pass"], serde_json::json!(true), "{c}");
        assert!(c["residual"].as_f64().unwrap() < c["threshold"].as_f64().unwrap());
    }

    // Homogeneity-4 comparisons need jets of order 6.
    let out = bin().args(["check"]).arg(&cubic).args(["--order", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out)["error"].as_str().unwrap().to_string();
    assert!(err.contains("order"), "{err}");
}

#[test]
fn cohomology_dimensions_in_json() {
    let out = bin().args(["cohomology"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["c2_dimension"], serde_json::json!(30));
    assert_eq!(report["cocycle_dimension"], serde_json::json!(17));
    assert_eq!(report["coboundary_dimension"], serde_json::json!(13));
    assert_eq!(report["h2_dimension"], serde_json::json!(4));
    assert_eq!(report["h2_by_homogeneity"]["2"], serde_json::json!(3));
    assert_eq!(report["h2_by_homogeneity"]["3"], serde_json::json!(1));
    assert_eq!(report["differential_squares_to_zero"], serde_json::json!(true));
    assert_eq!(report["representatives"].as_array().unwrap().len(), 4);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let perturbed = manifest(
        &dir,
        "pert.toml",
        "format = 1\nkind = \"normal_form\"\npoints = [[0.0, 0.0, 0.0, 0.0], [0.05, -0.04, 0.03, 0.02]]\n[coefficients]\na1 = 0.15\nb2 = -0.08\nb3 = 0.1\n",
    );
    let run = || {
        bin()
            .args(["invariants"])
            .arg(&perturbed)
            .args(["--table", "3"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let flat = |path: &PathBuf| bin().args(["flatness"]).arg(path).output().unwrap().stdout;
    assert_eq!(flat(&perturbed), flat(&perturbed));
}
