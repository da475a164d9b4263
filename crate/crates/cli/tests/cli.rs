use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn phasekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasekit"))
        .args(args)
        .env_remove("PHASEKIT_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rep_build_exports_six_qutrit_operators() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ops.json");
    let o = phasekit(&["rep", "build", "--k", "1", "--export", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let ops: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let ops = ops.as_array().unwrap();
    assert_eq!(ops.len(), 6);
    let labels: Vec<&str> = ops.iter().map(|o| o["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["a1+", "a1-", "a2+", "a2-", "N1", "N2"]);
    for op in ops {
        assert_eq!(op["dim"], 3);
        assert_eq!(op["re"].as_array().unwrap().len(), 9);
    }
    // a1+ |0,0> = |1,0> with F_1(1,0) = 1
    assert_eq!(ops[0]["re"][3], 1.0);
}

#[test]
fn rep_check_passes() {
    let o = phasekit(&["rep", "check", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("overall PASS"));
}

#[test]
fn json_report_is_parseable() {
    let o = phasekit(&["phase-ops", "--k", "2", "--phi", "0.3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["overall"], true);
    assert!(!v["entries"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(phasekit(&["rep", "check"]).status.code(), Some(2));
    assert_eq!(phasekit(&["rep", "check", "--kappa", "-0.3"]).status.code(), Some(2));
    assert_eq!(phasekit(&["truncated", "--k", "2"]).status.code(), Some(2));
    assert_eq!(phasekit(&["bogus"]).status.code(), Some(2));
    let o = phasekit(&["rep", "check", "--k", "1", "--tolerance", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn regime_violation_is_reported_verbatim() {
    let o = phasekit(&["evolve", "--kappa", "0.5", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa < 0"));
}

#[test]
fn composite_mub_verify_exits_1() {
    let o = phasekit(&["mub", "generate", "--N", "4", "--verify"]);
    assert_eq!(o.status.code(), Some(1));
    let o = phasekit(&["mub", "generate", "--N", "7", "--route", "e3", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn mub_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mub.json");
    let o = phasekit(&["mub", "generate", "--N", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let set = phasekit::io::mub_set_from_json(&text).unwrap();
    assert_eq!(set.n, 5);
    assert_eq!(set.bases.len(), 6);
    assert!(set.certificate.complete());
}

#[test]
fn tolerance_from_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_phasekit"))
        .args(["rep", "check", "--k", "2"])
        .env("PHASEKIT_TOLERANCE", "1e-30")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_phasekit"))
        .args(["rep", "check", "--k", "2", "--tolerance", "1e-10"])
        .env("PHASEKIT_TOLERANCE", "1e-30")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify-all", "--k", "2", "--sigma", "2", "--seed", "7", "--mub-n", "3", "--format", "json"];
    let a = phasekit(&args);
    let b = phasekit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn evolve_matches_phase_shift() {
    let o = phasekit(&["evolve", "--k", "3", "--t", "0.7", "--family", "e1d", "--l", "1", "--m", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["stability_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn evolve_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = phasekit::KappaSpec::negative(2, 0.0);
    let space = std::sync::Arc::new(phasekit::FockSpace::build(&spec));
    let v = phasekit::StateVector::basis(&space, 1, 1).unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, phasekit::io::state_to_json(&v).unwrap()).unwrap();
    let o = phasekit(&["evolve", "--k", "2", "--t", "1.5", "--state", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out: Value = serde_json::from_slice(&o.stdout).unwrap();
    let back = phasekit::io::state_from_json(&out["state"].to_string()).unwrap();
    assert!((back.norm() - 1.0).abs() < 1e-14);
}

#[test]
fn truncated_grid_control() {
    let o = phasekit(&["truncated", "--kappa", "1", "--sigma", "3", "--grid", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("G=7"));
}

#[test]
fn export_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bundle.json");
    let o = phasekit(&["export", "--k", "2", "--phi", "0.2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["phase_operators"].as_array().unwrap().len(), 4);
    assert_eq!(v["phase_states"].as_array().unwrap().len(), 6);
    let ops = phasekit::io::operators_from_json(&v["operators"].to_string()).unwrap();
    assert_eq!(ops.len(), 7);

    let o = phasekit(&["export", "--kappa", "0.5", "--sigma", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["shifts"].as_array().unwrap().len(), 3);
}
