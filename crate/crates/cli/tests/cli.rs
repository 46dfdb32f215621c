//! The binary's flags, exit codes and output files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn haantjes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haantjes")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn euler_poisson_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = haantjes(&["verify", "--suite", "euler-poisson", "--seed", "7", "--points", "100", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&path);
    assert_eq!(v["suite"], "euler-poisson");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["params"]["points"], 100);
    let gz: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["id"].as_str().unwrap().contains(".gz.")).collect();
    assert_eq!(gz.len(), 7);
    assert!(gz.iter().all(|c| c["status"] == "pass" && c["points_sampled"] == 100));
}

#[test]
fn empty_sample_is_a_usage_error() {
    let o = haantjes(&["verify", "--suite", "all", "--points", "0"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_suite_and_bad_flags_are_usage_errors() {
    assert_eq!(code(&haantjes(&["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&haantjes(&["verify"])), 2);
    assert_eq!(code(&haantjes(&["verify", "--suite", "torsion", "--tol-deriv", "-1"])), 2);
    assert_eq!(code(&haantjes(&["integrate", "--init", "1,2,3"])), 2);
    assert_eq!(code(&haantjes(&["integrate", "--init", "1,2,3,4,5,6", "--dt", "0"])), 2);
}

#[test]
fn euler_suite_reports_k3_as_a_finding() {
    let o = haantjes(&["verify", "--suite", "euler", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let k3 = v["checks"].as_array().unwrap().iter().find(|c| c["id"] == "euler.chain.k3").unwrap();
    assert_eq!(k3["status"], "finding");
    assert!(k3["max_residual"].as_f64().unwrap() > 1e-3);
    assert!(k3["note"].as_str().unwrap().contains("dp_psi"));
}

#[test]
fn unwritable_report_path_is_an_io_error() {
    let o = haantjes(&["verify", "--suite", "torsion", "--points", "5", "--json", "/nonexistent-dir/r.json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = haantjes(&["verify", "--suite", "all", "--seed", "11", "--points", "20"]);
    let b = haantjes(&["verify", "--suite", "all", "--seed", "11", "--points", "20"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = haantjes(&["verify", "--suite", "all", "--seed", "12", "--points", "20"]);
    assert_ne!(a.stdout, c.stdout);
}

fn max_drift(o: &Output) -> f64 {
    let text = stdout(o);
    let line = text.lines().find(|l| l.starts_with("max drift")).unwrap();
    line.rsplit(' ').next().unwrap().parse().unwrap()
}

#[test]
fn equilibrium_has_zero_drift() {
    let o = haantjes(&["integrate", "--init", "0,0,1,0,0,1", "--dt", "0.01", "--tmax", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().filter(|l| l.starts_with("drift")).all(|l| l.ends_with("0.000000e0")));
    assert_eq!(max_drift(&o), 0.0);
}

#[test]
fn halving_the_step_reduces_drift_about_sixteenfold() {
    let init = "2.4,-3.3,4.5,0.6,-0.3,0.74";
    let coarse = haantjes(&["integrate", "--init", init, "--dt", "1e-3", "--tmax", "10"]);
    let fine = haantjes(&["integrate", "--init", init, "--dt", "5e-4", "--tmax", "10"]);
    let ratio = max_drift(&coarse) / max_drift(&fine);
    assert!((8.0..=32.0).contains(&ratio), "{ratio}");
}

#[test]
fn zero_horizon_writes_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = haantjes(&["integrate", "--init", "0.1,-0.2,0.3,0.4,0.5,-0.6", "--tmax", "0", "--csv", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "t,w1,w2,w3,g1,g2,g3,F1,F2,F3,F4,h0,h1,h2");
    let row: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(&row[..7], &[0.0, 0.1, -0.2, 0.3, 0.4, 0.5, -0.6]);
}

#[test]
fn blow_up_exits_with_the_last_valid_time() {
    let o = haantjes(&["integrate", "--init", "1e100,1e100,1e100,1e100,1e100,1e100", "--dt", "1", "--tmax", "100"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("last valid time"));
}

#[test]
fn unwritable_csv_is_an_io_error() {
    let o = haantjes(&["integrate", "--init", "0,0,1,0,0,1", "--tmax", "0", "--csv", "/nonexistent-dir/t.csv"]);
    assert_eq!(code(&o), 3);
}
