use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn siclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siclab")).args(args).env("SICLAB_THREADS", "2").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON certificate")
}

fn all_pass(cert: &Value) -> bool {
    cert["checks"].as_array().unwrap().iter().all(|c| c["pass"] == Value::Bool(true))
}

#[test]
fn tower_for_radicand_five() {
    let out = siclab(&["tower", "--D", "5", "--max-r", "4", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let cert = json(&out);
    assert_eq!(cert["command"], "tower");
    assert_eq!(cert["results"]["dims"], serde_json::json!(["4", "8", "19", "48"]));
    assert!(all_pass(&cert));
}

#[test]
fn dim_to_radicand() {
    let cert = json(&siclab(&["dim2D", "--d", "19"]));
    assert_eq!(cert["results"]["D"], 5);
    assert_eq!(cert["results"]["r"], 3);
}

#[test]
fn unit_order_and_rayclass() {
    let out = siclab(&["unit-order", "--D", "5", "--max-r", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["entries"][0]["order"], 6);
    let out = siclab(&["rayclass", "--d", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["certs"][1]["h_m"], 6);
}

#[test]
fn heisenberg_and_clifford() {
    assert_eq!(siclab(&["heisenberg", "--d", "6"]).status.code(), Some(0));
    let out = siclab(&["clifford", "--d", "12", "--kind", "fa"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["order_mod_d"], 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(siclab(&["tower"]).status.code(), Some(2));
    assert_eq!(siclab(&["nonsense"]).status.code(), Some(2));
    assert_eq!(siclab(&["clifford", "--d", "7", "--kind", "fa"]).status.code(), Some(2));
    assert_eq!(siclab(&["sic", "verify", "--in", "/nonexistent/f.json"]).status.code(), Some(2));
}

#[test]
fn failed_checks_exit_one() {
    let out = siclab(&["sic", "search", "--d", "5", "--restarts", "1", "--max-iter", "1", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!all_pass(&json(&out)));
}

#[test]
fn certificate_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = siclab(&["appendix19", "--quiet", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(all_pass(&cert));
    assert_eq!(cert["checks"].as_array().unwrap().len(), 4);
}

fn search(dir: &Path, name: &str, seed: &str) -> (Output, std::path::PathBuf) {
    let path = dir.join(name);
    let out = siclab(&["sic", "search", "--d", "4", "--seed", seed, "--out", path.to_str().unwrap()]);
    (out, path)
}

#[test]
fn search_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = search(dir.path(), "f.json", "7");
    assert_eq!(out.status.code(), Some(0));
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(stored["d"], 4);
    assert_eq!(stored["symmetry"], "Fz");
    assert_eq!(stored["vector"].as_array().unwrap().len(), 4);

    let out = siclab(&["sic", "verify", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let cert = json(&out);
    let recomputed = cert["results"]["max_deviation"].as_f64().unwrap();
    assert!((recomputed - stored["residual"].as_f64().unwrap()).abs() <= 1e-14);

    let out = siclab(&["sic", "overlaps", "--in", path.to_str().unwrap(), "--stabilizer"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(json(&out)["results"]["stabilizer"]["report"]["order"].as_u64().unwrap() >= 3);
}

#[test]
fn search_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, pa) = search(dir.path(), "a.json", "11");
    let (b, pb) = search(dir.path(), "b.json", "11");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
    let single = Command::new(env!("CARGO_BIN_EXE_siclab"))
        .args(["sic", "search", "--d", "4", "--seed", "11"])
        .env("SICLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
}
