use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqindex"))
        .args(args)
        .env("EQINDEX_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(name)).expect("report written");
    serde_json::from_str(&text).expect("valid json")
}

#[test]
fn verify_mq_exact_report() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["--quiet", "verify-mq", "--n", "4", "--instances", "50", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(d.path(), "verify-mq.json");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["max_abs_deviation"], 0.0);
    assert_eq!(v["exact"], true);
    assert!(v["anchor"].as_str().unwrap().contains("supertrace"));
}

#[test]
fn odd_n_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["verify-mq", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be even"));
    assert!(!d.path().join("verify-mq.json").exists());
}

#[test]
fn reports_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let out = run(d.path(), &["--quiet", "verify-clifford", "--n", "4", "--instances", "20", "--seed", "11"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let ra = std::fs::read(a.path().join("verify-clifford.json")).unwrap();
    let rb = std::fs::read(b.path().join("verify-clifford.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn index_circle_report() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["index", "--model", "circle", "--N", "64", "--w", "2", "--t", "0.1,0.5,1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["model"], "circle");
    assert_eq!(v["t_values"].as_array().unwrap().len(), 4);
    for (s, r) in v["str_index"].as_array().unwrap().iter().zip(v["idempotency_residual"].as_array().unwrap()) {
        assert!((s.as_f64().unwrap() - 2.0).abs() < 1e-9);
        assert!(r.as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn index_with_wrong_charge_flag() {
    let d = TempDir::new().unwrap();
    assert_eq!(run(d.path(), &["index", "--model", "circle", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["index", "--model", "sphere"]).status.code(), Some(2));
}

#[test]
fn getzler_constants_csv() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["--quiet", "getzler", "constants", "--q", "1..3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(d.path().join("getzler-constants.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,beta,delta,combination,target,abs_err"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((first[1] - 1.5f64.ln()).abs() < 1e-10);
    assert_eq!(lines.count(), 2);
}

#[test]
fn charform_sphere_index() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["--quiet", "charform", "--geometry", "sphere", "--density", "euler", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(d.path(), "charform.json");
    assert!((v["total"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn thom_and_star_suites_pass() {
    let d = TempDir::new().unwrap();
    assert_eq!(run(d.path(), &["--quiet", "thom", "--n", "2", "--samples", "3"]).status.code(), Some(0));
    assert_eq!(json(d.path(), "thom.json")["riemann_roch"]["pass"], true);
    assert_eq!(run(d.path(), &["--quiet", "getzler", "star", "--instances", "10"]).status.code(), Some(0));
}

#[test]
fn pair_degree_zero_and_refusal() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["pair", "--model", "torus", "--N", "12", "--k", "1", "--q", "0", "--t", "0.3,1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,tau_re,tau_im,target_re,target_im,abs_err,rel_err,status"));
    let out = run(d.path(), &["pair", "--model", "torus", "--N", "12", "--k", "1", "--q", "1", "--t", "0.5", "--growth", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("refused"));
    let csv = std::fs::read_to_string(d.path().join("pair.csv")).unwrap();
    assert!(csv.contains("0.5,,,,,,,refused"));
    assert_eq!(run(d.path(), &["pair", "--q", "1"]).status.code(), Some(2));
}
