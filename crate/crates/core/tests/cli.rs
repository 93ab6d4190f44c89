use std::process::{Command, Output};

use matvar_core::matcore::{Matrix, MatrixRecord, PdMatrix};

fn matvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matvar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn log_value(o: &Output) -> f64 {
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    v["log_value"].as_f64().unwrap()
}

#[test]
fn eval_values_and_domain_errors() {
    let o = matvar(&["eval", "--family", "gamma", "--case", "real", "--p", "2", "--alpha", "1.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((log_value(&o) - (std::f64::consts::PI / 2.0).ln()).abs() < 1e-13);

    let o = matvar(&["eval", "--family", "beta1", "--case", "real", "--p", "2", "--alpha", "2", "--beta", "2", "--format", "json"]);
    assert!((log_value(&o) - (std::f64::consts::PI / 45.0).ln()).abs() < 1e-13);

    let o = matvar(&["eval", "--family", "gamma", "--case", "real", "--p", "2", "--alpha", "1.5"]);
    let text = stdout(&o);
    assert!(text.contains("log value:") && text.contains("linear value:"));

    let o = matvar(&["eval", "--family", "gamma", "--case", "real", "--p", "3", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("(p−1)/2 = 1"), "{err}");
}

#[test]
fn eval_reports_unrepresentable_linear_values() {
    let o = matvar(&["eval", "--family", "gamma", "--case", "complex", "--p", "8", "--alpha", "200", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["linear_value"].is_null());
    assert!(v["log_value"].as_f64().unwrap() > 709.0);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(matvar(&["eval", "--family", "beta1", "--p", "2", "--alpha", "2"]).status.code(), Some(2));
    assert_eq!(matvar(&["eval", "--family", "gamma", "--p", "2"]).status.code(), Some(2));
    assert_eq!(matvar(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(matvar(&["reduce", "--family", "gamma", "--p", "4", "--schedule", "3,2"]).status.code(), Some(2));
    assert_eq!(matvar(&["reduce", "--family", "beta2", "--case", "complex", "--p", "2"]).status.code(), Some(2));
}

#[test]
fn reduce_traces() {
    let o = matvar(&["reduce", "--family", "gamma", "--case", "real", "--p", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 4);
    assert_eq!(v["total"]["pi_exponent"], serde_json::json!({"num": 3, "den": 1}));

    let blocks = matvar(&["reduce", "--family", "gamma", "--p", "5", "--schedule", "3,2", "--format", "json"]);
    let ones = matvar(&["reduce", "--family", "gamma", "--p", "5", "--format", "json"]);
    let b: serde_json::Value = serde_json::from_slice(&blocks.stdout).unwrap();
    let o1: serde_json::Value = serde_json::from_slice(&ones.stdout).unwrap();
    assert_eq!(b["steps"].as_array().unwrap().len(), 2);
    assert_eq!(b["total"], o1["total"]);

    let o = matvar(&["reduce", "--family", "beta1", "--case", "complex", "--p", "2"]);
    let text = stdout(&o);
    assert!(text.contains("closed form:   B̃_2(α, β) = π^(1) Γ(α) Γ(α − 1) Γ(β) Γ(β − 1) / [Γ(α + β) Γ(α + β − 1)]"), "{text}");
    assert!(text.contains("match:         yes"));
    assert!(!text.contains("0.5"), "half-integers print as fractions");
}

#[test]
fn sample_is_reproducible_and_valid() {
    let args = ["sample", "--family", "gamma", "--case", "real", "--p", "2", "--alpha", "3", "--n", "10", "--seed", "7"];
    let a = matvar(&args);
    let b = matvar(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["seed"], 7);
    assert!(header["version"].is_string());
    let draws: Vec<MatrixRecord> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(draws.len(), 10);
    for d in &draws {
        assert!(d.to_pd::<f64>().is_ok());
    }

    let o = matvar(&["sample", "--family", "beta1", "--p", "2", "--alpha", "3", "--beta", "3", "--n", "5", "--seed", "1"]);
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        let u: Matrix<f64> = serde_json::from_str::<MatrixRecord>(line).unwrap().to_matrix().unwrap();
        assert!(PdMatrix::new(u.clone()).is_ok());
        assert!(PdMatrix::new(Matrix::identity(2).sub(&u)).is_ok());
    }
    assert_eq!(text.lines().count(), 6);

    let o = matvar(&["sample", "--family", "gamma", "--p", "3", "--alpha", "0.9", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn sample_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.jsonl");
    let o = matvar(&[
        "sample", "--family", "gamma", "--case", "complex", "--p", "2", "--alpha", "3", "--n", "3", "--seed", "5",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let rec: MatrixRecord = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert!(rec.to_pd::<num_complex::Complex64>().is_ok());
}

#[test]
fn verify_single_check_and_config_errors() {
    let o = matvar(&["verify", "--family", "gamma", "--p", "2", "--alpha", "1.5", "--oracle", "quadrature"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v[0]["rel_error"].as_f64().unwrap() <= 1e-4);
    assert_eq!(v[0]["pass"], true);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"checks\": [").unwrap();
    assert_eq!(matvar(&["verify", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(matvar(&["verify", "--config", "/nonexistent/suite.json"]).status.code(), Some(2));
    assert_eq!(matvar(&["verify"]).status.code(), Some(2));

    let failing = dir.path().join("failing.json");
    std::fs::write(&failing, r#"{"checks": [{"family": "gamma_real", "p": 3, "alpha": 1.0, "oracle": "mc"}]}"#).unwrap();
    let o = matvar(&["verify", "--config", failing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v[0]["error"].as_str().unwrap().contains("> 1"));

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "{}").unwrap();
    let o = matvar(&["verify", "--config", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[]");
}

#[test]
fn verify_default_suite_passes() {
    let o = Command::new(env!("CARGO_BIN_EXE_matvar"))
        .args(["verify", "--default", "--format", "text"])
        .env("MATVAR_THREADS", "2")
        .output()
        .unwrap();
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
