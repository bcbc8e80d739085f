use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/fx_fixture.csv")
}

fn fxbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fxbell")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn input() -> String {
    fixture().display().to_string()
}

#[test]
fn scan_reports_violations_and_gamma() {
    let v = json(&fxbell(&["scan", "--input", &input()]));
    assert_eq!(v["tests"], 18480);
    assert_eq!(v["violation_count"], 2375);
    assert_eq!(v["dataset"]["n"], 21);
    assert_eq!(v["dataset"]["dropped"], 1);
    assert_eq!(v["correlations"]["records"], 693);
    let top = &v["violations"][0];
    for key in ["currencies", "variant", "lhs", "gamma", "slack", "sigma"] {
        assert!(!top[key].is_null(), "missing {key}");
    }
    // every violation comes with its Γ, and the model-free bound holds
    for e in v["violations"].as_array().unwrap() {
        assert!(e["slack"].as_f64().unwrap() >= -1e-9);
    }
}

#[test]
fn scan_threshold_and_csv() {
    let all = json(&fxbell(&["scan", "--input", &input()]));
    let some = json(&fxbell(&["scan", "--input", &input(), "--threshold", "0.5"]));
    assert_eq!(all["violation_count"], some["violation_count"]);
    let listed = some["violations"].as_array().unwrap();
    assert!(listed.len() < all["violations"].as_array().unwrap().len());
    assert!(listed.iter().all(|e| e["lhs"].as_f64().unwrap() >= 0.5));

    let csv = fxbell(&["scan", "--input", &input(), "--format", "csv", "--threshold", "0.5"]);
    assert!(csv.status.success());
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), listed.len() + 1);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = fxbell(&["scan", "--input", &input(), "--with-gamma", "--report", path.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    // one LP per ordered triple, shared by both sign variants
    assert_eq!(v["gamma_evaluations"], 18480 / 2);
    assert_eq!(v["config"]["with_gamma"], true);

    let s1 = fxbell(&["synth", "singlet", "--n", "500", "--seed", "9"]);
    let s2 = fxbell(&["synth", "singlet", "--n", "500", "--seed", "9"]);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn pooled_has_no_violations() {
    for policy in ["plus", "minus", "drop"] {
        let v = json(&fxbell(&["pooled", "--input", &input(), "--zero-sign", policy]));
        assert_eq!(v["violation_count"], 0, "{policy}");
        assert_eq!(v["tests"], 18480);
    }
}

#[test]
fn gamma_text_and_json() {
    let out = fxbell(&["gamma", "--input", &input(), "--triple", "GBP,CNY,SGD"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("integral    true"), "{text}");

    let v = json(&fxbell(&["gamma", "--input", &input(), "--triple", "GBP,CNY,SGD", "--format", "json"]));
    let gamma = v["gamma"].as_f64().unwrap();
    assert!((gamma - 13.0 / 21.0).abs() < 1e-12);
    // the top plus violation saturates the bound
    assert!(v["slack_plus"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn ingest_writes_signs_and_segments() {
    let dir = tempfile::tempdir().unwrap();
    let signs = dir.path().join("signs.json");
    let seg = dir.path().join("seg.json");
    let v = json(&fxbell(&[
        "ingest",
        "--input",
        &input(),
        "--signs",
        signs.to_str().unwrap(),
        "--segmented",
        seg.to_str().unwrap(),
    ]));
    assert_eq!(v["dataset"]["records"], 65);
    assert_eq!(v["correlations"].as_array().unwrap().len(), 693);

    let s: Value = serde_json::from_slice(&std::fs::read(&signs).unwrap()).unwrap();
    assert_eq!(s["signs"].as_array().unwrap().len(), 64);
    assert_eq!(s["dates"].as_array().unwrap().len(), 64);
    let d: Value = serde_json::from_slice(&std::fs::read(&seg).unwrap()).unwrap();
    assert_eq!(d["segments"].as_array().unwrap().len(), 3);
    assert_eq!(d["n"], 21);

    let csv = fxbell(&["ingest", "--input", &input(), "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 694);
}

#[test]
fn synth_writes_data_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.json");
    let v = json(&fxbell(&["synth", "random", "--n", "300", "--seed", "42", "--out", data.to_str().unwrap()]));
    assert!(v["gap"].as_f64().unwrap() >= -1e-9);
    assert_eq!(v["config"]["seed"], 42);
    let d: Value = serde_json::from_slice(&std::fs::read(&data).unwrap()).unwrap();
    assert_eq!(d["n"], 300);

    let v = json(&fxbell(&[
        "synth", "singlet", "--n", "2000", "--seed", "42", "--c1", "0.70710678", "--c2", "-0.70710678", "--c3", "0",
    ]));
    assert_eq!(v["saturated"], true);
}

#[test]
fn fine_feasible_and_infeasible() {
    let out = fxbell(&["fine", "--moments", "0.1,0.2,-0.1,0.5,0.3,-0.2", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["feasible"], true);
    let f: Vec<f64> = v["trivariate"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(f.len(), 8);
    assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    // infeasible moments are a result, not an error
    let v = json(&fxbell(&["fine", "--moments", "0,0,0,0.9,0.9,-0.9", "--format", "json"]));
    assert_eq!(v["feasible"], false);
    assert!(v["trivariate"].is_null());
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn demo_bell_shows_violation() {
    let out = fxbell(&["demo", "bell"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.414214"), "{text}");
    assert!(text.contains("violated"));
    let v = json(&fxbell(&["demo", "bell", "--format", "json"]));
    assert_eq!(v["violated"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "date,A,B\n2000-01-01,1,2\n").unwrap();
    assert_eq!(fxbell(&["scan", "--input", bad.to_str().unwrap()]).status.code(), Some(3));
    let missing = dir.path().join("missing.csv");
    assert_eq!(fxbell(&["scan", "--input", missing.to_str().unwrap()]).status.code(), Some(3));

    assert_eq!(fxbell(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fxbell(&["scan"]).status.code(), Some(2));
    assert_eq!(fxbell(&["scan", "--input", &input(), "--zero-sign", "zero"]).status.code(), Some(2));
    assert_eq!(fxbell(&["gamma", "--input", &input(), "--triple", "EUR,CHF"]).status.code(), Some(2));
    assert_eq!(fxbell(&["gamma", "--input", &input(), "--triple", "EUR,XXX,DKK"]).status.code(), Some(2));
    assert_eq!(fxbell(&["fine", "--moments", "0.1,0.2"]).status.code(), Some(2));
    assert_eq!(fxbell(&["synth", "singlet", "--c1", "1.5"]).status.code(), Some(2));
    assert_eq!(fxbell(&["synth", "random", "--n", "0"]).status.code(), Some(2));
}
