use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_sepradius");

fn sepradius(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn radius_json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["radius", "--json"];
    full.extend_from_slice(args);
    let out = sepradius(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn radius_for_presets_and_raw_flags() {
    let cases = [("sim1-caseA", 5.30), ("sim1-caseB", 14.30), ("sim1-caseC", 22.31), ("exp2", 0.71)];
    for (name, want) in cases {
        let doc = radius_json(&["--preset", name]);
        let got = doc["report"]["r_s_designed"].as_f64().unwrap();
        assert!((got - want).abs() <= 0.005, "{name}: {got}");
    }
    let doc = radius_json(&["--r-m", "5", "--r-o", "10", "--l", "5", "--v-m", "10", "--v-o", "5"]);
    let got = doc["report"]["r_s_designed"].as_f64().unwrap();
    let r_v: f64 = 3.0;
    assert!((got - (15.0f64.hypot(r_v) - 10.0)).abs() < 1e-9);
    assert!(doc.get("stated").is_none());

    let exp3 = radius_json(&["--preset", "exp3"]);
    assert_eq!(exp3["stated"]["below_bound"], true);
    let exp2 = radius_json(&["--preset", "exp2"]);
    assert_eq!(exp2["stated"]["below_bound"], false);
}

#[test]
fn radius_without_source_needs_all_flags() {
    let out = sepradius(&["radius", "--r-m", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--v-o"));
}

#[test]
fn run_exit_codes() {
    assert_eq!(sepradius(&["run", "--preset", "sim1-caseB"]).status.code(), Some(0));
    let adv = sepradius(&["run", "--preset", "sim1-caseC-adversarial"]);
    assert_eq!(adv.status.code(), Some(1));
    assert!(stdout(&adv).contains("VIOLATION"));
    assert_eq!(sepradius(&["run", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(sepradius(&["run", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    assert_eq!(sepradius(&["run"]).status.code(), Some(2));
    assert_eq!(sepradius(&["run", "--preset", "sim1-caseB", "--dt", "0.03"]).status.code(), Some(2));
    assert_eq!(sepradius(&["bogus"]).status.code(), Some(2));
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    sepradius(&args)
}

#[test]
fn run_writes_outputs_and_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        assert_eq!(run_into(dir, &["--preset", "sim2-caseB"]).status.code(), Some(0));
    }
    let trace_a = fs::read(a.join("trace.csv")).unwrap();
    assert_eq!(trace_a, fs::read(b.join("trace.csv")).unwrap());
    assert_eq!(fs::read(a.join("verdict.json")).unwrap(), fs::read(b.join("verdict.json")).unwrap());

    let text = String::from_utf8(trace_a).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t_s");
    assert!(header.contains(&"o3_dist_est") && header.contains(&"min_dist_true"));
    assert_eq!(lines.clone().count(), 2001);
    assert!(lines.all(|l| l.split(',').count() == header.len()));

    let verdict: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["safe"], true);
    assert_eq!(verdict["verdict"]["obstacles"].as_array().unwrap().len(), 3);
    assert!(fs::read_to_string(a.join("verdict.txt")).unwrap().contains("SAFE"));

    let c = tmp.path().join("c");
    run_into(&c, &["--preset", "sim2-caseB", "--seed", "8"]);
    assert_ne!(fs::read(a.join("trace.csv")).unwrap(), fs::read(c.join("trace.csv")).unwrap());
}

#[test]
fn exported_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp2.json");
    let out = sepradius(&["export", "--preset", "exp2", "--out", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&cfg).unwrap(), stdout(&sepradius(&["export", "--preset", "exp2"])));

    let (p, c) = (tmp.path().join("p"), tmp.path().join("c"));
    run_into(&p, &["--preset", "exp2"]);
    run_into(&c, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(fs::read(p.join("trace.csv")).unwrap(), fs::read(c.join("trace.csv")).unwrap());

    fs::write(&cfg, "{\"duration_s\": 1}").unwrap();
    let bad = sepradius(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn list_and_unknown_suite() {
    let listed = stdout(&sepradius(&["list"]));
    assert_eq!(listed.lines().count(), sepradius::presets::PRESET_NAMES.len());
    assert!(listed.lines().any(|l| l == "sim1-caseC-adversarial"));
    assert_eq!(sepradius(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_single_suite() {
    let out = sepradius(&["verify", "--suite", "prop2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS prop2"));
}
