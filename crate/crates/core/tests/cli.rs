use std::path::PathBuf;
use std::process::Command;

use fnbrack::cli::scenario::Scenario;
use fnbrack::cli::{run_scenario, RunOptions, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn fnbrack(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fnbrack"))
        .args(args)
        .env("FNBRACK_THREADS", "2")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn fixtures_pass_or_fail_as_intended() {
    for (name, code) in [
        ("heisenberg-curvature.json", EXIT_PASS),
        ("fn-defining-property.json", EXIT_PASS),
        ("gauge-connection.json", EXIT_PASS),
        ("perturbed-tower.json", EXIT_FAIL),
    ] {
        let (got, out) = fnbrack(&["run", fixture(name).to_str().unwrap()]);
        assert_eq!(got, code, "{name}: {out}");
    }
}

#[test]
fn heisenberg_scenario_residual() {
    let sc = Scenario::load(&fixture("heisenberg-curvature.json")).unwrap();
    let r = run_scenario(&sc, &RunOptions::default()).unwrap();
    let h = r.suites.iter().find(|s| s.suite == "heisenberg-curvature").unwrap();
    assert!(h.pass && h.max_residual < 1e-10);
}

#[test]
fn report_json_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let scenario = fixture("full-suite.json");
    for p in [&a, &b] {
        let (code, _) = fnbrack(&[
            "run",
            scenario.to_str().unwrap(),
            "--seed",
            "5",
            "--zero-timing",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_PASS);
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);

    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["seed"], 5);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 16);
    let mut keys: Vec<&str> = suites[0].as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["max_residual", "millis", "pass", "samples", "suite", "tolerance"]);
    let names: Vec<&str> = suites.iter().map(|s| s["suite"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
}

#[test]
fn tolerance_override_can_fail_a_run() {
    let (code, out) = fnbrack(&["run", fixture("heisenberg-curvature.json").to_str().unwrap(), "--tol", "0"]);
    assert_eq!(code, EXIT_FAIL, "{out}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "{ not json",
        r#"{"suites": []}"#,
        r#"{"suites": [{"suite": "no-such-suite"}]}"#,
        r#"{"suites": [{"suite": "nijenhuis", "forms": ["K"]}]}"#,
        r#"{"forms": {"K": {"dim": 2, "degree": 1, "coeffs": "x1 +"}}, "suites": [{"suite": "nijenhuis"}]}"#,
        r#"{"forms": {"K": {"dim": 2, "degree": 1, "coeffs": "1;2"}}, "suites": [{"suite": "nijenhuis"}]}"#,
        r#"{"groupoid": {"zoo": "nowhere"}, "suites": [{"suite": "nerve-delta"}]}"#,
        r#"{"suites": [{"suite": "nerve-delta"}]}"#,
        r#"{"suites": [{"suite": "nijenhuis"}], "extra_field": 1}"#,
    ];
    for (i, src) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.json"));
        std::fs::write(&path, src).unwrap();
        let (code, out) = fnbrack(&["run", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_CONFIG, "case {i}: {out}");
    }
    assert_eq!(fnbrack(&["run", "/nonexistent.json"]).0, EXIT_CONFIG);
    assert_eq!(fnbrack(&["frobnicate"]).0, EXIT_CONFIG);
    let out = Command::new(env!("CARGO_BIN_EXE_fnbrack"))
        .args(["list-zoo"])
        .env("FNBRACK_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn non_multiplicative_scenario_fails() {
    let sc = Scenario::from_json(
        r#"{
            "groupoid": {"zoo": "pair", "dim": 1},
            "forms": {
                "K": {"dim": 2, "degree": 1, "coeffs": "x1; 0; 0; 1"},
                "K_M": {"dim": 1, "degree": 1, "coeffs": "1"}
            },
            "suites": [{"suite": "multiplicative", "forms": ["K", "K_M"]}]
        }"#,
    )
    .unwrap();
    let r = run_scenario(&sc, &RunOptions::default()).unwrap();
    assert!(!r.pass && r.suites[0].max_residual > 1e-3);
}

#[test]
fn subcommands() {
    // [x∂y, ∂x] = −∂y
    let (code, out) = fnbrack(&[
        "bracket", "--dim", "2", "--k", "0; x1", "--k-degree", "0", "--l", "1; 0", "--l-degree", "0", "--at", "0.4,-0.3",
    ]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.trim(), "2_[] = -1");

    let (code, out) = fnbrack(&[
        "curvature", "--dim", "3", "--k", "0;0;0; 0;0;0; 0;-x1;1", "--at", "0,0,0", "--x", "1,0,0", "--y", "0,1,0",
    ]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.trim(), "(0, 0, 1)");

    let (code, out) = fnbrack(&["nijenhuis", "--dim", "2", "--k", "0;-1;1;0", "--at", "0.1,0.2"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.trim(), "all components vanish");

    let (code, out) = fnbrack(&["check-mult", "--zoo", "pair", "--dim", "1"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let (code, _) = fnbrack(&["check-mult", "--zoo", "pair", "--dim", "1", "--k", "x1;0;0;1", "--k-m", "1"]);
    assert_eq!(code, EXIT_FAIL);

    let (code, out) = fnbrack(&["verify-suite", "nerve-simplicial", "--zoo", "aff1"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let (code, out) = fnbrack(&["list-zoo"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("semidirect-pair") && out.contains("nerve-bss"));
}
