//! Black-box tests of the command-line binary: exit-code contract, JSON
//! output shape, and seed handling.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_charslope"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_input(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(body.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

const CUSP: &str = r#"{
    "p": 2, "e": 1, "vars": ["x"],
    "coeffs": { "2": [ { "c": 1, "exp": [3] } ] }
}"#;

#[test]
fn analyze_succeeds_with_exact_rationals() {
    let input = write_input("cli_cusp.json", CUSP);
    let out = run(&["analyze", &input, "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][0]["slope"], "3/2");
    assert_eq!(v["rows"][0]["v_ord"], "3/2");
}

#[test]
fn parse_error_exits_1() {
    let input = write_input("cli_bad.json", r#"{"p": 4, "e": 1, "vars": ["x"], "coeffs": {}}"#);
    let out = run(&["analyze", &input], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn out_of_scope_exits_3() {
    // tau >= 2 shape: resolve refuses rather than computing outside the regime
    let input = write_input(
        "cli_tau2.json",
        r#"{
            "p": 2, "e": 1, "vars": ["x", "y"],
            "coeffs": {
                "1": [ { "c": 1, "exp": [1, 0] } ],
                "2": [ { "c": 1, "exp": [0, 3] } ]
            }
        }"#,
    );
    let out = run(&["resolve", &input], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degenerate_input_exits_3() {
    let input = write_input(
        "cli_degen.json",
        r#"{
            "p": 2, "e": 1, "vars": ["x"],
            "coeffs": { "2": [ { "c": 1, "exp": [2] } ] }
        }"#,
    );
    let out = run(&["analyze", &input], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn env_seed_overrides_flag() {
    let input = write_input("cli_seed.json", CUSP);
    let args = ["verify", &input, "--suite", "monotonicity", "--seed", "1", "--count", "5", "--json"];
    let with_env = run(&args, &[("CHARSLOPE_SEED", "99")]);
    assert_eq!(with_env.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(v["report"]["seed"], 99);
}

#[test]
fn verify_is_deterministic() {
    let input = write_input("cli_det.json", CUSP);
    let args = ["verify", &input, "--suite", "slope-drop", "--seed", "5", "--count", "10", "--json"];
    let a = run(&args, &[]);
    let b = run(&args, &[]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pipeline_runs_scripted_blowup_then_resolve() {
    let input = write_input(
        "cli_pipe.json",
        r#"{
            "p": 2, "e": 1, "vars": ["x"],
            "coeffs": { "2": [ { "c": 1, "exp": [3] } ] },
            "pipeline": [
                { "cmd": "blowup", "center": ["z", "x"] },
                { "cmd": "resolve" }
            ]
        }"#,
    );
    let out = run(&["pipeline", &input, "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fragments"][0]["charts"][0]["slope_at_exceptional"], "1/2");
    assert_eq!(v["fragments"][1]["leaves"][0]["singular_points"], serde_json::json!([]));
}

#[test]
fn usage_error_exits_nonzero() {
    let out = run(&["frobnicate"], &[]);
    assert_ne!(out.status.code(), Some(0));
}
