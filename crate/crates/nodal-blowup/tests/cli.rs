//! Exit codes, artifact shape and schema validity of the binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nodal-blowup"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn schema(name: &str) -> Value {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))).unwrap()
}

/// Parses stdout as one JSON document and validates it.
fn json_artifact(out: &Output, schema_name: &str) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"));
    let s = schema(schema_name);
    let validator = jsonschema::validator_for(&s).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}");
    v
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn constants_dim10_exact_renders_threshold_relation() {
    let out = run(&["constants", "--dim", "10", "--exact", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_artifact(&out, "constants");
    let rel = v["exact"]["a10_relation"].as_str().unwrap();
    assert!(rel.contains("(5/567)*omega_9") && rel.ends_with("[holds]"), "{rel}");
    assert_eq!(v["exact"]["omega"], "1/12 * pi^5");
}

#[test]
fn constants_text_mode_lists_every_key() {
    let out = run(&["constants", "--dim", "11"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["omega", "kn_pow", "lambda_n", "cn", "an"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "missing {key}");
    }
}

#[test]
fn classify_dim8_is_compact() {
    let out = run(&["classify", "--dim", "8", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_artifact(&out, "classify");
    assert_eq!(v["verdict"], "compact_below_minimal_level");
    let out = run(&["classify", "--dim", "12", "--lcf", "true", "--perturbation", "nonpos"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().split_whitespace().next(), Some("blowup_constructible"));
}

#[test]
fn classify_rejects_inconsistent_flags() {
    let out = run(&["classify", "--dim", "12", "--lcf", "true", "--weyl-nonzero", "true"]);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn weyl_sample_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("w.json");
    let out = run(&["weyl", "sample", "--dim", "6", "--seed", "3", "--out", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty(), "artifact went to --out");
    let text = std::fs::read_to_string(&spec).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema("weyl-spec")).unwrap();
    assert!(validator.is_valid(&v));
    let out = run(&["weyl", "validate", "--spec", spec.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let rep = json_artifact(&out, "weyl-validate");
    assert_eq!(rep["accepted"], true);
}

#[test]
fn weyl_validate_flags_lone_component() {
    // a single W_1212 entry has no W_2112 = -W_1212 partner
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("w.json");
    std::fs::write(&spec, r#"{"kind":"full","n":4,"entries":[[1,2,1,2,1.0]]}"#).unwrap();
    let out = run(&["weyl", "validate", "--spec", spec.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 3);
    let rep = json_artifact(&out, "weyl-validate");
    assert!(rep["antisymmetry_first"].as_f64().unwrap() > 0.5);
}

#[test]
fn missing_spec_is_io_error() {
    let out = run(&["weyl", "validate", "--spec", "/nonexistent/w.json"]);
    assert_eq!(code(&out), 2);
    let out = run(&["saddle", "--spec", "/nonexistent/w.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_spec_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("w.json");
    std::fs::write(&spec, r#"{"kind":"full","n":4,"entries":[[1,2,1,2]]}"#).unwrap();
    assert_eq!(code(&run(&["weyl", "validate", "--spec", spec.to_str().unwrap()])), 1);
    std::fs::write(&spec, r#"{"kind":"diagonal","A":[[0,1],[1,0]],"extra":true}"#).unwrap();
    assert_eq!(code(&run(&["weyl", "coercivity", "--spec", spec.to_str().unwrap()])), 1);
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(code(&run(&["constants"])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["landscape", "--dim", "11", "--t-range", "1:2"])), 1);
    assert_eq!(code(&run(&["saddle", "--dim", "11", "--eta", "0.1"])), 1);
}

#[test]
fn verify_all_rejects_unknown_keys() {
    let out = run(&["verify-all", "--tolerance", "no_such=1"]);
    assert_eq!(code(&out), 1);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"dim": 11, "mystery": 2}"#).unwrap();
    assert_eq!(code(&run(&["verify-all", "--config", cfg.to_str().unwrap()])), 1);
    std::fs::write(&cfg, r#"{"tolerances": {"ratio_bandwidth": 2}}"#).unwrap();
    assert_eq!(code(&run(&["verify-all", "--config", cfg.to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["verify-all", "--config", "/nonexistent/run.json"])), 2);
    assert_eq!(code(&run(&["verify-all", "--criteria", "12"])), 1);
}

#[test]
fn run_config_file_is_schema_valid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let text = r#"{"dim": 11, "seed": 5, "format": "json", "criteria": [1, 10], "tolerances": {"ratio_band": 0.4}}"#;
    std::fs::write(&cfg, text).unwrap();
    let v: Value = serde_json::from_str(text).unwrap();
    assert!(jsonschema::validator_for(&schema("run-config")).unwrap().is_valid(&v));
    let out = run(&["verify-all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json_artifact(&out, "verify-all");
    assert_eq!(rep["config"]["tolerances"]["ratio_band"], 0.4);
    assert!(rep["checks"].as_array().unwrap().iter().all(|c| c["criterion"] == 1 || c["criterion"] == 10));
}

#[test]
fn sabotaged_tolerance_names_failing_checks() {
    let out = run(&["verify-all", "--criteria", "2", "--tolerance", "weyl_symmetry=1e-30", "--json"]);
    assert_eq!(code(&out), 3);
    let rep = json_artifact(&out, "verify-all");
    let failed: Vec<&str> = rep["failed"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(failed.len(), 3, "{failed:?}");
    assert!(failed.iter().all(|f| f.contains("symmetry residual")));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("failed: [2] n = 11: symmetry residual"), "{stderr}");
}

#[test]
fn saddle_dim11_certificate_passes() {
    let out = run(&["saddle", "--dim", "11", "--u0", "1", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_artifact(&out, "saddle");
    assert_eq!(v["verdict"], "pass");
    assert!(v["critical_point"]["distance"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn saddle_with_oversized_box_fails_check() {
    // a z-ball of radius 0.9 lies far outside the quartic model's range
    let out = run(&["saddle", "--dim", "11", "--eta", "0.3", "--eps", "0.9", "--json"]);
    assert_eq!(code(&out), 3);
    let v = json_artifact(&out, "saddle");
    assert_eq!(v["verdict"], "fail");
    assert!(v["critical_point"].is_null());
}

#[test]
fn landscape_writes_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let dirs = dir.path().join("dirs.txt");
    let mut line = vec!["0"; 11];
    line[1] = "2";
    std::fs::write(&dirs, format!("# one direction\n{}\n", line.join(","))).unwrap();
    let csv_path = dir.path().join("l.csv");
    let out = run(&[
        "landscape",
        "--dim",
        "11",
        "--t-range",
        "0.7:0.8:2",
        "--z-dirs",
        dirs.to_str().unwrap(),
        "--z-range",
        "0:0.1:3",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,s,direction-index,F,F_err"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn landscape_json_is_schema_valid() {
    let out = run(&["landscape", "--dim", "11", "--t-range", "1:1:1", "--z-range", "0:0.1:2", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_artifact(&out, "landscape");
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn curvature_check_reports_tables() {
    let out = run(&["curvature-check", "--dim", "11", "--eps", "1e-2,5e-3,2.5e-3", "--points", "1", "--json"]);
    let v = json_artifact(&out, "curvature-check");
    let tables = v["points"][0]["tables"].as_array().unwrap();
    let get = |name: &str| tables.iter().find(|t| t["name"] == name).unwrap()["within_band"].as_bool().unwrap();
    assert!(get("inverse_metric") && get("christoffel") && get("weyl_linearization"));
    // exit code follows the bands
    let expected = if v["passed"].as_bool().unwrap() { 0 } else { 3 };
    assert_eq!(code(&out), expected);
}

#[test]
fn bubble_check_json_is_schema_valid() {
    let out = run(&["bubble", "check", "--dim", "11", "--points", "10", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    json_artifact(&out, "bubble-check");
}

#[test]
fn coercivity_json_is_schema_valid() {
    let out = run(&["weyl", "coercivity", "--dim", "11", "--samples", "256", "--starts", "8", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_artifact(&out, "weyl-coercivity");
    assert!(v["minimum"].as_f64().unwrap() > 0.0);
}
