use std::process::{Command, Output};

use serde_json::Value;

fn heckekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heckekit"))
        .args(args)
        .env_remove("HECKEKIT_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = heckekit(&full);
    let v: Value = serde_json::from_slice(&o.stdout).expect("stdout is JSON");
    (v, o.status.code().unwrap())
}

#[test]
fn homrank_of_bs() {
    let o = heckekit(&["homrank", "s", ""]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "v");
    assert_eq!(stdout(&heckekit(&["homrank", "s", "s"])), "1 + v^2");
}

#[test]
fn info_reports_group_order() {
    let a2 = stdout(&heckekit(&["info"]));
    assert!(a2.contains("|W| = 6"), "{a2}");
    let b2 = stdout(&heckekit(&["info", "--type", "B2"]));
    assert!(b2.contains("|W| = 8"), "{b2}");
}

#[test]
fn json_reports_carry_the_schema() {
    let (v, code) = json(&["klpoly", "e", "sts"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "heckekit/v1");
    assert_eq!(v["ok"], true);
    assert_eq!(v["result"]["coefficients"], serde_json::json!([1]));
}

#[test]
fn standard_checks_pass() {
    let (v, code) = json(&["standard", "sts", "--check", "char,perverse,dual"]);
    assert_eq!(code, 0, "{v}");
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 3);
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn perverse_convolution_in_both_categories() {
    for extra in [&[][..], &["--re"][..]] {
        let mut args = vec!["perverse", "D:s", "N:t"];
        args.extend(extra);
        let (v, code) = json(&args);
        assert_eq!(code, 0, "{v}");
    }
}

#[test]
fn bad_generator_is_an_error() {
    let o = heckekit(&["homrank", "q", "s"]);
    assert_eq!(o.status.code(), Some(2));
    let (v, code) = json(&["homrank", "q", "s"]);
    assert_eq!(code, 2);
    assert_eq!(v["ok"], false);
    assert!(v["error"].as_str().unwrap().contains("q"));
}

#[test]
fn unsupported_valence_fails_the_suite() {
    let (v, code) = json(&["verify", "ringel", "B2"]);
    assert_eq!(code, 1);
    assert_eq!(v["ok"], false);
    let detail = v["checks"][0]["detail"].as_str().unwrap();
    assert!(detail.contains("m = 4"), "{detail}");
}

#[test]
fn verify_suites_pass_in_a2() {
    for suite in ["groth", "relations", "inverses", "simple", "tilting"] {
        let (v, code) = json(&["verify", suite, "A2", "--jobs", "2"]);
        assert_eq!(code, 0, "{suite}: {v}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"realization": {"type": "B2"}, "format": "json"}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = heckekit(&["info", "--config", p]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["order"], 8, "{v}");
    let o = heckekit(&["info", "--config", p, "--type", "A1xA1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["order"], 4, "{v}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"windw": 3}"#).unwrap();
    let o = heckekit(&["info", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_directory_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let o = heckekit(&["klpoly", "e", "sts", "--cache", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
    let again = heckekit(&["klpoly", "e", "sts", "--cache", dir.path().to_str().unwrap()]);
    assert_eq!(stdout(&o), stdout(&again));
}
