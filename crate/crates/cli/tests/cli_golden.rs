mod common;

use std::process::Command as Process;

use common::{check_golden, GOLDEN};
use conflap::{run_captured, EXIT_FAIL, EXIT_LIMIT, EXIT_PASS, EXIT_USAGE};
use conflap_core::Report;

#[test]
fn golden_outputs() {
    for (name, args, code) in GOLDEN {
        check_golden(name, args, *code).unwrap();
    }
}

#[test]
fn json_round_trip() {
    for (name, args, _) in GOLDEN.iter().filter(|g| g.0.ends_with(".json")) {
        let out = run_captured(args);
        let report: Report = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
        assert_eq!(again, out.stdout, "{name}");
        assert_eq!(serde_json::from_str::<Report>(&again).unwrap(), report);
    }
}

#[test]
fn exit_code_tracks_json_status() {
    for (name, args, code) in GOLDEN.iter().filter(|g| g.0.ends_with(".json")) {
        let out = run_captured(args);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["status"] == "pass", *code == EXIT_PASS, "{name}");
        assert_eq!(out.code, *code, "{name}");
    }
}

#[test]
fn json_field_names() {
    let out = run_captured(&["verify", "rn", "--n", "1", "--k", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    keys.sort();
    assert_eq!(keys, ["cases", "command", "params", "seed", "status", "tool", "version"]);
    let case = &v["cases"][0];
    assert_eq!(case["id"], "rn.n1.k1");
    assert!(case.get("witness").is_none());
}

#[test]
fn exit_code_mapping() {
    assert_eq!(run_captured(&["verify", "rn", "--n", "3", "--k", "3"]).code, EXIT_PASS);
    let bug = run_captured(&["verify", "comm", "--n", "9", "--w-range", "-3..3", "--inject-bug", "--format", "json"]);
    assert_eq!(bug.code, EXIT_FAIL);
    let v: serde_json::Value = serde_json::from_str(&bug.stdout).unwrap();
    assert!(v["cases"][0]["witness"].as_str().unwrap().contains("has term"));
    let usage = run_captured(&["verify", "main", "--k", "0"]);
    assert_eq!(usage.code, EXIT_USAGE);
    assert!(usage.stdout.is_empty());
    assert_eq!(run_captured(&["verify", "rn", "--n", "0"]).code, EXIT_USAGE);
    assert_eq!(run_captured(&["verify", "comm", "--w-range", "2..1"]).code, EXIT_USAGE);
    assert_eq!(run_captured(&["verify", "covariance", "--motion", "shear"]).code, EXIT_USAGE);
    assert_eq!(run_captured(&["verify", "covariance", "--n", "3", "--motion", "inversion", "--radical", "off"]).code, EXIT_USAGE);
    assert_eq!(run_captured(&["numcheck", "--samples", "0"]).code, EXIT_USAGE);
    assert_eq!(run_captured(&["verify", "rn", "--n", "4", "--k", "4", "--term-cap", "10"]).code, EXIT_LIMIT);
}

#[test]
fn binary_honours_term_cap_environment() {
    let bin = env!("CARGO_BIN_EXE_conflap");
    let status = Process::new(bin)
        .args(["verify", "rn", "--n", "4", "--k", "4"])
        .env("CONFLAP_TERM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_LIMIT));
    let status = Process::new(bin)
        .args(["verify", "rn", "--n", "4", "--k", "4", "--term-cap", "100000"])
        .env("CONFLAP_TERM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_PASS));
}

#[test]
fn deterministic_for_fixed_seed() {
    let args = ["numcheck", "--n-max", "2", "--k-max", "1", "--samples", "4", "--seed", "7", "--format", "json"];
    assert_eq!(run_captured(&args).stdout, run_captured(&args).stdout);
    let other = ["numcheck", "--n-max", "2", "--k-max", "1", "--samples", "4", "--seed", "8", "--format", "json"];
    assert_ne!(run_captured(&args).stdout, run_captured(&other).stdout);
}
