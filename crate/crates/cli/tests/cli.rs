//! End-to-end checks of the `cgb-verify` binary: listing, exit codes and
//! the JSON report.

use serde_json::Value;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgb-verify"))
        .args(args)
        .env_remove("CGB_VERIFY_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_has_at_least_eighteen_scenarios() {
    let o = cli(&["list"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().count() >= 18);
}

#[test]
fn list_is_deterministic() {
    assert_eq!(stdout(&cli(&["list"])), stdout(&cli(&["list"])));
}

#[test]
fn list_filter_gives_a_subset() {
    let all = stdout(&cli(&["list"]));
    let some = stdout(&cli(&["list", "--filter", "discrete"]));
    assert!(!some.is_empty());
    assert!(some.lines().count() < all.lines().count());
    for l in some.lines() {
        let name = l.split_whitespace().next().unwrap();
        assert!(all.lines().any(|a| a.split_whitespace().next() == Some(name)));
    }
}

#[test]
fn unknown_filter_is_empty_and_succeeds() {
    let o = cli(&["list", "--filter", "no-such-module"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim().is_empty());
}

#[test]
fn unknown_scenario_exits_2() {
    assert_eq!(cli(&["run", "no-such-scenario"]).status.code(), Some(2));
}

#[test]
fn sphere_passes_at_order_24() {
    let o = cli(&["run", "cgb-sphere", "--quad-order", "24"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn under_resolved_sphere_exits_3_and_names_the_identity() {
    let o = cli(&["run", "cgb-sphere", "--quad-order", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cgb-sphere: ∫_S² Pf(∇) = 2"), "{err}");
}

#[test]
fn check_mode_uses_exit_0_and_1() {
    assert_eq!(cli(&["run", "cgb-sphere", "--check"]).status.code(), Some(0));
    assert_eq!(
        cli(&["run", "cgb-sphere", "--quad-order", "2", "--check"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn json_report_schema_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = cli(&["run", "cgb-sphere", "plane-frame", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "cgb-verify");
    let sc = v["scenarios"].as_array().unwrap();
    assert_eq!(sc.len(), 2);
    assert_eq!(sc[0]["name"], "cgb-sphere");
    assert!(sc[0]["wall_ms"].is_u64());
    let item = &sc[0]["items"][0];
    for key in ["identity", "computed", "expected", "error", "tol", "provenance", "pass"] {
        assert!(!item[key].is_null(), "missing {key}");
    }
    assert_eq!(item["provenance"], "paper");
    assert!(item["error"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["summary"]["total"], 2);
    assert_eq!(v["summary"]["passed"], 2);
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| {
        let p = dir.path().join(name);
        cli(&[
            "run",
            "stokes",
            "exterior-derivative",
            "--samples",
            "5",
            "--seed",
            "7",
            "--jobs",
            "2",
            "--json",
            p.to_str().unwrap(),
        ]);
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        for s in v["scenarios"].as_array_mut().unwrap() {
            s["wall_ms"] = Value::Null;
        }
        v
    };
    let a = read("a.json");
    assert_eq!(a, read("b.json"));
    assert_eq!(a["seed"], 7);
}

#[test]
fn failing_scenario_is_counted_in_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = cli(&[
        "run",
        "cgb-sphere",
        "plane-frame",
        "--quad-order",
        "2",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["total"], 2);
    assert_eq!(v["summary"]["failed"], 1);
    assert_eq!(v["scenarios"][0]["items"][0]["pass"], false);
}

#[test]
fn unwritable_json_path_exits_4() {
    let o = cli(&["run", "plane-frame", "--json", "/nonexistent-dir/report.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn jobs_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_cgb-verify"))
        .args(["run", "plane-frame", "symmetry-rotation"])
        .env("CGB_VERIFY_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
