use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn flagspec(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagspec"))
        .args(args)
        .env("FLAGSPEC_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn quotient_reports_the_matrix_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = flagspec(&["quotient", "A:3:2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["passed"], true);
    assert_eq!(r["data"]["quotient"]["closed_form"], serde_json::json!([[0, 0, 0, 64], [0, 0, 32, 32], [0, 16, 16, 32], [8, 8, 16, 32]]));
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn multiplicity_flags_the_disagreeing_table_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = flagspec(&["multiplicity", "B:2:2:2:sp", "--empirical"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    let m = &r["data"]["multiplicity"];
    assert_eq!(m["total_multiplicity_closed"], "18");
    assert_eq!(m["table"]["value"], "36");
    assert_eq!(m["total_multiplicity_empirical"], 18);
    assert_eq!(m["arbitration"]["matching"], serde_json::json!(["theorem"]));
    let failing: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("table row"));
}

#[test]
fn reports_are_byte_identical_and_cache_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec!["report-all", "B:2:4:2:ell", "--sample", "50", "--seed", "7", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        flagspec(&args, &cache).status.code()
    };
    assert_eq!(run(&a, &[]), Some(0));
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0, "cache was written");
    assert_eq!(run(&b, &[]), Some(0));
    assert_eq!(run(&c, &["--no-cache"]), Some(0));
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    assert_eq!(a, std::fs::read(c).unwrap());
}

#[test]
fn csv_flattens_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = flagspec(&["enumerate", "B:2:0:2:hyp", "--format", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance,suite,name,status,expected,actual,provenance,anchor"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.starts_with("B:2:0:2:hyp,enumerate,") && r.contains(",pass,")));
}

#[test]
fn report_all_skips_what_does_not_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = flagspec(&["report-all", "A:2:2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let skipped: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "skipped")
        .map(|c| c["suite"].as_str().unwrap())
        .collect();
    assert_eq!(skipped, ["eigvec", "chi", "triangular", "spanning"]);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["quotient", "B:2:3:2:sp"][..], &["quotient", "D:3:2"], &["frobnicate", "A:3:2"], &["quotient"]] {
        let out = flagspec(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn scale_limits_are_reported_with_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = flagspec(&["multiplicity", "B:3:2:3:sp", "--empirical"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("exceeds the budget"), "{err}");
}
