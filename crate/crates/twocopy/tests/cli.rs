use std::fs;
use std::process::{Command, Output};

fn twocopy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twocopy")).args(args).output().unwrap()
}

fn summary(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("summary line");
    serde_json::from_str(line).unwrap()
}

#[test]
fn every_analysis_subcommand_passes() {
    for cmd in ["werner", "bbpssw", "three-copy", "boxes", "twirl-check", "fig1", "fig2"] {
        let out = twocopy(&[cmd]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(summary(&out)["status"], "pass", "{cmd}");
        assert!(!out.stdout.is_empty(), "{cmd}");
    }
}

#[test]
fn three_copy_csv() {
    let out = twocopy(&["three-copy", "--grid-points", "101"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,simulated,formula,residual"));
    assert_eq!(lines.count(), 101);
    let s = summary(&out);
    assert_eq!(s["checks"][0]["name"], "max_residual");
    assert!(s["checks"][0]["value"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn json_artifacts_carry_schema_and_checks() {
    let out = twocopy(&["three-copy", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["schema_version"], 1);
    assert!(doc["max_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(doc["curve"].as_array().unwrap().len(), 101);
}

#[test]
fn nogo_scan_has_no_counterexamples() {
    let out = twocopy(&["nogo", "--samples", "20000", "--ps", "0.75", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["scan"]["counterexamples"], 0);
    assert_eq!(doc["scan"]["samples"], 20000);
}

#[test]
fn restricted_wiring_search() {
    let out = twocopy(&["wiring-search", "--workers", "2", "--alice-limit", "100", "--grid-points", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let report = &doc["report"];
    assert!(report["max_gap"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["deduped_party_count"], 36864);
    assert!(report["witness"]["alice"].as_str().unwrap().starts_with("0x"));
    assert!(report.get("elapsed").is_none());
}

#[test]
fn identical_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let out = twocopy(&["twirl-check", "--seed", "9", "-o", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());

    let searches = [dir.path().join("s1.json"), dir.path().join("s2.json")];
    for (p, workers) in searches.iter().zip(["1", "3"]) {
        let out = twocopy(&[
            "wiring-search", "--alice-limit", "40", "--grid-points", "5", "--workers", workers, "-o",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&searches[0]).unwrap(), fs::read(&searches[1]).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["werner", "--grid-points", "1"][..],
        &["wiring-search", "--workers", "0"],
        &["frobnicate"],
        &["nogo", "--ps", "1.5"],
        &["fig1", "--ps", "0.8", "--pe", "0.7"],
        &["wiring-search", "--max-blocks", "3"],
        &["three-copy", "--tolerance=-1"],
    ] {
        assert_eq!(twocopy(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn invariant_failure_exits_with_one_and_a_record() {
    // Rounding leaves a nonzero residual, so a zero tolerance fails.
    let out = twocopy(&["three-copy", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let s = summary(&out);
    assert_eq!(s["status"], "fail");
    assert_eq!(s["checks"][0]["pass"], false);
}

#[test]
fn corrupt_checkpoint_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    fs::write(&cp, "[]").unwrap();
    let out = twocopy(&["wiring-search", "--alice-limit", "10", "--checkpoint", cp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let s = summary(&out);
    assert_eq!(s["status"], "error");
    assert!(s["error"].as_str().unwrap().contains("corrupt"));
}

#[test]
fn interrupted_search_resumes_from_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let cp = cp.to_str().unwrap();
    let base = ["wiring-search", "--alice-limit", "64", "--block-size", "8", "--grid-points", "5", "--workers", "1"];
    let stop = twocopy(&[&base[..], &["--checkpoint", cp, "--max-blocks", "3"]].concat());
    assert_eq!(stop.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&stop.stderr).contains("rerun with the same checkpoint"));
    let resumed = twocopy(&[&base[..], &["--checkpoint", cp]].concat());
    let fresh = twocopy(&base);
    assert_eq!(resumed.status.code(), Some(0));
    assert_eq!(resumed.stdout, fresh.stdout);
}

#[test]
fn wiring_encodings_print_as_hex() {
    let out = twocopy(&["fig2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for party in ["alice", "bob"] {
        let s = doc[party].as_str().unwrap();
        assert_eq!(s.len(), 10);
        assert!(u32::from_str_radix(&s[2..], 16).is_ok());
    }
}
