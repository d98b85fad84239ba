use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kummer-pf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn series_lists_coefficients_in_lex_order() {
    let out = run(&["--json", "series", "--cap", "2", "--oracle"]);
    assert!(out.status.success());
    let v = json(&out);
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 10);
    assert_eq!(entries[0]["value"], "1/1");
    assert!(entries.iter().all(|e| e["oracle_agrees"] == true));
    let idx: Vec<Value> = entries.iter().map(|e| e["index"].clone()).collect();
    let mut sorted = idx.clone();
    sorted.sort_by_key(|i| serde_json::to_string(i).unwrap());
    assert_eq!(idx, sorted);
}

#[test]
fn single_index() {
    let v = json(&run(&["--json", "series", "--index", "1,0,0"]));
    assert_eq!(v[0]["value"], "1/4");
}

#[test]
fn annihilate_reports_coverage() {
    let out = run(&["--json", "annihilate", "--cap", "6"]);
    assert!(out.status.success());
    let v = json(&out);
    let ops = v["operators"].as_array().unwrap();
    assert_eq!(ops.len(), 5);
    assert!(ops.iter().all(|o| o["checked_through"] == 3 && o["vanishes"] == true));
}

#[test]
fn gkz_reduction_matches() {
    let v = json(&run(&["--json", "gkz", "--derive"]));
    assert_eq!(v["all_match"], true);
    assert_eq!(v["operators"].as_array().unwrap().len(), 4);
}

#[test]
fn params_subcommands() {
    let v = json(&run(&["--json", "params", "tmap", "0", "0", "0", "1"]));
    assert_eq!(v["t4"], "-1/3");
    assert_eq!(v["t6"], "-2/27");
    let v = json(&run(&["--json", "params", "divisors", "0", "1/2", "1/3"]));
    let p = v.as_array().unwrap().iter().find(|d| d["divisor"] == "p").unwrap();
    assert_eq!(p["on_divisor"], true);
    let out = run(&["--json", "params", "lambda", "1", "1", "1"]);
    assert!(!out.status.success());
}

#[test]
fn pfaffian_round_trip_through_files() {
    let file = scratch("p2.json");
    let f = file.to_str().unwrap();
    assert!(run(&["pfaffian", "derive", "--basis", "p2", "--out", f]).status.success());
    let check = run(&["--json", "pfaffian", "check", f]);
    assert!(check.status.success());
    assert_eq!(json(&check)["integrable"], true);
    let cmp = run(&["--json", "pfaffian", "compare", f]);
    assert!(cmp.status.success());
    assert_eq!(json(&cmp)["mismatches_rows_1_to_4"].as_array().unwrap().len(), 0);
    let sing = json(&run(&["--json", "pfaffian", "singular", f]));
    assert_eq!(sing["occurring"], serde_json::json!(["p", "q", "r", "d1", "d2", "d3"]));
    let bundled = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/reference.json");
    assert!(run(&["--json", "pfaffian", "compare", f, bundled]).status.success());

    let path = scratch("square.json");
    std::fs::write(
        &path,
        r#"[
          {"type": "segment", "from": [[0.3,0],[0.2,0],[0.1,0]], "to": [[0.32,0],[0.2,0],[0.1,0]]},
          {"type": "segment", "from": [[0.32,0],[0.2,0],[0.1,0]], "to": [[0.32,0],[0.22,0],[0.1,0]]},
          {"type": "segment", "from": [[0.32,0],[0.22,0],[0.1,0]], "to": [[0.3,0],[0.22,0],[0.1,0]]},
          {"type": "segment", "from": [[0.3,0],[0.22,0],[0.1,0]], "to": [[0.3,0],[0.2,0],[0.1,0]]}
        ]"#,
    )
    .unwrap();
    let out = run(&["--json", "transport", "--path", path.to_str().unwrap(), "--system", f, "--monodromy"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["identity_defect"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 5);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 5);
}

#[test]
fn transport_rejects_paths_on_divisors() {
    let path = scratch("bad.json");
    std::fs::write(
        &path,
        r#"[{"type": "segment", "from": [[1e-3,0],[0,0],[0,0]], "to": [[0,0],[1e-3,0],[0,0]]}]"#,
    )
    .unwrap();
    let out = run(&["transport", "--path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_exit_code_tracks_hard_checks() {
    let ok = run(&["--json", "verify-all", "--skip-transport", "--cap", "6"]);
    assert!(ok.status.success());
    let v = json(&ok);
    let ann = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "annihilation").unwrap();
    assert_eq!(ann["detail"]["reduced_coverage"], true);

    let bad = run(&["--json", "verify-all", "--skip-transport", "--without-extra-operator"]);
    assert_eq!(bad.status.code(), Some(1));
    let v = json(&bad);
    let status = |n: &str| v["checks"].as_array().unwrap().iter().find(|c| c["name"] == n).unwrap()["passed"].clone();
    assert_eq!(status("rank5_closure_integrability"), false);
    assert_eq!(status("rank6_closure_integrability"), true);
}
