use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn coverlab(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_coverlab"))
        .args(args)
        .env_remove("COVERLAB_THREADS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn built(args: &[&str]) -> String {
    let out = coverlab(args, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("coverlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn build_pipes_into_verify() {
    let cover = built(&["build", "thas-somma", "--q", "3", "--m", "1"]);
    let out = coverlab(&["verify", "-"], Some(&cover));
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let p = &v["result"]["params"];
    assert_eq!((p["n"].as_u64(), p["r"].as_u64(), p["mu"].as_u64()), (Some(9), Some(3), Some(3)));
    assert_eq!(v["config"]["subcommand"], "verify");
    assert_eq!(v["config"]["input"], "-");
}

#[test]
fn corrupted_cover_exits_one_with_witnesses() {
    let cover = built(&["build", "cube"]);
    let mut file: Value = serde_json::from_str(&cover).unwrap();
    file["edges"].as_array_mut().unwrap().remove(0);
    let path = temp_file("corrupted.json", &file.to_string());
    let out = coverlab(&["verify", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["result"]["report"]["is_cover"], false);
    let failures = v["result"]["report"]["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert!(failures.iter().all(|f| !f["witness"].as_array().unwrap().is_empty()));
}

#[test]
fn sp2d_case_matches() {
    let out = coverlab(&["cases", "sp2d"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["match"], true);
}

#[test]
fn every_case_matches() {
    let out = coverlab(&["cases", "all"], None);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_of(&out)["result"].as_array().unwrap().clone();
    assert_eq!(reports.len(), 11);
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(coverlab(&["no-such-command"], None).status.code(), Some(2));
    assert_eq!(coverlab(&["cases", "no-such-case"], None).status.code(), Some(2));
    assert_eq!(coverlab(&["verify", "/nonexistent/cover.json"], None).status.code(), Some(2));
    assert_eq!(coverlab(&["verify", "-"], Some("{\"v\": 3}")).status.code(), Some(2));
    assert_eq!(coverlab(&["build", "thas-somma"], None).status.code(), Some(2));
    assert_eq!(coverlab(&["params", "derive", "--n", "3", "--r", "9", "--mu", "9"], None).status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let cover = built(&["build", "icosahedron"]);
    let a = coverlab(&["analyze", "-"], Some(&cover));
    let b = coverlab(&["analyze", "-"], Some(&cover));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let config = text.find("\"config\"").unwrap();
    let result = text.find("\"result\"").unwrap();
    assert!(config < result, "keys are sorted");
}

#[test]
fn analyze_reports_rank_and_arc_orbits() {
    let cover = built(&["build", "thas-somma", "--q", "3"]);
    let v = json_of(&coverlab(&["analyze", "-"], Some(&cover)));
    let r = &v["result"];
    assert_eq!(r["automorphism_group"]["order"], "1296");
    assert_eq!(r["fibre_action"]["rank"], 2);
    assert_eq!(r["arc_orbits"]["orbits"], 1);
    assert_eq!(r["covering_group"]["order"], 3);
    assert_eq!(r["audits_passed"], true);
}

#[test]
fn quotient_by_order_two_subgroup() {
    let cover = built(&["build", "thas-somma", "--q", "4"]);
    let path = temp_file("ts4.json", &cover);
    let out = coverlab(&["quotient", path.to_str().unwrap(), "--subgroup", "k:1"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["expected_parameters"], serde_json::json!([16, 2, 8]));
    assert_eq!(v["result"]["parameters_match"], true);

    let emitted = coverlab(&["quotient", path.to_str().unwrap(), "--subgroup", "k:1", "--emit-cover"], None);
    let verified = coverlab(&["verify", "-"], Some(std::str::from_utf8(&emitted.stdout).unwrap()));
    assert_eq!(verified.status.code(), Some(0));

    let whole = coverlab(&["quotient", path.to_str().unwrap(), "--subgroup", "k"], None);
    assert_eq!(whole.status.code(), Some(2));
}

#[test]
fn etf_reproduces_sic_and_hexagon_lines() {
    let ts = built(&["build", "thas-somma", "--q", "3"]);
    let v = json_of(&coverlab(&["etf", "-", "--side", "tau"], Some(&ts)));
    assert_eq!(v["result"]["d"], 3);
    assert_eq!(v["result"]["certificates"]["sic"], true);
    assert_eq!(v["config"]["tolerance"], 1e-9);

    let hex = built(&["build", "hexagon"]);
    let out = coverlab(&["etf", "-", "--side", "theta", "--gram"], Some(&hex));
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["d"], 2);
    assert_eq!(v["result"]["alpha"], 0.5);
    assert_eq!(v["result"]["gram"].as_array().unwrap().len(), 3);

    let trivial = coverlab(&["etf", "-", "--char", "0"], Some(&hex));
    assert_eq!(trivial.status.code(), Some(2));
}

#[test]
fn taylor_from_seidel_file() {
    // triangle two-graph: S = −(J − I)
    let path = temp_file("triangle.json", "[[0,-1,-1],[-1,0,-1],[-1,-1,0]]");
    let cover = built(&["build", "taylor", "--seidel", path.to_str().unwrap()]);
    let v = json_of(&coverlab(&["verify", "-"], Some(&cover)));
    assert_eq!(v["result"]["report"]["is_cover"], true);
    assert_eq!(v["result"]["params"]["mu"], 1);
}

#[test]
fn params_tables_and_text_output() {
    let v = json_of(&coverlab(&["params", "feasible-b", "--t-max", "12"], None));
    let rows = v["result"].as_array().unwrap();
    assert!(rows.iter().any(|e| e["t"] == 12 && e["r"] == 11 && e["params"]["mu"] == 1705));

    let out = coverlab(&["--output", "text", "lemma-check", "nt"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("passed: true"));
    assert!(text.ends_with("status: ok\n"));
}

#[test]
fn thread_cap_is_recorded() {
    let out = Command::new(env!("CARGO_BIN_EXE_coverlab"))
        .args(["cases", "sp2d"])
        .env("COVERLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(json_of(&out)["config"]["threads"], 1);
    let bad = Command::new(env!("CARGO_BIN_EXE_coverlab"))
        .args(["cases", "sp2d"])
        .env("COVERLAB_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("coverlab-out-{}.json", std::process::id()));
    let out = coverlab(&["--out", path.to_str().unwrap(), "cases", "sporadic"], None);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["match"], true);
}
