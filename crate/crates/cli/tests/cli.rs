//! End-to-end runs of the netcode binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use netcode_core::fixtures;
use serde_json::Value;

fn scratch(name: &str, content: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn netcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn report_of(out: &Output) -> Value {
    serde_json::from_str(&stdout_of(out)).expect("stdout is one JSON report")
}

#[test]
fn check_reports_flows_and_paths() {
    let net = scratch("check_butterfly.json", fixtures::BUTTERFLY);
    let out = netcode(&["check", "--network", net.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert_eq!(text.matches("maxflow 2, ok").count(), 2);
    assert!(text.contains("path: $imag1 e1 e5"));
    assert!(text.contains("network supports dimension 2"));
}

#[test]
fn check_flags_a_deficit() {
    let doc = r#"{"dimension": 2, "nodes": ["s", "t"],
        "links": [{"id": "a", "tail": "s", "head": "t"}],
        "source": "s", "receivers": ["t"]}"#;
    let net = scratch("check_thin.json", doc);
    let out = netcode(&["check", "--network", net.to_str().unwrap()]);
    assert_eq!(code_of(&out), 1);
    assert!(stdout_of(&out).contains("maxflow 1, DEFICIT (needs 2)"));
}

#[test]
fn input_errors_exit_two() {
    let bad = scratch("check_garbage.json", "not even json");
    let out = netcode(&["check", "--network", bad.to_str().unwrap()]);
    assert_eq!(code_of(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let out = netcode(&["check", "--network", "/nonexistent/net.json"]);
    assert_eq!(code_of(&out), 2);

    let net = scratch("solve_butterfly_badfield.json", fixtures::BUTTERFLY);
    let out = netcode(&["solve", "--network", net.to_str().unwrap(), "--field", "6"]);
    assert_eq!(code_of(&out), 2);

    // matroid needs exactly one mode flag.
    let out = netcode(&["matroid", "--network", net.to_str().unwrap()]);
    assert_eq!(code_of(&out), 2);
    let out = netcode(&[
        "matroid",
        "--network",
        net.to_str().unwrap(),
        "--receiver",
        "t1",
        "--multicast",
    ]);
    assert_eq!(code_of(&out), 2);
}

#[test]
fn solve_round_trips_through_verify() {
    let net = scratch("solve_rt_butterfly.json", fixtures::BUTTERFLY);
    let code = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("solve_rt_code.json");
    let out = netcode(&[
        "solve",
        "--network",
        net.to_str().unwrap(),
        "--field",
        "2",
        "--out",
        code.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("strategy brute-force: solution over GF(2)"));

    let out = netcode(&[
        "verify",
        "--network",
        net.to_str().unwrap(),
        "--code",
        code.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("valid multicast code over GF(2)"));
}

#[test]
fn solve_reports_definitive_absence() {
    let net = scratch("solve_comb42.json", fixtures::COMBINATION42);
    let out = netcode(&["solve", "--network", net.to_str().unwrap(), "--field", "2"]);
    assert_eq!(code_of(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("no GF(2) solution"));
    assert!(text.contains("1048576 assignments over 20 adjacent pairs"));
}

#[test]
fn strategy_flag_selects_and_screens() {
    let net = scratch("solve_strat_butterfly.json", fixtures::BUTTERFLY);
    let out = netcode(&[
        "solve",
        "--network",
        net.to_str().unwrap(),
        "--field",
        "3",
        "--strategy",
        "jaggi-sanders",
    ]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("strategy jaggi-sanders: solution over GF(3)"));

    // Greedy construction needs more field elements than receivers.
    let out = netcode(&[
        "solve",
        "--network",
        net.to_str().unwrap(),
        "--field",
        "2",
        "--strategy",
        "jaggi-sanders",
    ]);
    assert_eq!(code_of(&out), 2);

    let out = netcode(&[
        "solve",
        "--network",
        net.to_str().unwrap(),
        "--field",
        "3",
        "--strategy",
        "nope",
    ]);
    assert_eq!(code_of(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("brute-force, jaggi-sanders"));
}

#[test]
fn verify_flags_a_broken_code() {
    let net = scratch("verify_broken_butterfly.json", fixtures::BUTTERFLY);
    // Pure routing: e6 forwards only e3, so t1 sees the same symbol twice.
    let doc = r#"{"field": "2", "kernels": [
        {"tail": "$imag1", "head": "e1", "value": 1},
        {"tail": "$imag2", "head": "e2", "value": 1},
        {"tail": "e1", "head": "e3", "value": 1},
        {"tail": "e1", "head": "e5", "value": 1},
        {"tail": "e2", "head": "e4", "value": 1},
        {"tail": "e2", "head": "e7", "value": 1},
        {"tail": "e3", "head": "e6", "value": 1},
        {"tail": "e6", "head": "e8", "value": 1},
        {"tail": "e6", "head": "e9", "value": 1}]}"#;
    let code = scratch("verify_broken_code.json", doc);
    let out = netcode(&[
        "verify",
        "--network",
        net.to_str().unwrap(),
        "--code",
        code.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 1);
    assert!(stdout_of(&out).contains("INVALID: fails at t1"));
}

#[test]
fn matroid_receiver_report_is_pinned() {
    let net = scratch("matroid_r_butterfly.json", fixtures::BUTTERFLY);
    let out = netcode(&[
        "matroid",
        "--network",
        net.to_str().unwrap(),
        "--receiver",
        "t1",
        "--json",
    ]);
    assert_eq!(code_of(&out), 0);
    let report = report_of(&out);
    assert_eq!(report["command"], "matroid");
    let output = &report["output"];
    assert_eq!(
        output["ground"],
        serde_json::json!(["e1", "e2", "e4", "e5", "e6", "e8"])
    );
    assert_eq!(output["rank"], 2);
    assert_eq!(output["bases"].as_array().unwrap().len(), 8);
    assert_eq!(output["base_orderable"], true);

    let out = netcode(&[
        "matroid",
        "--network",
        net.to_str().unwrap(),
        "--receiver",
        "w",
    ]);
    assert_eq!(code_of(&out), 2, "w is a node but not a receiver");
}

#[test]
fn matroid_multicast_report_is_pinned() {
    let net = scratch("matroid_m_butterfly.json", fixtures::BUTTERFLY);
    let out = netcode(&[
        "matroid",
        "--network",
        net.to_str().unwrap(),
        "--multicast",
        "--json",
    ]);
    assert_eq!(code_of(&out), 0);
    let output = &report_of(&out)["output"];
    assert_eq!(output["rank"], 2);
    assert_eq!(output["bases"].as_array().unwrap().len(), 27);
    assert_eq!(output["swaps"], 19);
    assert_eq!(output["union_bases"], 15);
    assert_eq!(output["surplus"].as_array().unwrap().len(), 12);
    assert_eq!(output["base_orderable"], true);
    assert_eq!(output["receivers"].as_array().unwrap().len(), 2);
}

#[test]
fn lift_matrix_mode_matches_the_stored_golden() {
    let b = scratch("lift_b21.txt", fixtures::LIFT21);
    let out_path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("lift_b21_gf5.txt");
    let out = netcode(&[
        "lift",
        "--matrix",
        b.to_str().unwrap(),
        "--to",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("total unimodularity: ok"));
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(written, fixtures::LIFT21_GF5);
}

#[test]
fn lift_rejects_the_fano_columns() {
    let b = scratch("lift_fano.txt", fixtures::FANO);
    let out = netcode(&["lift", "--matrix", b.to_str().unwrap(), "--to", "3"]);
    assert_eq!(code_of(&out), 1);
    assert!(stdout_of(&out).contains("cannot lift"));
}

#[test]
fn lift_network_mode_round_trips_through_verify() {
    let net = scratch("lift_rt_butterfly.json", fixtures::BUTTERFLY);
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let binary = tmp.join("lift_rt_binary.json");
    let lifted = tmp.join("lift_rt_gf7.json");

    let out = netcode(&[
        "solve",
        "--network",
        net.to_str().unwrap(),
        "--field",
        "2",
        "--out",
        binary.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);

    let out = netcode(&[
        "lift",
        "--network",
        net.to_str().unwrap(),
        "--code",
        binary.to_str().unwrap(),
        "--to",
        "7",
        "--out",
        lifted.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("decodes at every receiver"));

    let out = netcode(&[
        "verify",
        "--network",
        net.to_str().unwrap(),
        "--code",
        lifted.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("valid multicast code over GF(7)"));
}

#[test]
fn verify_tu_passes_the_signed_fixture() {
    let m = scratch("tu_signed21.txt", fixtures::LIFT21_SIGNED);
    let out = netcode(&["verify-tu", "--matrix", m.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("totally unimodular"));
}

#[test]
fn verify_tu_rejects_a_bad_signing() {
    let m = scratch("tu_bad.txt", "a b\n1 1\n-1 1\n");
    let out = netcode(&["verify-tu", "--matrix", m.to_str().unwrap()]);
    assert_eq!(code_of(&out), 1);
    assert!(stdout_of(&out).contains("determinant 2"));

    let m = scratch("tu_not_signs.txt", "a\n3\n");
    let out = netcode(&["verify-tu", "--matrix", m.to_str().unwrap()]);
    assert_eq!(code_of(&out), 2, "entries outside signs are a format error");
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let net = scratch("det_butterfly.json", fixtures::BUTTERFLY);
    let args = [
        "matroid",
        "--network",
        net.to_str().unwrap(),
        "--multicast",
        "--json",
    ];
    let first = netcode(&args);
    let second = netcode(&args);
    assert_eq!(code_of(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let report = report_of(&first);
    assert_eq!(report["seed"], 0);
    let digest = report["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn seed_is_echoed_into_the_report() {
    let net = scratch("seed_butterfly.json", fixtures::BUTTERFLY);
    let out = netcode(&[
        "check",
        "--network",
        net.to_str().unwrap(),
        "--json",
        "--seed",
        "7",
    ]);
    assert_eq!(code_of(&out), 0);
    assert_eq!(report_of(&out)["seed"], 7);
}
