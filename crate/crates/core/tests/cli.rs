//! End-to-end runs of the `progjohn` binary: documents in, certificates out,
//! certificates back through `verify`.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use serde_json::Value;

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("progjohn-cli-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Runs the binary with `args`, feeding `stdin` when given.
fn progjohn(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_progjohn"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn verify(name: &str, cert: &str) -> (i32, Value) {
    let path = scratch(name, cert);
    let (code, out, _) = progjohn(&["verify", "--in", path.to_str().unwrap()], None);
    (code, serde_json::from_str(&out).unwrap())
}

const P12: &str = r#"{"version": 1, "progression": {"group": {"free_rank": 1}, "dims": ["1", "1"], "steps": [[1], [2]]}}"#;
const Z5: &str = r#"{"version": 1, "set": {"group": {"free_rank": 0, "moduli": [5]}, "elements": [[0], [1]]}}"#;

#[test]
fn properize_lowers_the_rank_and_verifies() {
    let path = scratch("p12.json", P12);
    let (code, out, _) = progjohn(&["properize", "--t", "1", "--in", path.to_str().unwrap()], None);
    assert_eq!(code, 0, "{out}");
    let cert: Value = serde_json::from_str(&out).unwrap();
    assert!(cert["result"]["rank_out"].as_u64().unwrap() <= 1);
    let (code, report) = verify("p12.cert.json", &out);
    assert_eq!(code, 0);
    assert_eq!(report["holds"], Value::Bool(true));
}

#[test]
fn sarkozy_reads_standard_input() {
    let (code, out, _) = progjohn(&["sarkozy", "--l", "4"], Some(Z5));
    assert_eq!(code, 0, "{out}");
    let cert: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(cert["result"]["holds"], Value::Bool(true));
    assert_eq!(verify("z5.cert.json", &out).0, 0);
}

#[test]
fn removing_a_translate_breaks_the_cover() {
    let p1 = scratch("p1.json", r#"{"version": 1, "progression": {"group": {"free_rank": 1}, "dims": ["1"], "steps": [[1]]}}"#);
    let (code, out, _) = progjohn(&["cover", "--t", "3", "--in", p1.to_str().unwrap()], None);
    assert_eq!(code, 0);
    let mut cert: Value = serde_json::from_str(&out).unwrap();
    let bases = cert["objects"]["bases"]["set"]["elements"].as_array_mut().unwrap();
    assert!(bases.len() > 1);
    bases.remove(0);
    let (code, report) = verify("cover.bad.json", &cert.to_string());
    assert_eq!(code, 1);
    assert_eq!(report["holds"], Value::Bool(false));
    let failed: Vec<&Value> = report["reports"].as_array().unwrap().iter().filter(|r| r["holds"] == Value::Bool(false)).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|r| r["counterexample"].is_array()));
}

#[test]
fn every_command_emits_a_verifiable_certificate() {
    let runs: [&[&str]; 9] = [
        &["properize", "--t", "1"],
        &["john", "--t", "2"],
        &["john-outer", "--t", "3/2"],
        &["discrete-john"],
        &["cover", "--t", "1"],
        &["coalesce", "--l", "3"],
        &["sumset-structure", "--l", "64", "--d", "2"],
        &["sarkozy", "--l", "12"],
        &["demo-counterexample", "--n", "4"],
    ];
    for args in runs {
        let mut argv = args.to_vec();
        argv.extend(["--seed", "3"]);
        let (code, out, err) = progjohn(&argv, None);
        assert_eq!(code, 0, "{argv:?}: {err}{out}");
        let cert: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(cert["version"], Value::from(1));
        assert_eq!(cert["params"]["seed"], Value::from(3));
        let (code, report) = verify(&format!("{}.json", args[0]), &out);
        assert_eq!(code, 0, "{argv:?}: {report}");
    }
}

#[test]
fn output_is_byte_stable() {
    for cmd in ["john-outer", "coalesce", "sumset-structure"] {
        let a = progjohn(&[cmd, "--seed", "11", "--l", "8", "--d", "2"], None);
        let b = progjohn(&[cmd, "--seed", "11", "--l", "8", "--d", "2"], None);
        assert_eq!(a, b, "{cmd}");
    }
}

#[test]
fn out_flag_writes_the_certificate() {
    let input = scratch("p12-out.json", P12);
    let target = std::env::temp_dir().join(format!("progjohn-cli-it-{}", std::process::id())).join("written.json");
    let (code, out, _) = progjohn(&["john", "--in", input.to_str().unwrap(), "--out", target.to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert_eq!(verify("written.cert.json", &text).0, 0);
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let p12 = scratch("p12-codes.json", P12);
    let p12 = p12.to_str().unwrap();
    let (code, out, _) = progjohn(&["john", "--cap", "2", "--in", p12], None);
    assert_eq!(code, 3);
    let err: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(err["error"]["kind"], Value::from("cap_exceeded"));

    assert_eq!(progjohn(&["john", "--in", p12, "--t", "-1"], None).0, 4);
    assert_eq!(progjohn(&["john"], Some("{ not json")).0, 4);
    assert_eq!(progjohn(&["sarkozy"], Some(Z5)).0, 4);
    assert_eq!(progjohn(&["frobnicate"], None).0, 4);

    // {0, 1, 10, 100} has no structure at l = 2.
    let dissociated = r#"{"version": 1, "set": {"group": {"free_rank": 1}, "elements": [[0], [1], [10], [100]]}}"#;
    let (code, out, _) = progjohn(&["sumset-structure", "--l", "2", "--d", "1"], Some(dissociated));
    assert_eq!(code, 2, "{out}");
    let err: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(err["error"]["kind"], Value::from("hypothesis_not_met"));
}

#[test]
fn verify_rejects_a_foreign_document() {
    let (code, _, _) = progjohn(&["verify"], Some(P12));
    assert_eq!(code, 4);
}
