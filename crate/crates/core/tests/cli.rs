use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn run(args: &[&str], stdin: &str) -> (String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_parabolic"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn run_json(args: &[&str], stdin: Value) -> (Value, i32) {
    let (out, code) = run(args, &stdin.to_string());
    (serde_json::from_str(&out).unwrap(), code)
}

#[test]
fn classify_dilation_example() {
    let (v, code) = run_json(&["classify"], json!({"family": "conformal", "params": [3, 0], "element": {"D": 1}}));
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "Essential");
    assert_eq!(v["certificate"], json!({"lambda_nonzero": 6}));
}

#[test]
fn classify_rotation_example() {
    let (v, _) = run_json(&["classify"], json!({"family": "conformal", "params": [3, 0], "element": {"M_12": 1}}));
    assert_eq!(v["verdict"], "Inessential");
    assert!(v["witness"].as_object().unwrap().values().all(|c| c == 0));
}

#[test]
fn schema_errors_exit_one_with_locus() {
    let (v, code) = run_json(&["classify"], json!({"family": "conformal", "params": [3, 0], "element": {"D": "x"}}));
    assert_eq!(code, 1);
    assert_eq!(v["error"]["path"], "payload.element.D");
    let (out, code) = run(&["algebra-info"], "{not json");
    assert_eq!(code, 1);
    assert!(out.contains("\"path\": \"input\""));
    let (v, code) = run_json(&["algebra-info"], json!({"family": "g2", "params": []}));
    assert_eq!(code, 1);
    assert_eq!(v["error"]["path"], "payload.family");
}

#[test]
fn request_documents_and_files() {
    let doc = json!({"command": "algebra-info", "payload": {"family": "cr", "params": [1]}});
    let (v, code) = run_json(&["request"], doc.clone());
    assert_eq!(code, 0);
    assert_eq!(v["killing_EE"], 12);
    let dir = std::env::temp_dir().join(format!("parabolic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("request.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let (out, code) = run(&["request", "--file", path.to_str().unwrap()], "");
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap(), v);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_output() {
    let (out, code) = run(
        &["oracle-compare", "--instances", "40", "--output", "text"],
        &json!({"family": "conformal", "params": [4, 1]}).to_string(),
    );
    assert_eq!(code, 0);
    assert!(out.contains("agreement 40/40"), "{out}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let payload = json!({"family": "cr", "params": [1]}).to_string();
    let args = ["oracle-compare", "--instances", "60", "--seed", "9"];
    let (a, _) = run(&args, &payload);
    let (b, _) = run(&args, &payload);
    assert_eq!(a, b);
    let (c, _) = run(&["oracle-compare", "--instances", "60", "--seed", "10"], &payload);
    assert_ne!(a, c);
}

#[test]
fn verify_identities_reports_pass() {
    let (v, code) = run_json(&["verify-identities", "--instances", "4"], json!({"signature": [2, 1]}));
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert_eq!(v["fields"], 4);
}
