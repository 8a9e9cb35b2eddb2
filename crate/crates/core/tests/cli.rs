use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn demo(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("demo").join(name)
}

fn nivat(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_nivat")).args(args).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = nivat(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out.trim().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn behavior_of_demo_model() {
    let out = ok(&["behavior", "--model", path(&demo("first_delay.wta.json")), "--word", path(&demo("word.json"))]);
    assert_eq!(out, r#"{"value":"11/2"}"#);
}

#[test]
fn timestamps_are_converted_to_delays() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    std::fs::write(&w, r#"[["b","11/4"],["a","15/4"]]"#).unwrap();
    let out = ok(&["behavior", "--timestamps", "--model", path(&demo("first_delay.wta.json")), "--word", w.to_str().unwrap()]);
    assert_eq!(out, r#"{"value":"11/2"}"#);
}

#[test]
fn decide_ships_a_witness() {
    let f = demo("threshold.wrdl");
    assert_eq!(
        ok(&["decide", "--formula", path(&f), "--monoid", "sum0", "--theta", "15/2"]),
        r#"{"exists":true,"witness":[["a","2"]]}"#
    );
    assert_eq!(
        ok(&["decide", "--formula", path(&f), "--monoid", "sum0", "--theta", "7/1"]),
        r#"{"exists":false,"witness":null}"#
    );
    assert_eq!(
        ok(&["decide", "--formula", path(&f), "--monoid", "sum0", "--theta", "7", "--non-strict"]),
        r#"{"exists":true,"witness":[["a","2"]],"attained":true}"#
    );
}

#[test]
fn fuzz_is_green_and_reproducible() {
    let args = ["fuzz", "--suite", "nivat", "--seed", "7", "--count", "100"];
    let first = ok(&args);
    assert_eq!(first, r#"{"pass":100,"fail":0}"#);
    assert_eq!(ok(&args), first);
    let wrdl = ["fuzz", "--suite", "wrdl", "--seed", "7", "--count", "20"];
    assert_eq!(ok(&wrdl), r#"{"pass":20,"fail":0}"#);
}

#[test]
fn decompose_then_compose_keeps_behavior() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let c = dir.path().join("c.json");
    std::fs::write(&t, ok(&["decompose", "--model", path(&demo("first_delay.wta.json"))])).unwrap();
    let word = demo("word.json");
    let v = ok(&["nivat-eval", "--triple", t.to_str().unwrap(), "--monoid", "sum", "--word", path(&word)]);
    assert_eq!(v, r#"{"value":"11/2"}"#);
    std::fs::write(&c, ok(&["compose", "--triple", t.to_str().unwrap(), "--monoid", "sum"])).unwrap();
    assert_eq!(ok(&["behavior", "--model", c.to_str().unwrap(), "--word", path(&word)]), v);
}

#[test]
fn logic_commands() {
    let word = demo("word.json");
    let holds = ok(&["rdl-check", "--word", path(&word), "--formula", path(&demo("past.rdl")), "--assign", path(&demo("assign.json"))]);
    assert_eq!(holds, r#"{"holds":true}"#);
    let avg = demo("average.wrdl");
    assert_eq!(ok(&["wrdl-eval", "--formula", path(&avg), "--monoid", "avg0", "--word", path(&word)]), r#"{"value":"2"}"#);
    let class: Value = serde_json::from_str(&ok(&["wrdl-classify", "--formula", path(&avg)])).unwrap();
    assert_eq!(class["syntactically_restricted"], true);

    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    std::fs::write(&t, ok(&["to-nivat", "--formula", path(&avg), "--monoid", "avg0"])).unwrap();
    let v = ok(&["nivat-eval", "--triple", t.to_str().unwrap(), "--monoid", "avg", "--word", path(&word)]);
    assert_eq!(v, r#"{"value":"2"}"#);
    let back: Value = serde_json::from_str(&ok(&["from-nivat", "--triple", t.to_str().unwrap(), "--monoid", "avg0"])).unwrap();
    let f = dir.path().join("back.wrdl");
    std::fs::write(&f, back["formula"].as_str().unwrap()).unwrap();
    assert_eq!(ok(&["wrdl-eval", "--formula", f.to_str().unwrap(), "--monoid", "avg0", "--word", path(&word)]), v);
}

#[test]
fn infcost_and_axioms() {
    assert_eq!(ok(&["infcost", path(&demo("rate_three.wta.json"))]), r#"{"infimum":"7"}"#);
    let r: Value = serde_json::from_str(&ok(&["check-axioms", "--monoid", "disc:1/2", "--count", "200"])).unwrap();
    assert_eq!(r["pass"], true);
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"alphabet":["a"],"locations":["p"],"clocks":["x"],"initial":["p"],"final":["p"],"monoid":"sum","weights":{},
           "edges":[{"id":"e1","source":"p","label":"a","guard":"y<2","target":"p"},
                    {"id":"e2","source":"p","label":"a","guard":"x>=1/2","target":"p"}]}"#,
    )
    .unwrap();
    let (code, out, err) = nivat(&["behavior", "--model", bad.to_str().unwrap(), "--word", path(&demo("word.json"))]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("e1") && err.contains("e2") && err.contains("natural"), "{err}");
    assert_eq!(nivat(&["no-such-command"]).0, 1);
}
