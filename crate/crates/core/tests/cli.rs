use std::path::Path;
use std::process::Command;

use serde_json::Value;

const WORKSPACE: &str = "\
signature Graph: rel E/2
structure X : Graph ; size 3 ; E = {(0,1),(1,2)}
structure Y : Graph ; size 3 ; E = {(2,0),(0,1)}
structure Loopy : Graph ; size 3 ; E = {(0,0),(1,2)}
morphism swap : X -> Y ; map [2, 0, 1]
structure A : 2
structure B : 3
morphism inc : A -> B ; map [0, 1]
";

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_backforth"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn workspace(dir: &Path) -> String {
    let p = dir.join("ws.bf");
    std::fs::write(&p, WORKSPACE).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("JSON report")
}

#[test]
fn isomorphic_digraphs_are_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace(dir.path());
    let (code, out, _) = run(&["equiv", "--mode", "emb", "--left", "X", "--right", "Y", "--json", &ws]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(r["result"], Value::Bool(true));
    assert_eq!(r["command"], "equiv");
    assert!(r["engine_version"].is_string());
    assert!(r["timing_ms"].is_number());
}

#[test]
fn different_sizes_are_not_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace(dir.path());
    let (code, out, _) = run(&["equiv", "--left", "A", "--right", "B", "--json", &ws]);
    assert_eq!(code, 1);
    assert_eq!(report(&out)["result"], Value::Bool(false));
    let (code, _, _) = run(&["equiv", "--mode", "str", "--left", "X", "--right", "Loopy", &ws]);
    assert_eq!(code, 1);
}

#[test]
fn setcalc_infinite_sets() {
    let (code, out, _) = run(&["setcalc", "equiv", "INF", "INF", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&out)["result"], Value::Bool(true));
    let (code, out, _) = run(&["setcalc", "sym-chain", "1,2,3,+"]);
    assert_eq!((code, out.trim()), (0, "colimit: INF"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace(dir.path());
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["equiv", "--left", "X", "--right", "Nope", &ws]).0, 2);
    assert_eq!(run(&["equiv", "--left", "X", "--right", "Y", "--cap", "2", &ws]).0, 2);
    let bad = dir.path().join("bad.bf");
    std::fs::write(&bad, "structure X: 2; E={(0,2)}").unwrap();
    let (code, _, err) = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("tuple element 2 outside carrier"), "{err}");
    assert_eq!(run(&["check", "/nonexistent/ws.bf"]).0, 2);
}

#[test]
fn emitted_family_revalidates() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace(dir.path());
    for mode in ["emb", "str"] {
        let (code, out, _) = run(&["equiv", "--mode", mode, "--left", "X", "--right", "Y", "--json", &ws]);
        assert_eq!(code, 0);
        let fam = dir.path().join(format!("family-{mode}.json"));
        std::fs::write(&fam, &out).unwrap();
        let (code, out, _) = run(&["dense", "--family", fam.to_str().unwrap(), "--json", &ws]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(report(&out)["payload"]["dense"], Value::Bool(true));
    }
}

#[test]
fn embedding_report_has_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace(dir.path());
    let (code, out, _) = run(&["embed", "--morphism", "swap", "--purity", "--json", &ws]);
    assert_eq!(code, 0);
    let r = report(&out);
    // every subset of a relational structure is a test object
    assert_eq!(r["payload"]["witnesses"].as_array().unwrap().len(), 8);
    assert_eq!(r["payload"]["purity"]["pure"], Value::Bool(true));
    let (code, out, _) = run(&["embed", "--morphism", "inc", "--json", &ws]);
    assert_eq!(code, 1);
    assert_eq!(report(&out)["payload"]["equivalent_ends"], Value::Bool(false));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace(dir.path());
    let args = ["compose", "--mode", "str", "--left", "X", "--middle", "Y", "--right", "X", "--json", &ws];
    let strip = |s: &str| {
        let mut v = report(s);
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.0, 0);
    assert_eq!(strip(&a.1), strip(&b.1));
}

#[test]
fn check_classifies_morphisms() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace(dir.path());
    let (code, out, _) = run(&["check", "--morphism", "swap", &ws]);
    assert_eq!((code, out.trim()), (0, "swap: iso"));
    let (code, out, _) = run(&["check", "--json", &ws]);
    assert_eq!(code, 0);
    assert_eq!(report(&out)["payload"]["structures"].as_array().unwrap().len(), 5);
}

#[test]
fn selftest_runs_selected_criteria() {
    let (code, out, _) = run(&["selftest", "--criteria", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("criterion 1 PASS"), "{out}");
}
