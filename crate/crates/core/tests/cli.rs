use std::path::PathBuf;
use std::process::{Command, Output};

use lcabs::automata::Fsm;
use lcabs::fixtures::fork_approx;
use lcabs::relations::Relation;
use lcabs::windows::WindowSet;
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn lcabs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcabs")).args(args).env_remove("LCABS_NODE_BUDGET").output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = lcabs(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[test]
fn windows_of_the_three_state_machine() {
    let v = ok_json(&["windows", "--l", "1", &data("fork.fsm.json")]);
    assert_eq!(strings(&v["initial"]), ["a b", "a c"]);
    assert_eq!(strings(&v["recurring"]), ["a b", "a c", "b a", "c a"]);
    let v = ok_json(&["windows", "--l", "0", &data("fork.fsm.json")]);
    assert_eq!(strings(&v["initial"]), ["a"]);
    assert_eq!(strings(&v["recurring"]), ["a", "b", "c"]);
    let ws: WindowSet = serde_json::from_value(v).unwrap();
    assert_eq!(ws.l, 0);
}

#[test]
fn approximate_writes_dot_and_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("out.dot");
    let v = ok_json(&["approximate", "--l", "1", &data("ex1.quant.json"), "--dot", dot.to_str().unwrap()]);
    let fsm: Fsm = serde_json::from_value(v).unwrap();
    assert_eq!((fsm.num_states(), fsm.num_transitions()), (5, 8));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("\"m2\" -> \"m1\" [label=\"m1\"];"));

    let v = ok_json(&["approximate", "--l", "1", &data("fork.fsm.json")]);
    let fsm: Fsm = serde_json::from_value(v).unwrap();
    assert_eq!(fsm.canonical_form(), fork_approx().canonical_form());
}

#[test]
fn report_verdicts() {
    let v = ok_json(&["report", "--l", "1", &data("fork.fsm.json")]);
    let status: Vec<(String, String)> = v["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| (i["item"].as_str().unwrap().into(), i["status"].as_str().unwrap().into()))
        .collect();
    let fails: Vec<&str> = status.iter().filter(|(_, s)| s == "fail").map(|(i, _)| i.as_str()).collect();
    assert_eq!(fails, ["vi"]);

    let v = ok_json(&["report", "--l", "2", &data("aab.fsm.json")]);
    assert!(v["items"].as_array().unwrap().iter().all(|i| i["status"] == "pass"));

    let v = ok_json(&["report", "--l", "1", "--mode", "point", &data("ex1.quant.json")]);
    assert_eq!(v["premises"]["l_complete"]["status"], "pass");
    assert_eq!(v["premises"]["rx"]["status"], "fail");
    assert_eq!(v["premises"]["rx"]["counterexample"]["left"], "-1");
    assert_eq!(v["premises"]["rx"]["counterexample"]["right"], "6");
    assert_eq!(v["mode"], "point");
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn completeness_and_paths() {
    let v = ok_json(&["check-lcomplete", "--l", "1", &data("aab.fsm.json")]);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["witness"], "a a a");
    let v = ok_json(&["check-lcomplete", "--l", "2", &data("aab.fsm.json")]);
    assert_eq!(v["status"], "pass");
    let v = ok_json(&["paths", "--depth", "2", &data("fork.fsm.json")]);
    assert_eq!(strings(&v), ["^", "a", "a b", "a c"]);
}

#[test]
fn reach_sets() {
    let v = ok_json(&["reach", "--past", "m1", &data("ex1.quant.json")]);
    assert_eq!(v["values"], "{-6, 1}");
    let v = ok_json(&["reach", "--past", "m1", "--mode", "set", &data("ex1.quant.json")]);
    assert_eq!(v["values"], "[-10, -4) ∪ (-1, 6)");
    let v = ok_json(&["reach", "--past", "^", "--at", "0", &data("ex1.quant.json")]);
    assert_eq!(v["values"], "{-10, 10}");
    let v = ok_json(&["reach", "--past", "a", "--at", "1", &data("fork.fsm.json")]);
    assert_eq!(strings(&v["states"]), ["x1", "x3"]);
}

#[test]
fn relations_and_check_sim() {
    let v = ok_json(&["relations", "--l", "1", &data("fork.fsm.json")]);
    assert_eq!(
        serde_json::to_string(&v["rl"]).unwrap(),
        r#"{"flavor":"Rl","l":1,"pairs":[["x1","a"],["x2","b"],["x2","c"],["x3","a"]]}"#
    );
    let rl: Relation = serde_json::from_value(v["rl"].clone()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rl.json");
    std::fs::write(&path, serde_json::to_string(&rl).unwrap()).unwrap();
    let rel = path.to_str().unwrap();

    let v = ok_json(&["check-sim", &data("fork.fsm.json"), "--relation", rel, "--flavor", "1-initial"]);
    assert_eq!(v["status"], "pass");
    let v = ok_json(&["check-sim", &data("fork.fsm.json"), "--relation", rel, "--flavor", "1-initial", "--inverse"]);
    assert_eq!(v["status"], "fail");
    let cx = &v["counterexample"];
    assert_eq!((cx["left"].as_str(), cx["right"].as_str(), cx["symbol"].as_str()), (Some("a"), Some("x3"), Some("b")));

    let v = ok_json(&["relations", "--l", "1", &data("ex1.quant.json")]);
    let set: lcabs::interval::IntervalSet = serde_json::from_value(v["rl"]["concretization"]["-4"].clone()).unwrap();
    assert_eq!(set.to_string(), "{-4}");
}

#[test]
fn out_flag_and_deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = lcabs(&["report", "--l", "1", &data("ex1.quant.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let first = std::fs::read(&out).unwrap();
    let again = lcabs(&["report", "--l", "1", &data("ex1.quant.json")]);
    assert_eq!(first, again.stdout);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    let cases = [
        vec!["windows".to_string(), "/nonexistent/file.json".into()],
        vec!["windows".into(), write("bad.json", "{not json")],
        vec![
            "windows".into(),
            write(
                "blocking.json",
                r#"{"domain":{"lo":0,"hi":3,"lo_closed":true,"hi_closed":true},
                    "symbols":{"a":{"lo":0,"hi":1,"lo_closed":true,"hi_closed":false},
                               "b":{"lo":2,"hi":3,"lo_closed":false,"hi_closed":true}},
                    "initial_values":[0]}"#,
            ),
        ],
        vec![
            "check-sim".into(),
            data("fork.fsm.json"),
            "--relation".into(),
            write("rel.json", r#"{"flavor":"custom","pairs":[["x9","a"]]}"#),
            "--flavor".into(),
            "async".into(),
        ],
        vec!["check-sim".into(), data("fork.fsm.json"), "--relation".into(), "x".into(), "--flavor".into(), "sideways".into()],
        vec!["frobnicate".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = lcabs(&refs);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let blocking = lcabs(&["windows", &dir.path().join("blocking.json").display().to_string()]);
    assert!(String::from_utf8_lossy(&blocking.stderr).contains("exit point 1"));
}

#[test]
fn node_budget_from_environment() {
    let run = |budget: &str| {
        Command::new(env!("CARGO_BIN_EXE_lcabs"))
            .args(["paths", "--depth", "6", &data("fork.fsm.json")])
            .env("LCABS_NODE_BUDGET", budget)
            .output()
            .unwrap()
    };
    assert_eq!(run("3").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
    assert_eq!(run("1000").status.code(), Some(0));
}

#[test]
fn internal_inconsistency_maps_to_three() {
    assert_eq!(lcabs::cli::exit_code(&lcabs::Error::InternalInconsistency("x".into())), 3);
    assert_eq!(lcabs::cli::exit_code(&lcabs::Error::EmptyWindows), 2);
}
