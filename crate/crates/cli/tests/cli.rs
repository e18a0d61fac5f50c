use std::path::PathBuf;
use std::process::{Command, Output};

use dlq_core::forkrew::maximal_fork_rewriting;
use dlq_core::semantics::{classify_forest, ForestClass, Interpretation};
use dlq_core::syntax::{canonicalize_cq, parse_cq};
use serde_json::Value;

struct Files(tempfile::TempDir);

impl Files {
    fn new() -> Files {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn dlq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlq")).args(args).env_remove("DLQ_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const KB: &str = "A(a).\nA SubClassOf exists (r).B.\n";

#[test]
fn entailed_example() {
    let f = Files::new();
    let kb = f.put("kb.dl", KB);
    let q = f.put("q.ucq", "A(?x), r(?x,?y), B(?y)");
    let out = dlq(&["entails", kb.to_str().unwrap(), q.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["entailed"], true);
    assert_eq!(v["reason"], "NoSpoilerSelectionSatisfiable");
}

#[test]
fn not_entailed_example_with_countermodel() {
    let f = Files::new();
    let kb = f.put("kb.dl", KB);
    let q = f.put("q.ucq", "A(?x), B(?x)");
    let out = dlq(&["entails", kb.to_str().unwrap(), q.to_str().unwrap(), "--json", "--max-domain", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["entailed"], false);
    assert_eq!(v["reason"], "SpoilerSelectionSatisfiable");
    assert_eq!(v["selection"].as_array().unwrap().len(), 1);
    let m = Interpretation::from_json(&v["countermodel"].to_string()).unwrap();
    let model = f.put("m.json", &v["countermodel"].to_string());
    assert_eq!(dlq(&["modelcheck", model.to_str().unwrap(), kb.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(dlq(&["match", model.to_str().unwrap(), q.to_str().unwrap()]).status.code(), Some(1));
    assert!(m.len() <= 3);
}

#[test]
fn thread_counts_agree() {
    let f = Files::new();
    let kb = f.put("kb.dl", "(A or B)(a). r(a,b). A SubClassOf exists (r & s).C.\n");
    let q = f.put("q.ucq", "r(?x,?y), s(?x,?y) or B(?x), C(?x)");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_dlq"))
            .args(["entails", kb.to_str().unwrap(), q.to_str().unwrap(), "--json", "--max-domain", "3"])
            .env("DLQ_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.status.code(), four.status.code());
}

#[test]
fn rollup_prints_match_concept() {
    let f = Files::new();
    let q = f.put("q.cq", "A(?x), r(?x,?y), s(?x,?y), B(?y)");
    let out = dlq(&["rollup", q.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "(A and exists (r & s).B)\n");
}

#[test]
fn forkrew_maximal_matches_example() {
    let f = Files::new();
    let text = "r(?x,?y), r(?x,?z), s(?v,?y), r(?v,?z), A(?x), B(?y), C(?z), D(?v)";
    let q = f.put("q.cq", text);
    let out = dlq(&["forkrew", q.to_str().unwrap(), "--maximal"]);
    assert_eq!(out.status.code(), Some(0));
    let printed = parse_cq(stdout(&out).trim()).unwrap();
    let expected = parse_cq("r(?w,?y), s(?w,?y), r(?w,?z), B(?y), A(?w), D(?w), C(?z)").unwrap();
    assert_eq!(canonicalize_cq(&printed), canonicalize_cq(&expected));
    assert_eq!(printed, maximal_fork_rewriting(&parse_cq(text).unwrap()));
    let all = dlq(&["forkrew", q.to_str().unwrap(), "--json"]);
    assert_eq!(json(&all).as_array().unwrap().len(), 2);
}

#[test]
fn splittings_and_spoilers() {
    let f = Files::new();
    let q = f.put("q.cq", "r(?x,?y)");
    let out = dlq(&["splittings", q.to_str().unwrap(), "--names", "a", "--json"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 3);
    let a = f.put("a.cq", "A(?v0)");
    let out = dlq(&["spoilers", a.to_str().unwrap(), "--names", "a", "--json"]);
    assert_eq!(json(&out), serde_json::json!([["Top SubClassOf not A", "not A(a)"]]));
}

#[test]
fn unravel_round_trips() {
    let f = Files::new();
    let m = f.put(
        "m.json",
        r#"{"domain":["d","e","f"],"concepts":{"A":["d"]},"roles":{"r":[["d","e"],["e","d"],["e","f"]]},"names":{"a":"d"}}"#,
    );
    for depth in ["0", "1", "2"] {
        let out = dlq(&["unravel", m.to_str().unwrap(), "--names", "a", "--depth", depth, "--json"]);
        assert_eq!(out.status.code(), Some(0));
        let u = Interpretation::from_json(&stdout(&out)).unwrap();
        let names = ["a".to_string()].into();
        assert!(matches!(classify_forest(&u, &names), ForestClass::RootedForest(_)), "depth {depth}");
    }
}

#[test]
fn output_is_deterministic() {
    let f = Files::new();
    let kb = f.put("kb.dl", KB);
    let q = f.put("q.ucq", "A(?x), B(?x) or r(?x,?x)");
    let args = ["entails", kb.to_str().unwrap(), q.to_str().unwrap(), "--max-domain", "3"];
    assert_eq!(dlq(&args).stdout, dlq(&args).stdout);
    let sat = ["sat", kb.to_str().unwrap(), "--json", "--max-domain", "2"];
    assert_eq!(dlq(&sat).stdout, dlq(&sat).stdout);
}

#[test]
fn exit_codes() {
    let f = Files::new();
    let bad = f.put("bad.dl", "A(a");
    assert_eq!(dlq(&["sat", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(dlq(&["sat"]).status.code(), Some(2));
    assert_eq!(dlq(&["rollup", "/nonexistent/q.cq"]).status.code(), Some(2));
    let unsat = f.put("unsat.dl", "A(a). A SubClassOf Bot.");
    assert_eq!(dlq(&["sat", unsat.to_str().unwrap()]).status.code(), Some(1));
    let infinite = f.put("inf.dl", "A(a). Top SubClassOf exists (r).A.");
    assert_eq!(dlq(&["sat", infinite.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(dlq(&["sat", infinite.to_str().unwrap(), "--max-nodes", "0"]).status.code(), Some(3));
    let cyclic = f.put("cyc.cq", "r(?x,?y), r(?y,?x)");
    assert_eq!(dlq(&["rollup", cyclic.to_str().unwrap()]).status.code(), Some(2));
}
