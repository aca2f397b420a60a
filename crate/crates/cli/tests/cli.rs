use std::process::{Command, Output};

use ipcmu::formula::json::from_json_str;
use ipcmu::parse;

const PHI2: &str = r"mu x. b \/ (a1 -> x) \/ (a2 -> x)";
const PHI3: &str = r"mu x. b \/ (a1 -> x) \/ (a2 -> x) \/ (a3 -> x)";

fn ipcmu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipcmu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("UTF-8 output")
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

fn json(args: &[&str]) -> (serde_json::Value, Option<i32>) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = ipcmu(&all);
    (serde_json::from_str(&stdout(&o)).expect("valid JSON"), o.status.code())
}

#[test]
fn eliminate_examples() {
    for (input, expected) in [
        (PHI2, r"(a1 /\ a2) -> b"),
        (r"nu x. a /\ x", "a"),
        ("mu x. (x -> a) -> b", "(b -> a) -> b"),
    ] {
        let o = ipcmu(&["eliminate", "--verify", input]);
        assert_eq!(o.status.code(), Some(0), "{input}: {}", stdout(&o));
        assert_eq!(first_line(&o), expected);
        assert!(stdout(&o).contains("semantic: equivalent on all 24 algebras"));
    }
}

#[test]
fn eliminate_json_round_trips() {
    let (j, code) = json(&["eliminate", "--verify", PHI2]);
    assert_eq!(code, Some(0));
    let out = from_json_str(&j["output"].to_string()).unwrap();
    assert_eq!(out, parse(r"(a1 /\ a2) -> b").unwrap());
    assert_eq!(from_json_str(&j["input"].to_string()).unwrap(), parse(PHI2).unwrap());
    assert_eq!(j["verification"]["ok"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(ipcmu(&["eliminate", r"a /\"]).status.code(), Some(1));
    assert_eq!(ipcmu(&["eliminate", "mu x. x -> a"]).status.code(), Some(2));
    assert_eq!(ipcmu(&["parse", "nu x. ~x"]).status.code(), Some(2));
    assert_eq!(ipcmu(&["equiv", "a"]).status.code(), Some(64));
    assert_eq!(ipcmu(&["bogus"]).status.code(), Some(64));
    assert_eq!(ipcmu(&["--max-poset-size", "6", "selftest"]).status.code(), Some(64));
    let o = ipcmu(&["--budget", "1", "equiv", r"((a -> b) -> a) -> a", r"a \/ ~a"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn parse_reports_structure() {
    let (j, code) = json(&["parse", r"mu x. a \/ x"]);
    assert_eq!(code, Some(0));
    assert_eq!(j["free_vars"], serde_json::json!(["a"]));
    assert_eq!(j["well_formed"], true);
    assert_eq!(from_json_str(&j["formula"].to_string()).unwrap(), parse(r"mu x. a \/ x").unwrap());
}

#[test]
fn equiv_examples() {
    let o = ipcmu(&["equiv", "a -> a", "T"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first_line(&o), "equivalent");
    assert!(stdout(&o).contains("oracles agree"));

    let o = ipcmu(&["equiv", r"a \/ ~a", "T"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first_line(&o), "not equivalent");
    assert!(stdout(&o).contains("countermodel on 2-point poset [0<1]"), "{}", stdout(&o));

    let o = ipcmu(&["equiv", PHI2, r"(a1 /\ a2) -> b"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("note: "));
    assert!(stdout(&o).lines().any(|l| l == "equivalent"));
}

#[test]
fn equiv_json_reports_countermodel() {
    let (j, code) = json(&["equiv", r"a \/ ~a", "T"]);
    assert_eq!(code, Some(0));
    assert_eq!(j["verdict"], "not equivalent");
    assert_eq!(j["agree"], true);
    assert_eq!(j["countermodel"]["valuation"]["a"], "{0}");
}

#[test]
fn bound_examples() {
    let (j, code) = json(&["bound", "--measure", PHI3]);
    assert_eq!(code, Some(0));
    assert_eq!(j["bound"], 4);
    let p3 = j["measured"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["algebra"].as_str().unwrap().starts_with("P({1,2,3})"))
        .unwrap();
    assert_eq!(p3["measured"], 4);

    let (j, code) = json(&["bound", "--measure", "mu x. x"]);
    assert_eq!(code, Some(0));
    assert_eq!(j["bound"], 1);
    assert!(j["measured"].as_array().unwrap().iter().all(|r| r["measured"] == 0));

    let o = ipcmu(&["bound", "mu x. (x -> a) -> b"]);
    assert_eq!(first_line(&o), "bound: 2");
    assert!(stdout(&o).contains("weakly negative"));

    assert_eq!(ipcmu(&["bound", "a"]).status.code(), Some(64));
}

#[test]
fn iterate_examples() {
    let (j, _) = json(&["iterate", PHI2]);
    let rows = j["algebras"].as_array().unwrap();
    let p2 = rows
        .iter()
        .find(|r| r["algebra"].as_str().unwrap().starts_with("P({1,2})"))
        .unwrap();
    assert_eq!(p2["max_steps"], 3);
    assert_eq!(j["max_steps"], 3);

    let (j, _) = json(&["iterate", "mu x. x"]);
    assert_eq!(j["max_steps"], 0);

    let (j, _) = json(&["iterate", "mu x. ~~x"]);
    assert!(j["max_steps"].as_u64().unwrap() <= 2);
}

#[test]
fn reads_formulas_from_files() {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("phi2.txt");
    std::fs::write(&path, format!("{PHI2}\n")).unwrap();
    let o = ipcmu(&["eliminate", "--file", path.to_str().unwrap()]);
    assert_eq!(first_line(&o), r"(a1 /\ a2) -> b");
    let o = ipcmu(&["equiv", "--file", path.to_str().unwrap(), r"(a1 /\ a2) -> b"]);
    assert!(stdout(&o).lines().any(|l| l == "equivalent"));
}

#[test]
fn output_is_deterministic() {
    let args = ["iterate", PHI2];
    assert_eq!(stdout(&ipcmu(&args)), stdout(&ipcmu(&args)));
}

#[test]
fn small_selftest_passes() {
    let o = ipcmu(&["--max-poset-size", "2", "--corpus", "20", "--seed", "7", "selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).count(), 6);
}
