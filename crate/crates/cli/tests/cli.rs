use std::fs;
use std::path::{Path, PathBuf};

use assert_cmd::Command;
use serde_json::Value;
use tempfile::TempDir;

fn snchar() -> Command {
    Command::cargo_bin("snchar").unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn stdout(cmd: &mut Command) -> String {
    let out = cmd.assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

#[test]
fn char_eval_examples() {
    assert_eq!(stdout(snchar().args(["char", "eval", "--lambda", "(2,2)", "--mu", "(2,2)"])), "2\n2\n");
    assert_eq!(stdout(snchar().args(["char", "eval", "--lambda", "5", "--mu", "3,2", "--method", "mn"])), "1\n");
    assert_eq!(stdout(snchar().args(["char", "eval", "--lambda", "1,1,1", "--mu", "3", "--method", "jt"])), "1\n");
}

#[test]
fn char_eval_json() {
    let out = stdout(snchar().args(["--format", "json", "char", "eval", "--lambda", "3,3", "--mu", "4,2"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mn"], "-1");
    assert_eq!(v["jt"], "-1");
    assert_eq!(v["agree"], true);
}

#[test]
fn size_mismatch_fails() {
    snchar()
        .args(["char", "eval", "--lambda", "3", "--mu", "2"])
        .assert()
        .code(2)
        .stderr(predicates::str::contains("size mismatch"));
}

#[test]
fn identities_and_table() {
    let out = stdout(snchar().args(["char", "identity", "--n", "4", "--which", "rsk"]));
    assert!(out.contains("24 vs 24") && out.ends_with("PASS (1 stages)\n"), "{out}");
    let out = stdout(snchar().args(["char", "table", "--n", "3"]));
    assert!(out.contains("(2,1): -1 0 2"), "{out}");
    snchar().args(["char", "identity", "--n", "9"]).assert().code(2);
}

#[test]
fn counts() {
    let dir = TempDir::new().unwrap();
    let c = write(dir.path(), "c.txt", "input a\ninput b\ngate g = OR a b\noutput g\n");
    assert_eq!(stdout(snchar().arg("count").arg("sat").arg(&c)), "3\n");
    let out = stdout(snchar().args(["count", "setpartition", "--items", "1,1,1,1", "--bins", "2,2"]));
    assert_eq!(out, "6\n");
    let g = write(dir.path(), "e.3dm", "k 2\n1 1 1\n2 2 2\n1 2 2\n2 1 1\n");
    assert_eq!(stdout(snchar().arg("count").arg("3dm").arg(&g)), "2\n");
    snchar().arg("count").arg("3dm").arg(&g).args(["--bound", "1"]).assert().code(2);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let c = write(dir.path(), "bad.txt", "input a\n\ngate g = AND a b\noutput g\n");
    snchar()
        .arg("count")
        .arg("sat")
        .arg(&c)
        .assert()
        .code(2)
        .stderr(predicates::str::contains("line 3"));
}

#[test]
fn reduction_chain_preserves_counts() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c = write(d, "c.txt", "input a\ninput b\ngate g = AND a b\ngate h = NOT g\noutput h\n");
    let cnf = d.join("c.cnf");
    let oit = d.join("c.oit");
    let g3 = d.join("c.3dm");
    snchar().args(["reduce", "tseytin"]).arg(&c).arg("-o").arg(&cnf).assert().success();
    snchar().args(["reduce", "oit"]).arg(&cnf).arg("-o").arg(&oit).assert().success();
    snchar().args(["reduce", "3dm"]).arg(&oit).arg("-o").arg(&g3).assert().success();
    assert_eq!(stdout(snchar().arg("count").arg("cnf").arg(&cnf)), "3\n");
    assert_eq!(stdout(snchar().arg("count").arg("oit").arg(&oit)), "3\n");
    assert_eq!(stdout(snchar().arg("count").arg("3dm").arg(&g3).args(["--bound", "10000"])), "3\n");
}

#[test]
fn reduce_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let e = write(dir.path(), "e.3dm", "k 1\n1 1 1\n");
    let ep = write(dir.path(), "ep.3dm", "k 1\n");
    let run = || stdout(snchar().args(["reduce", "pipeline"]).arg(&e).arg(&ep));
    let first = run();
    assert_eq!(first, run());
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["delta"], "6");
    assert_eq!(v["char_instance"]["delta"], "6");
}

#[test]
fn stage_files_roundtrip() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let e = write(d, "e.3dm", "k 1\n1 1 1\n");
    let j = d.join("j.txt");
    let g = d.join("g.json");
    let m = d.join("m.json");
    snchar().args(["reduce", "join"]).arg(&e).arg(&e).arg("-o").arg(&j).assert().success();
    assert_eq!(stdout(snchar().arg("count").arg("4dm").arg(&j)), "2\n");
    snchar().args(["reduce", "gadget"]).arg(&j).arg("-o").arg(&g).assert().success();
    let gadget: Value = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(gadget["items"][0]["role"], "real_vertex");
    snchar().args(["reduce", "modify"]).arg(&g).arg("-o").arg(&m).assert().success();
    let modified: Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(modified["d_bar"][0], "2");
}

#[test]
fn charinstance_file_evaluates() {
    let dir = TempDir::new().unwrap();
    let ci = dir.path().join("ci.json");
    snchar().args(["reduce", "charinstance", "--c", "2,4", "--d", "()", "-o"]).arg(&ci).assert().success();
    assert_eq!(stdout(snchar().args(["char", "eval", "--instance"]).arg(&ci)), "1\n1\n");
    let p = dir.path().join("p.json");
    snchar().args(["reduce", "parsimonious", "--a", "1,1,1,1", "--b", "2,2", "-o"]).arg(&p).assert().success();
    assert_eq!(stdout(snchar().args(["char", "eval", "--method", "jt", "--instance"]).arg(&p)), "6\n");
}

#[test]
fn verify_pipeline_examples() {
    let dir = TempDir::new().unwrap();
    let one = write(dir.path(), "one.3dm", "k 1\n1 1 1\n");
    let none = write(dir.path(), "none.3dm", "k 1\n");
    for (a, b, chi) in [(&one, &none, "6 vs 6"), (&one, &one, "0 vs 0"), (&none, &one, "-6 vs -6")] {
        let out = stdout(snchar().args(["verify", "pipeline"]).arg(a).arg(b));
        assert!(out.contains(&format!("χ = δ·(#3DM(E) − #3DM(E')): {chi}")), "{out}");
        assert!(out.ends_with("PASS (13 stages)\n"), "{out}");
    }
}

#[test]
fn verify_suites_json() {
    let out = stdout(snchar().args(["--format", "json", "verify", "parsimony", "--seed", "7", "--count", "3"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    let again = stdout(snchar().args(["--format", "json", "verify", "parsimony", "--seed", "7", "--count", "3"]));
    let w: Value = serde_json::from_str(&again).unwrap();
    let names = |v: &Value| v["stages"].as_array().unwrap().iter().map(|s| s["left"].clone()).collect::<Vec<_>>();
    assert_eq!(names(&v), names(&w));
    let out = stdout(snchar().args(["verify", "identities", "--max-n", "5"]));
    assert!(out.contains("rowcol n=2: row sum (1,1) = 0"), "{out}");
}

#[test]
fn non_covering_pipeline_rejected() {
    let dir = TempDir::new().unwrap();
    let e = write(dir.path(), "e.3dm", "k 2\n1 1 1\n");
    snchar()
        .args(["reduce", "pipeline"])
        .arg(&e)
        .arg(&e)
        .assert()
        .code(2)
        .stderr(predicates::str::contains("coverage"));
}
