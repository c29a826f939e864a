use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use arithgraph::graph::parse_graph;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arithgraph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn arithgraph")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes a generated family member into `dir`.
fn generate(dir: &Path, name: &str, family: &[&str]) -> PathBuf {
    let mut args = vec!["gen"];
    args.extend_from_slice(family);
    let o = run(&args);
    assert!(o.status.success(), "gen {family:?} failed");
    let path = dir.join(name);
    std::fs::write(&path, &o.stdout).unwrap();
    path
}

#[test]
fn phi_of_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "c6.graph", &["cycle", "6"]);
    let o = run(&["phi", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Z/6"), "{text}");
    assert!(text.contains("order 6"), "{text}");
}

#[test]
fn classify_i0_star_leaves() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "k.graph", &["kodaira_star", "0"]);
    let o = run(&["classify", f.to_str().unwrap(), "l1", "l2", "--ell", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("InPsi order 2"), "{text}");
    assert!(text.contains(arithgraph::citation::IN_PSI), "{text}");

    // with residue characteristic equal to ell the verdict is withheld
    let o = run(&["classify", f.to_str().unwrap(), "l1", "l2", "--ell", "2", "--residue-char", "2"]);
    assert!(stdout(&o).starts_with("Unknown"), "{}", stdout(&o));
}

#[test]
fn order_on_one_terminal_chain_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "t.graph", &["euclid_tree", "7", "2,3,2"]);
    let g = parse_graph(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert!(g.index_of("t1_2").is_some());
    let o = run(&["order", f.to_str().unwrap(), "t1_1", "t1_2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("order 1"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(run(&["phi"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // unreadable or invalid graph
    let missing = dir.path().join("missing.graph");
    assert_eq!(run(&["phi", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, "vertex a 2\nvertex b 1\nedge a b 1\n").unwrap();
    assert_eq!(run(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    // precondition: a multiply connected pair has no lambda
    let c = generate(dir.path(), "c6.graph", &["cycle", "6"]);
    let o = run(&["lambda", c.to_str().unwrap(), "c0", "c3", "--ell", "2"]);
    assert_eq!(o.status.code(), Some(3));
    // precondition: breaking at a vertex that does not disconnect
    let o = run(&["break", c.to_str().unwrap(), "c0", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn json_output_is_versioned_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "r.graph", &["random_reduced", "12", "0.2", "--seed", "4"]);
    let args = ["--format", "json", "info", f.to_str().unwrap()];
    let first = stdout(&run(&args));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(first, stdout(&run(&args)));

    let again = generate(dir.path(), "r2.graph", &["random_reduced", "12", "0.2", "--seed", "4"]);
    assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(&again).unwrap());

    let o = run(&["--format", "json", "lambda", f.to_str().unwrap(), "nope", "v1", "--ell", "2"]);
    assert_ne!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["error"]["kind"].is_string(), "{v}");
}

#[test]
fn break_writes_parseable_parts() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "t.graph", &["euclid_tree", "5", "1,2,2"]);
    let out = dir.path().join("parts");
    std::fs::create_dir(&out).unwrap();
    let o = run(&["break", f.to_str().unwrap(), "n", "--ell", "3", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut parts: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
    parts.sort();
    assert_eq!(parts.len(), 3);
    for p in &parts {
        let g = parse_graph(&std::fs::read_to_string(p).unwrap()).unwrap();
        g.validate().unwrap();
        assert_eq!(run(&["validate", p.to_str().unwrap()]).status.code(), Some(0));
    }
}

#[test]
fn tilde_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "k.graph", &["kodaira_star", "0"]);
    let o = run(&["tilde", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let t = parse_graph(&stdout(&o)).unwrap();
    assert!(t.is_reduced());
    let o = run(&["audit76", "--ell", "2", "--a", "1", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
