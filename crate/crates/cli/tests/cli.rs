use std::path::Path;
use std::process::{Command, Output};

fn qpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpi")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn builtin_data_validate() {
    for name in ["osp12", "osp14", "osp16", "rank2", "oddpair"] {
        let o = qpi(&["validate", "--datum", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
}

#[test]
fn invalid_datum_names_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"A": [[2, -1], [-1, 2]], "parity": [1, 0], "d": [1, 1]}"#).unwrap();
    let o = qpi(&["validate", "--datum", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL (d)"));
    assert!(stderr(&o).contains("(f)"));
    // any other command refuses the datum as input
    let o = qpi(&["crystal-binf", "--datum", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{").unwrap();
    assert_eq!(qpi(&["validate", "--datum", broken.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qpi(&["validate", "--datum", "sl3"]).status.code(), Some(2));
    assert_eq!(qpi(&["crystal-bla", "--datum", "osp12", "--lambda=-1"]).status.code(), Some(2));
    assert_eq!(qpi(&["crystal-bla", "--datum", "osp12", "--lambda", "1,2"]).status.code(), Some(2));
    assert_eq!(qpi(&["crystal-bla", "--datum", "osp14", "--lambda", "4,4", "--budget", "20"]).status.code(), Some(2));
    assert_eq!(qpi(&["--jobs", "0", "validate"]).status.code(), Some(2));
    assert_eq!(qpi(&["--pi", "2", "validate"]).status.code(), Some(2));
}

#[test]
fn rank_one_string_as_dot_and_json() {
    let o = qpi(&["crystal-bla", "--datum", "osp12", "--lambda", "3", "--format", "dot", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph crystal {"));
    assert!(dot.contains("n2 -> n3 [label=\"1\", sign=1];"));
    let o = qpi(&["crystal-bla", "--datum", "osp12", "--lambda", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 4);
    assert_eq!(v["edges"].as_array().unwrap().len(), 3);
}

#[test]
fn canonical_elements_at_depth_41() {
    let o = qpi(&["canonical", "--datum", "osp14", "--cutoff", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("G(1,1,1,1,2) = F1^(4) F2"), "{text}");
    assert!(text.contains("G(1,1,1,2,1) = F1^(3) F2 F1 + (-q^(-1) - q*pi) F1^(4) F2"), "{text}");
    let minus = stdout(&qpi(&["canonical", "--datum", "osp14", "--cutoff", "5", "--pi", "-1"]));
    assert!(minus.contains("G(1,1,1,2,1) = F1^(3) F2 F1 + (q - q^(-1)) F1^(4) F2"), "{minus}");
    let tex = stdout(&qpi(&["canonical", "--datum", "osp14", "--cutoff", "5", "--format", "tex"]));
    assert!(tex.contains("\\begin{align*}"));
}

#[test]
fn gram_at_depth_41() {
    let o = qpi(&["gram", "--datum", "osp14", "--depth", "4,1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["basis"].as_array().unwrap().len(), 3);
    assert_eq!(v["basis"][0], serde_json::json!([1, 1, 1, 1, 2]));
    let g = v["gram"].as_array().unwrap();
    assert!(g.len() == 3 && g.iter().all(|r| r.as_array().unwrap().len() == 3));
    assert_eq!(g[0][1], g[1][0]);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["crystal-binf", "--datum", "rank2", "--cutoff", "4", "--format", "json"];
    let one = qpi(&[&["--jobs", "1"], &args[..]].concat());
    let four = qpi(&[&["--jobs", "4"], &args[..]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let again = qpi(&[&["--jobs", "4"], &args[..]].concat());
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn tensor_rule_command() {
    let o = qpi(&["tensor-rule", "--datum", "osp12", "--lambda", "2", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("0 mismatches"));
}

#[test]
fn examples_table_reports_the_known_failures() {
    let o = qpi(&["paper-examples"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("71 of 75 checks pass"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("FAIL")).count(), 4);
}

#[test]
fn out_file_and_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.dot");
    let cache = dir.path().join("cache");
    std::fs::create_dir(&cache).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qpi"))
        .args(["crystal-binf", "--datum", "osp14", "--cutoff", "3", "--format", "dot", "--out"])
        .arg(&out)
        .env("QPI_CACHE_DIR", &cache)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(first.starts_with("digraph"));
    assert_eq!(entries(&cache), 1);
    // a second run reads the cache and gives the same graph
    let o = Command::new(env!("CARGO_BIN_EXE_qpi"))
        .args(["crystal-binf", "--datum", "osp14", "--cutoff", "3", "--format", "dot"])
        .env("QPI_CACHE_DIR", &cache)
        .output()
        .unwrap();
    assert_eq!(stdout(&o), first);
}

fn entries(p: &Path) -> usize {
    std::fs::read_dir(p).unwrap().count()
}
