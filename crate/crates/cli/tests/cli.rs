use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const SAMPLE3: &str = "[[0,1,2],[-1,0,1],[-1,-1,0]]";
const A2: &str = "[[0,1],[-1,0]]";

fn mutseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mutseq"))
        .args(args)
        .env_remove("MUTSEQ_MAX_DEPTH")
        .env_remove("MUTSEQ_MAX_NODES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Parses `--json` output and checks that it re-serializes to itself.
fn json(o: &Output) -> Value {
    let text = stdout(o);
    let v: Value = serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{e}: {text}"));
    let again: Value = serde_json::from_str(&v.to_string()).unwrap();
    assert_eq!(again, v);
    v
}

#[test]
fn classify_golden_sequences() {
    let o = mutseq(&["classify", "--matrix", SAMPLE3, "--seq", "3,2,1"]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("kind=reddening r=0 perm=id"),
        "{}",
        stdout(&o)
    );

    let o = mutseq(&[
        "classify",
        "--matrix",
        SAMPLE3,
        "--seq",
        "1,2,1,2,1,3,1,2",
        "--json",
    ]);
    let v = json(&o);
    assert_eq!(v["kind"], "reddening");
    assert_eq!(v["r"], 2);
    let colors: Vec<&str> = v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["color"].as_str().unwrap())
        .collect();
    assert_eq!(
        colors,
        ["green", "green", "green", "red", "red", "green", "green", "green"]
    );
    assert_eq!(v["steps"][3]["cvec"], serde_json::json!([-1, 0, 0]));
}

#[test]
fn empty_sequence_is_greening() {
    let o = mutseq(&["classify", "--matrix", SAMPLE3, "--seq", "", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["kind"], "greening");
    assert_eq!(v["r"], 0);
}

#[test]
fn seed_trace_marks_colors() {
    let o = mutseq(&["seed-trace", "--matrix", SAMPLE3, "--seq", "1,2,1,2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().skip(1).take(4).collect();
    assert!(
        lines[0].contains('+') && lines[0].ends_with("[1, 0, 0]"),
        "{text}"
    );
    assert!(
        lines[3].contains('-') && lines[3].ends_with("[-1, 0, 0]"),
        "{text}"
    );
    assert!(text.contains("C (columns marked + green, - red)"));
}

#[test]
fn matrix_and_sequence_files() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("b.json");
    fs::write(&matrix, r#"{"n": 3, "rows": [[0,1,2],[-1,0,1],[-1,-1,0]]}"#).unwrap();
    let seq = dir.path().join("seq.txt");
    fs::write(&seq, "2,3,1,2,1,2\n").unwrap();
    let m = matrix.to_str().unwrap();
    // the file wins over the flag
    let o = mutseq(&[
        "classify",
        "-m",
        m,
        "--seq",
        "1",
        "--seq-file",
        seq.to_str().unwrap(),
        "--json",
    ]);
    let v = json(&o);
    assert_eq!(v["seq"], serde_json::json!([2, 3, 1, 2, 1, 2]));
    assert_eq!(
        (v["kind"].as_str(), v["r"].as_u64()),
        (Some("reddening"), Some(0))
    );

    fs::write(&seq, r#"{"dirs": [3, 2, 1]}"#).unwrap();
    let o = mutseq(&[
        "classify",
        "-m",
        m,
        "--seq-file",
        seq.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(json(&o)["seq"], serde_json::json!([3, 2, 1]));
}

#[test]
fn mutate_prints_the_mutated_matrix() {
    let o = mutseq(&["mutate", "-m", SAMPLE3, "--seq", "3", "--json"]);
    let v = json(&o);
    assert_eq!(
        v["matrix"]["rows"],
        serde_json::json!([[0, 1, -2], [-1, 0, -1], [1, 1, 0]])
    );
}

#[test]
fn search_mgs_outcomes() {
    let o = mutseq(&["search-mgs", "-m", SAMPLE3, "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["seq"]["dirs"], serde_json::json!([3, 2, 1]));

    let o = mutseq(&["search-mgs", "-m", SAMPLE3, "--max-depth", "2"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("budget exhausted (MGS length ≥ n = 3)"));

    let o = Command::new(env!("CARGO_BIN_EXE_mutseq"))
        .args(["search-mgs", "-m", SAMPLE3])
        .env("MUTSEQ_MAX_DEPTH", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);

    let o = mutseq(&[
        "search-mgs",
        "-m",
        "[[0,2],[-2,0]]",
        "--prefix",
        "1",
        "--json",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["outcome"], "certified_none");

    let o = mutseq(&["search-mgs", "-m", "[[0]]", "--json"]);
    assert_eq!(json(&o)["seq"]["dirs"], serde_json::json!([1]));

    let o = mutseq(&[
        "search-reddening",
        "-m",
        "[[0,1,-2],[-1,0,-1],[1,1,0]]",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verdict"]["kind"], "reddening");
}

#[test]
fn enumerate_lists_known_sequences() {
    let o = mutseq(&["enumerate-mgs", "-m", SAMPLE3, "--max-len", "6", "--json"]);
    let v = json(&o);
    let seqs = v["sequences"].as_array().unwrap();
    assert!(seqs.contains(&serde_json::json!([3, 2, 1])));
    assert!(seqs.contains(&serde_json::json!([2, 3, 1, 2, 1, 2])));
}

#[test]
fn conjugate_and_rotate_check_their_predictions() {
    let o = mutseq(&[
        "conjugate",
        "-m",
        SAMPLE3,
        "--seq",
        "3,2,1",
        "--dir",
        "2",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["seq"], serde_json::json!([2, 3, 2, 1, 2]));
    assert_eq!(v["actual"]["r"], 1);
    assert_eq!(v["holds"], true);

    let o = mutseq(&[
        "rotate",
        "-m",
        SAMPLE3,
        "--seq",
        "1,2,1,2,1,3,1,2",
        "--times",
        "8",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["rotations"].as_array().unwrap().len(), 8);

    // not reddening or greening: a domain failure
    let o = mutseq(&["conjugate", "-m", SAMPLE3, "--seq", "1", "--dir", "2"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn conjugation_difference_of_a_neighbour() {
    let o = mutseq(&[
        "conj-diff",
        "-m",
        SAMPLE3,
        "--path",
        "3",
        "--reddening",
        "3,2,1",
        "--check",
        "2,1,3",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["phi"], 1);
    assert_eq!(v["check"]["initial_red"], 1);
    assert_eq!(v["check"]["holds"], true);
}

#[test]
fn restrict_to_a_subset() {
    let o = mutseq(&[
        "restrict",
        "-m",
        SAMPLE3,
        "--seq",
        "2,3,1,2,1,2",
        "--indices",
        "1,2",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["matrix"]["rows"], serde_json::json!([[0, 1], [-1, 0]]));
    assert_eq!(v["verdict"]["kind"], "reddening");
    assert_eq!(v["verdict"]["r"], 0);
}

#[test]
fn verify_suites() {
    let o = mutseq(&[
        "verify", "-m", SAMPLE3, "--suite", "all", "--seed", "42", "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let first = json(&o);
    assert_eq!(first["passed"], true);
    let again = mutseq(&[
        "verify", "-m", SAMPLE3, "--suite", "all", "--seed", "42", "--json",
    ]);
    assert_eq!(stdout(&again), stdout(&o));

    let o = mutseq(&["verify", "--suite", "rank2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rank2        PASS"));

    let o = mutseq(&[
        "verify",
        "-m",
        SAMPLE3,
        "--suite",
        "dualities",
        "--corrupt",
        "--paths",
        "3",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL") && stdout(&o).contains("counterexample"));

    let o = mutseq(&[
        "verify",
        "-m",
        "[[0,1,-1],[-1,0,1],[1,-1,0]]",
        "--suite",
        "dualities",
        "--paths",
        "10",
        "--total-mutability",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("skew-symmetrizable"));

    let o = mutseq(&["verify", "--suite", "dualities"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exchange_graph_and_store() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a2.jsonl");
    let f = file.to_str().unwrap();
    let o = mutseq(&[
        "exchange-graph",
        "-m",
        A2,
        "--out",
        f,
        "--reddening-path",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["nodes"], 5);
    assert_eq!(v["reddening_path"]["red"], 0);

    assert_eq!(code(&mutseq(&["store", "check", f])), 0);
    let o = mutseq(&["store", "path", f, "--reddening", "--json"]);
    assert_eq!(json(&o)["red"], 0);
    let o = mutseq(&["store", "info", f, "--json"]);
    assert_eq!(json(&o)["edges"], 10);

    let text = fs::read_to_string(&file).unwrap();
    fs::write(&file, text.replacen("\"green\"", "\"red\"", 1)).unwrap();
    let o = mutseq(&["store", "check", f]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
}

#[test]
fn staged_exploration_matches_a_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let staged = dir.path().join("staged.jsonl");
    let single = dir.path().join("single.jsonl");
    let s = staged.to_str().unwrap();
    let o = mutseq(&[
        "exchange-graph",
        "-m",
        SAMPLE3,
        "--max-depth",
        "2",
        "--out",
        s,
    ]);
    assert_eq!(code(&o), 3);
    let o = mutseq(&["store", "expand", s, "--max-depth", "4", "--workers", "3"]);
    assert_eq!(code(&o), 3);
    mutseq(&[
        "exchange-graph",
        "-m",
        SAMPLE3,
        "--max-depth",
        "4",
        "--out",
        single.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&staged).unwrap(), fs::read(&single).unwrap());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&mutseq(&["classify", "-m", SAMPLE3, "--seq", "4"])), 2);
    assert_eq!(code(&mutseq(&["classify", "-m", SAMPLE3])), 2);
    assert_eq!(
        code(&mutseq(&["classify", "-m", "[[0,1],[1,0]]", "--seq", "1"])),
        2
    );
    assert_eq!(
        code(&mutseq(&["classify", "-m", "missing.json", "--seq", "1"])),
        2
    );
    assert_eq!(code(&mutseq(&["frobnicate"])), 2);
    assert_eq!(
        code(&mutseq(&["search-mgs", "-m", SAMPLE3, "--max-depth", "0"])),
        2
    );
    let o = mutseq(&["classify", "-m", SAMPLE3, "--seq", "x", "--json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["exit_code"], 2);
}
