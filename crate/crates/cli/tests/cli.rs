use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TABLE: &str = "3\n4\n7\n13\n14\n15\n21\n25\n36\n38\n54\n62\n";

fn efset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efset")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn build_small_table() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.txt", TABLE);
    let out = path(&dir, "t.ef");
    let o = efset(&["build", "--structure", "ef", "--input", &input, "--out", &out, "--universe", "63"]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["n"], 12);
    assert_eq!(v["ell"], 3);
    assert_eq!(v["payload_bits"], 56);
    assert_eq!(v["ef_bits"], 56);
    assert!(Path::new(&out).exists());

    let q = efset(&["query", "--structure", "ef", "--input", &out, "predecessor", "0", "14", "64"]);
    assert!(q.status.success(), "{q:?}");
    assert_eq!(stdout(&q), "predecessor 0 none\npredecessor 14 13\npredecessor 64 62\n");
}

#[test]
fn every_structure_round_trips_through_files() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.txt", TABLE);
    for s in ["ef", "sampled", "dynset", "append"] {
        let out = path(&dir, s);
        let o = efset(&["build", "--structure", s, "--input", &input, "--out", &out, "--universe", "63"]);
        assert!(o.status.success(), "{s}: {o:?}");
        let q = efset(&["query", "--structure", s, "--input", &out, "--json", "access", "0", "11"]);
        assert!(q.status.success(), "{s}: {q:?}");
        let lines: Vec<serde_json::Value> = stdout(&q).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines[0]["result"], 3);
        assert_eq!(lines[1]["result"], 62);
    }
}

#[test]
fn bad_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x");
    let empty = write(&dir, "e.txt", "");
    let o = efset(&["build", "--structure", "ef", "--input", &empty, "--out", &out]);
    assert_eq!(o.status.code(), Some(2));

    let unsorted = write(&dir, "u.txt", "1\n5\n5\n");
    let o = efset(&["build", "--structure", "ef", "--input", &unsorted, "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    // Dynset accepts any order.
    let o = efset(&["build", "--structure", "dynset", "--input", &unsorted, "--out", &out]);
    assert!(o.status.success(), "{o:?}");

    let missing = path(&dir, "nope.txt");
    let o = efset(&["build", "--structure", "ef", "--input", &missing, "--out", &out]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_passes_and_catches_faults() {
    let o = efset(&["verify", "--structure", "dynset", "--seed", "1", "--n", "20000", "--ops", "20000"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("0 divergences"));

    let o = efset(&["verify", "--structure", "dynset", "--seed", "1", "--n", "20000", "--ops", "20000", "--fault-at", "700"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("op 700") && err.contains("seed 1"), "{err}");

    for s in ["ef", "sampled", "append"] {
        let o = efset(&["verify", "--structure", s, "--seed", "3", "--n", "5000", "--ops", "5000"]);
        assert!(o.status.success(), "{s}: {o:?}");
        let o = efset(&["verify", "--structure", s, "--seed", "3", "--n", "5000", "--ops", "5000", "--fault-at", "10"]);
        assert_eq!(o.status.code(), Some(1), "{s}");
    }
}

#[test]
fn small_universe_gets_exhaustive_sweep() {
    let o = efset(&["verify", "--structure", "dynset", "--n", "300", "--universe", "4000", "--ops", "3000", "--json"]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["exhaustive_sweeps"], 1);
}

#[test]
fn tapes_replay_and_reject_bad_appends() {
    let dir = TempDir::new().unwrap();
    let tape = path(&dir, "tape.txt");
    let o = efset(&["verify", "--structure", "dynset", "--n", "1000", "--ops", "2000", "--out", &tape]);
    assert!(o.status.success(), "{o:?}");
    let o = efset(&["verify", "--structure", "dynset", "--tape", &tape]);
    assert!(o.status.success(), "{o:?}");

    let bad = write(&dir, "bad.txt", "append 5\nappend 9\nappend 7\n");
    let o = efset(&["verify", "--structure", "append", "--tape", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let mixed = write(&dir, "mixed.txt", "append 5\ninsert 9\n");
    let o = efset(&["verify", "--structure", "append", "--tape", &mixed]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn space_is_deterministic_and_tracks_bounds() {
    let args = ["space", "--structure", "ef", "--sizes", "12", "--universe", "63"];
    let a = efset(&args);
    assert!(a.status.success(), "{a:?}");
    let text = stdout(&a);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "ef");
    assert_eq!(row[1], "12");
    assert_eq!(row[8], "56");

    let run = || {
        let o = efset(&["space", "--structure", "dynset", "--sizes", "1000,4000", "--seed", "9"]);
        assert!(o.status.success(), "{o:?}");
        // Drop the timing columns before comparing.
        stdout(&o)
            .lines()
            .map(|l| {
                let c: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{},{}", c[0], c[1], c[2], c[7], c[8])
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn dynset_redundancy_shrinks_with_n() {
    let o = efset(&["space", "--structure", "dynset", "--sizes", "2000,20000,200000", "--json"]);
    assert!(o.status.success(), "{o:?}");
    let r: Vec<f64> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["redundancy_per_n"].as_f64().unwrap())
        .collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn bench_writes_every_op_class() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "bench.csv");
    let o = efset(&["bench", "--structure", "dynset", "--sizes", "3000", "--ops", "500", "--repetitions", "1", "--out", &out]);
    assert!(o.status.success(), "{o:?}");
    let file = std::fs::read_to_string(&out).unwrap();
    assert_eq!(file, stdout(&o));
    let ops: Vec<&str> = file.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(ops, ["access", "predecessor", "insert", "delete"]);
}
