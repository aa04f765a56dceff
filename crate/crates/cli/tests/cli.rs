use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn leftre(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leftre")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn trace(dir: &Path) -> Vec<Value> {
    fs::read_to_string(dir.join("trace.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn zulu_min_with_silent_omega_is_static() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("omega.json"), r#"{"kind": "omega-bits", "entries": []}"#).unwrap();
    let out = leftre(
        &["run", "zulu-min", "--stages", "8", "--bits", "64", "--input", "omega=omega.json", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = trace(&tmp.path().join("out"));
    assert_eq!(lines.len(), 9);
    // Markers never move once an interval is covered.
    for pair in lines.windows(2) {
        let old = pair[0]["markers"].as_array().unwrap();
        let new = pair[1]["markers"].as_array().unwrap();
        assert_eq!(&new[..old.len()], &old[..]);
    }
    let verdict: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["passed"], true);
}

#[test]
fn gazebo_on_sorted_catalog_never_obliterates() {
    let tmp = tempfile::tempdir().unwrap();
    let procs: Vec<String> = ["000011", "000101", "001000", "010110", "100000"]
        .iter()
        .enumerate()
        .map(|(i, b)| format!(r#"{{"label": "b{i}", "snapshots": [[0, "{b}"]]}}"#))
        .collect();
    let file = format!(r#"{{"horizon": {{"stages": 6, "bits": 6}}, "processes": [{}]}}"#, procs.join(","));
    fs::write(tmp.path().join("sorted.json"), file).unwrap();
    let out = leftre(&["run", "gazebo", "--input", "catalog=sorted.json", "--out", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for line in trace(&tmp.path().join("out")) {
        for ev in line["events"].as_array().unwrap() {
            assert_ne!(ev["event"], "obliterated");
        }
    }
    assert!(stdout_json(&out)["checks"][2]["detail"].as_str().unwrap().starts_with("0 of 5"));
}

#[test]
fn inc_decode_reports_k_below_each_x() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("k.json"), r#"{"kind": "k-set", "entries": [[1, 3], [4, 0], [6, 9], [9, 2]]}"#).unwrap();
    let cfg = r#"{"construction": "inc-decode", "stages": 20, "bits": 24, "inputs": {"k": "k.json"}, "params": {"x": 10}}"#;
    fs::write(tmp.path().join("run.json"), cfg).unwrap();
    let out = leftre(&["run", "--config", "run.json", "--out", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let k = [1u64, 4, 6, 9];
    let lines = trace(&tmp.path().join("out"));
    assert_eq!(lines.len(), 11);
    for line in lines {
        let x = line["x"].as_u64().unwrap();
        let decoded: Vec<u64> = serde_json::from_value(line["decoded"].clone()).unwrap();
        let expected: Vec<u64> = k.iter().copied().filter(|&y| y < x).collect();
        assert_eq!(decoded, expected);
    }
}

#[test]
fn validate_accepts_a_monotone_file() {
    let tmp = tempfile::tempdir().unwrap();
    let file = r#"{"horizon": {"stages": 4, "bits": 5},
        "processes": [{"label": "p", "snapshots": [[0, "00000"], [2, "01000"], [3, "10000"]]}]}"#;
    fs::write(tmp.path().join("ok.json"), file).unwrap();
    let out = leftre(&["validate", "ok.json"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], true);
    assert_eq!(report["verdicts"][0]["verdict"], "ok");
}

#[test]
fn validate_names_the_injected_violation() {
    let tmp = tempfile::tempdir().unwrap();
    let file = r#"{"horizon": {"stages": 5, "bits": 6},
        "processes": [
            {"label": "good", "snapshots": [[0, "000000"], [1, "001000"]]},
            {"label": "bad", "snapshots": [[0, "010000"], [3, "001111"]]}
        ]}"#;
    fs::write(tmp.path().join("bad.json"), file).unwrap();
    let out = leftre(&["validate", "bad.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], false);
    let v = &report["verdicts"][1];
    assert_eq!(v["index"], 1);
    assert_eq!(v["verdict"], "violation");
    assert_eq!(v["stage"], 2);
    assert_eq!(v["position"], 1);
}

#[test]
fn validate_empty_numbering() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("empty.json"), r#"{"horizon": {"stages": 3, "bits": 4}, "processes": []}"#).unwrap();
    let out = leftre(&["validate", "empty.json"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], true);
    assert_eq!(report["indices"], 0);
}

#[test]
fn parse_errors_carry_line_and_column() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("broken.json"), "{\"horizon\": {\"stages\": 3,\n  \"bits\": 4}, \"processes\": [}").unwrap();
    let out = leftre(&["validate", "broken.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2 column"), "{err}");
}

#[test]
fn oracle_dumps_lex_pairs_as_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let file = r#"{"horizon": {"stages": 2, "bits": 3},
        "processes": [{"label": "a", "snapshots": [[0, "010"]]}, {"label": "b", "snapshots": [[0, "001"], [1, "100"]]}]}"#;
    fs::write(tmp.path().join("nu.json"), file).unwrap();
    let out = leftre(&["oracle", "nu.json", "--mode", "lex"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,j,stage"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.contains(&"0,1,1"), "{csv}");
    assert!(!rows.iter().any(|r| r.starts_with("1,0,")), "{csv}");
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(leftre(&["run"], tmp.path()).status.code(), Some(2));
    assert_eq!(leftre(&["run", "no-such-thing"], tmp.path()).status.code(), Some(2));
    let out = leftre(&["run", "zulu-min", "--input", "omega=missing.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}
