use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qaccel_harness::record::RunRecord;
use qaccel_harness::{cli_run, RunConfig};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(name)
}

fn qaccel(store: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaccel"))
        .env("QACCEL_STORE", store)
        .args(args)
        .output()
        .unwrap()
}

fn records(store: &Path) -> Vec<RunRecord> {
    std::fs::read_to_string(store)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn run_persists_a_bell_record() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("runs.jsonl");
    let bell = corpus("bell.qasm");
    let out = qaccel(&store, &["run", bell.to_str().unwrap(), "--shots", "1000", "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stored = records(&store);
    assert_eq!(stored.len(), 1);
    let m = &stored[0].metrics;
    assert!((m.fidelity.unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(m.success_probability, Some(1.0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(&stored[0].run_id.to_string()));
}

#[test]
fn run_on_line_two_adds_no_swaps() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("runs.jsonl");
    let bell = corpus("bell.qasm");
    let out = qaccel(&store, &["run", bell.to_str().unwrap(), "--topology", "line:2"]);
    assert!(out.status.success());
    assert_eq!(records(&store)[0].mapping.unwrap().added_swaps, 0);
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("runs.jsonl");
    let bell = corpus("bell.qasm");
    let bell = bell.to_str().unwrap();
    let bad = dir.path().join("bad.qasm");
    std::fs::write(&bad, "version 1.0\nqubits 2\nfrobnicate q[0]\n").unwrap();

    let cases: [(&[&str], i32); 6] = [
        (&["run", "missing.qasm"], 1),
        (&["run", bad.to_str().unwrap()], 1),
        (&["run", bell, "--topology", "line:1"], 2),
        (&["run", bell, "--topology", "grid:6x6"], 3),
        (&["run", bell, "--topology", "hexagon:3"], 1),
        (&["bench", "qubits", "--n-min", "5", "--n-max", "4"], 1),
    ];
    for (args, code) in cases {
        let out = qaccel(&store, args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert!(!store.exists());
}

#[test]
fn metrics_query_filters_and_warns() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("runs.jsonl");
    for name in ["bell.qasm", "ghz3.qasm"] {
        assert!(qaccel(&store, &["run", corpus(name).to_str().unwrap()]).status.success());
    }
    let ghz = &records(&store)[1];
    let out = qaccel(&store, &["metrics", "query", "--run-id", &ghz.run_id.to_string()]);
    assert!(out.status.success());
    let lines: Vec<RunRecord> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(&lines, std::slice::from_ref(ghz));

    let mut text = std::fs::read_to_string(&store).unwrap();
    text.push_str("not json\n");
    std::fs::write(&store, text).unwrap();
    let out = qaccel(&store, &["metrics", "query"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped 1"));
}

#[test]
fn map_prints_adjacent_cqasm() {
    let dir = tempfile::tempdir().unwrap();
    let out = qaccel(&dir.path().join("s"), &["map", corpus("toffoli_truth.qasm").to_str().unwrap(), "--topology", "line:3"]);
    assert!(out.status.success());
    let program = qaccel_core::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(program.num_qubits(), 3);
}

#[test]
fn align_ranks_the_toy_match() {
    let dir = tempfile::tempdir().unwrap();
    let out = qaccel(&dir.path().join("s"), &["align", "0110", "01", "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().nth(2).unwrap();
    assert_eq!(first.split_whitespace().next(), Some("0"), "{text}");
}

#[test]
fn bench_depth_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("csv");
    let out = qaccel(
        &dir.path().join("s"),
        &["bench", "depth", "--depths", "10,20,30", "--out-dir", out_dir.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for kind in ["x", "h", "cnot"] {
        let text = std::fs::read_to_string(out_dir.join(format!("depth_{kind}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("variable,time_ns"));
        assert_eq!(lines.count(), 3);
    }
}

#[test]
fn seeded_runs_reproduce() {
    for (name, topology, noise) in [
        ("teleport.qasm", None, None),
        ("rotation_ladder.qasm", Some("ring:4"), None),
        ("ghz3.qasm", Some("line:4"), Some(0.05)),
    ] {
        let config = RunConfig {
            seed: 11,
            shots: 300,
            topology: topology.map(String::from),
            noise_p: noise,
            ..RunConfig::default()
        };
        let a = cli_run(&corpus(name), &config, None).unwrap();
        let b = cli_run(&corpus(name), &config, None).unwrap();
        assert_ne!(a.run_id, b.run_id);
        assert!(a.same_outcome(&b), "{name}");
    }
}
