use std::io::Write;

use chrono::{Duration, Utc};
use proptest::prelude::*;
use qaccel_core::parse;
use qaccel_core::statecore::Amplitude;
use qaccel_harness::record::FinalState;
use qaccel_harness::{run_program, Filter, RunConfig, RunRecord, Store};

fn record(source: &str, seed: u64) -> RunRecord {
    let config = RunConfig {
        seed,
        ..RunConfig::default()
    };
    run_program(&parse(source).unwrap(), &config).unwrap()
}

const ROTATIONS: &str = "version 1.0\nqubits 2\nry q[0], 0.3\nrx q[1], 1.1\ncnot q[0], q[1]\nrz q[1], -0.2\n";
const BELL: &str = "version 1.0\nqubits 2\nh q[0]\ncnot q[0], q[1]\n";

#[test]
fn append_then_query_by_id_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::new(dir.path().join("runs.jsonl"));
    let a = record(ROTATIONS, 1);
    let b = record(BELL, 2);
    store.append(&a).unwrap();
    store.append(&b).unwrap();
    let found = store
        .query(&Filter {
            run_id: Some(a.run_id),
            ..Filter::default()
        })
        .unwrap();
    assert_eq!(found.skipped, 0);
    assert_eq!(found.records, vec![a]);
}

#[test]
fn missing_store_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let q = Store::new(dir.path().join("none.jsonl")).query(&Filter::default()).unwrap();
    assert!(q.records.is_empty());
    assert_eq!(q.skipped, 0);
}

#[test]
fn corrupt_lines_are_counted_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runs.jsonl");
    let store = Store::new(&path);
    store.append(&record(BELL, 0)).unwrap();
    writeln!(std::fs::OpenOptions::new().append(true).open(&path).unwrap(), "{{\"run_id\": truncated").unwrap();
    store.append(&record(BELL, 1)).unwrap();
    let q = store.query(&Filter::default()).unwrap();
    assert_eq!(q.records.len(), 2);
    assert_eq!(q.skipped, 1);
}

#[test]
fn filters_by_hash_and_time() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::new(dir.path().join("runs.jsonl"));
    let mut old = record(BELL, 0);
    old.timestamp = Utc::now() - Duration::days(2);
    let bell = record(BELL, 1);
    let rot = record(ROTATIONS, 1);
    for r in [&old, &bell, &rot] {
        store.append(r).unwrap();
    }
    let by_hash = store
        .query(&Filter {
            circuit_hash: Some(bell.circuit_hash.clone()),
            ..Filter::default()
        })
        .unwrap();
    assert_eq!(by_hash.records.len(), 2);
    let recent = store
        .query(&Filter {
            circuit_hash: Some(bell.circuit_hash.clone()),
            since: Some(Utc::now() - Duration::days(1)),
            ..Filter::default()
        })
        .unwrap();
    assert_eq!(recent.records, vec![bell]);
    let before = store
        .query(&Filter {
            until: Some(Utc::now() - Duration::days(1)),
            ..Filter::default()
        })
        .unwrap();
    assert_eq!(before.records, vec![old]);
}

#[test]
fn concurrent_appends_keep_lines_whole() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::new(dir.path().join("runs.jsonl"));
    let r = record(ROTATIONS, 3);
    std::thread::scope(|s| {
        for _ in 0..8 {
            s.spawn(|| {
                for _ in 0..25 {
                    store.append(&r).unwrap();
                }
            });
        }
    });
    let q = store.query(&Filter::default()).unwrap();
    assert_eq!(q.records.len(), 200);
    assert_eq!(q.skipped, 0);
}

#[test]
fn io_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::new(dir.path().join("no/such/dir/runs.jsonl"));
    let err = store.append(&record(BELL, 0)).unwrap_err().to_string();
    assert!(err.contains("no/such/dir/runs.jsonl"), "{err}");
}

proptest! {
    #[test]
    fn amplitudes_survive_serialization(re in any::<f64>(), im in any::<f64>(), p in 0.0f64..=1.0) {
        prop_assume!(re.is_finite() && im.is_finite());
        let mut r = record(BELL, 0);
        r.final_states = vec![FinalState {
            bitstring: "01".into(),
            amplitude: Some(Amplitude::new(re, im)),
            probability: p,
        }];
        let back: RunRecord = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        let a = back.final_states[0].amplitude.unwrap();
        prop_assert_eq!(a.re.to_bits(), re.to_bits());
        prop_assert_eq!(a.im.to_bits(), im.to_bits());
        prop_assert_eq!(back, r);
    }
}
