use qaccel_core::gates::GateKind;
use qaccel_harness::bench::{bench_depth_scaling, bench_gates, bench_qubit_scaling, SkipMode};

#[test]
fn gate_table_has_one_positive_row_per_gate() {
    let r = bench_gates();
    let rows = &r.series[0].points;
    let labels: Vec<&str> = rows.iter().map(|p| p.label.as_str()).collect();
    let expected: Vec<&str> = GateKind::TIMED.iter().map(|k| k.mnemonic()).collect();
    assert_eq!(labels, expected);
    assert!(rows.iter().all(|p| p.time_ns > 0.0));
}

#[test]
fn gate_table_is_stable_between_invocations() {
    let a = bench_gates();
    let b = bench_gates();
    for (p, q) in a.series[0].points.iter().zip(&b.series[0].points) {
        let ratio = p.time_ns / q.time_ns;
        assert!((1.0 / 1.5..=1.5).contains(&ratio), "{}: {} vs {}", p.label, p.time_ns, q.time_ns);
    }
}

#[test]
fn small_scaling_runs_report_fits() {
    let r = bench_qubit_scaling(2, 8, SkipMode::Both).unwrap();
    assert_eq!(r.series.len(), 2);
    assert!(r.series.iter().all(|s| s.points.len() == 7 && s.fit.is_some()));
    assert_eq!(r.ratios("skip_on", "skip_off").len(), 7);

    let d = bench_depth_scaling(&[50, 100, 150], &[GateKind::X, GateKind::Cnot]).unwrap();
    let slopes: Vec<f64> = d.series.iter().map(|s| s.fit.unwrap().slope).collect();
    assert_eq!(slopes.len(), 2);
    assert!(bench_depth_scaling(&[10], &[GateKind::Toffoli]).is_err());
}
