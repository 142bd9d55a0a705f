//! Evaluation quantities: gate counts, depth, fidelity, probability of
//! success, Quantum Volume and the Amdahl / Gustafson-Barsis speedup laws.
//!
//! Everything is kept at full double precision; round only for display.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cqasm::Program;
use crate::gates::{GateKind, Histogram};
use crate::mapper::schedule_asap;
use crate::statecore::{Amplitude, NORM_TOLERANCE};

/// Tolerance on `Σ pᵢ = 1` for multi-component Amdahl.
pub const FRACTION_TOLERANCE: f64 = 1e-9;

/// Largest depth whose Quantum Volume fits in a `u64`.
pub const MAX_QV_DEPTH: usize = 62;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("states have different dimensions ({0} vs {1})")]
    Dimension(usize, usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("histogram holds no shots")]
    EmptyHistogram,
    #[error("quantum volume 2^{0} overflows")]
    DepthOverflow(usize),
    #[error("{0}")]
    OutOfRange(String),
}

/// Instruction counts keyed by mnemonic. Measurement and preparation are
/// tallied apart from unitary gates.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub per_kind: BTreeMap<String, usize>,
    pub total: usize,
    pub unitary: usize,
    pub measurements: usize,
    pub preparations: usize,
}

pub fn gate_count(program: &Program) -> GateCounts {
    let mut counts = GateCounts::default();
    for g in program.instructions() {
        *counts.per_kind.entry(g.kind().mnemonic().to_string()).or_insert(0) += 1;
        counts.total += 1;
        match g.kind() {
            GateKind::Measure => counts.measurements += 1,
            GateKind::PrepZ => counts.preparations += 1,
            _ => counts.unitary += 1,
        }
    }
    counts
}

fn norm_sqr(state: &[Amplitude]) -> f64 {
    state.iter().map(|a| a.norm_sqr()).sum()
}

/// `|⟨ideal|actual⟩|²` for normalized states of equal dimension.
pub fn fidelity(ideal: &[Amplitude], actual: &[Amplitude]) -> Result<f64, MetricError> {
    if ideal.len() != actual.len() {
        return Err(MetricError::Dimension(ideal.len(), actual.len()));
    }
    for s in [ideal, actual] {
        let n = norm_sqr(s);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(MetricError::NotNormalized(n));
        }
    }
    let overlap: Amplitude = ideal.iter().zip(actual).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.norm_sqr().min(1.0))
}

/// Fraction of shots that landed in `correct`.
pub fn success_probability(histogram: &Histogram, correct: &BTreeSet<String>) -> Result<f64, MetricError> {
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return Err(MetricError::EmptyHistogram);
    }
    let hits: u64 = histogram
        .iter()
        .filter(|(k, _)| correct.contains(*k))
        .map(|(_, n)| n)
        .sum();
    Ok(hits as f64 / total as f64)
}

/// `QV = 2^D`.
pub fn quantum_volume(depth: usize) -> Result<u64, MetricError> {
    if depth > MAX_QV_DEPTH {
        return Err(MetricError::DepthOverflow(depth));
    }
    Ok(1u64 << depth)
}

fn check_fraction(name: &str, x: f64) -> Result<(), MetricError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(MetricError::OutOfRange(format!("{name} = {x} outside [0, 1]")))
    }
}

fn check_speedup(s: f64) -> Result<(), MetricError> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(MetricError::OutOfRange(format!("speedup factor {s} must be positive and finite")))
    }
}

/// Amdahl latency speedup when a fraction `p` of the work runs `s` times
/// faster: `1 / ((1 − p) + p / s)`.
pub fn amdahl(p: f64, s: f64) -> Result<f64, MetricError> {
    check_fraction("p", p)?;
    check_speedup(s)?;
    Ok(1.0 / ((1.0 - p) + p / s))
}

/// Amdahl over components `(pᵢ, sᵢ)` with `Σ pᵢ = 1`: `1 / Σ (pᵢ / sᵢ)`.
pub fn amdahl_components(components: &[(f64, f64)]) -> Result<f64, MetricError> {
    let mut total = 0.0;
    let mut denominator = 0.0;
    for &(p, s) in components {
        check_fraction("p", p)?;
        check_speedup(s)?;
        total += p;
        denominator += p / s;
    }
    if (total - 1.0).abs() > FRACTION_TOLERANCE {
        return Err(MetricError::OutOfRange(format!("component fractions sum to {total}, not 1")));
    }
    Ok(1.0 / denominator)
}

/// Gustafson-Barsis scaled speedup on `processors` with serial fraction
/// `serial`: `P − serial · (P − 1)`, always within `[1, P]`.
pub fn gustafson(processors: f64, serial: f64) -> Result<f64, MetricError> {
    if !(processors >= 1.0 && processors.is_finite()) {
        return Err(MetricError::OutOfRange(format!("processor count {processors} below 1")));
    }
    check_fraction("serial", serial)?;
    Ok(processors - serial * (processors - 1.0))
}

/// Every metric for one run. `fidelity` is absent when no ideal state is
/// defined (mid-circuit measurement); `quantum_volume` is absent past
/// [`MAX_QV_DEPTH`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub total_gates: usize,
    pub gate_counts: GateCounts,
    pub depth: usize,
    pub fidelity: Option<f64>,
    pub success_probability: Option<f64>,
    pub quantum_volume: Option<u64>,
}

impl MetricSet {
    /// Structural metrics of `program`; fidelity and success are filled in
    /// by whoever ran it.
    pub fn for_program(program: &Program) -> Self {
        let depth = schedule_asap(program).depth();
        let gate_counts = gate_count(program);
        Self {
            total_gates: gate_counts.total,
            gate_counts,
            depth,
            fidelity: None,
            success_probability: None,
            quantum_volume: quantum_volume(depth).ok(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cqasm::parse;
    use crate::gates::GateInstance;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn bell_counts() {
        let p = parse("version 1.0\nqubits 2\nh q[0]\ncnot q[0], q[1]\nmeasure q[0]").unwrap();
        let counts = gate_count(&p);
        assert_eq!(counts.per_kind["h"], 1);
        assert_eq!(counts.per_kind["cnot"], 1);
        assert_eq!(counts.per_kind["measure"], 1);
        assert_eq!(counts.unitary, 2);
        assert_eq!(counts.total, 3);

        let m = MetricSet::for_program(&p);
        assert_eq!(m.depth, 3);
        assert_eq!(m.quantum_volume, Some(8));
    }

    #[test]
    fn empty_and_repeated_counts() {
        assert_eq!(gate_count(&Program::new(1)), GateCounts::default());
        let mut p = Program::new(1);
        p.extend(vec![GateInstance::x(0); 10]).unwrap();
        let counts = gate_count(&p);
        assert_eq!(counts.per_kind.len(), 1);
        assert_eq!(counts.per_kind["x"], 10);
    }

    #[test]
    fn fidelity_examples() {
        let zero = [c(1.0), c(0.0)];
        let one = [c(0.0), c(1.0)];
        let plus = [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)];
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(fidelity(&zero, &[c(1.0)]), Err(MetricError::Dimension(2, 1))));
        assert!(matches!(fidelity(&zero, &[c(1.0), c(1.0)]), Err(MetricError::NotNormalized(_))));
    }

    #[test]
    fn success_examples() {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let h: Histogram = [("00".to_string(), 1000)].into();
        assert_eq!(success_probability(&h, &set(&["00"])).unwrap(), 1.0);
        let bell: Histogram = [("00".to_string(), 507), ("11".to_string(), 493)].into();
        assert_eq!(success_probability(&bell, &set(&["00", "11"])).unwrap(), 1.0);
        let uniform: Histogram = ["00", "01", "10", "11"].iter().map(|k| (k.to_string(), 250)).collect();
        assert_eq!(success_probability(&uniform, &set(&["10"])).unwrap(), 0.25);
        assert_eq!(
            success_probability(&Histogram::new(), &set(&["0"])),
            Err(MetricError::EmptyHistogram)
        );
    }

    #[test]
    fn quantum_volume_examples() {
        assert_eq!(quantum_volume(0).unwrap(), 1);
        assert_eq!(quantum_volume(5).unwrap(), 32);
        assert_eq!(quantum_volume(62).unwrap(), 1 << 62);
        assert_eq!(quantum_volume(63), Err(MetricError::DepthOverflow(63)));
    }

    #[test]
    fn amdahl_worked_values() {
        let single = amdahl(0.3, 2.0).unwrap();
        assert!((single - 1.0 / 0.85).abs() < 1e-12);
        assert_eq!(format!("{single:.2}"), "1.18");
        let multi = amdahl_components(&[(0.11, 1.0), (0.18, 5.0), (0.23, 20.0), (0.48, 1.6)]).unwrap();
        assert!((multi - 1.0 / 0.4575).abs() < 1e-12);
        assert_eq!(format!("{multi:.2}"), "2.19");
        assert_eq!(amdahl(0.0, 7.0).unwrap(), 1.0);
    }

    #[test]
    fn amdahl_rejects_bad_inputs() {
        assert!(amdahl(1.5, 2.0).is_err());
        assert!(amdahl(0.5, 0.0).is_err());
        assert!(amdahl_components(&[(0.5, 2.0)]).is_err());
        assert!(amdahl_components(&[(0.5, 2.0), (0.5, -1.0)]).is_err());
    }

    #[test]
    fn gustafson_examples() {
        assert_eq!(gustafson(1.0, 0.7).unwrap(), 1.0);
        assert_eq!(gustafson(64.0, 0.0).unwrap(), 64.0);
        assert_eq!(gustafson(64.0, 1.0).unwrap(), 1.0);
        assert!(gustafson(0.5, 0.1).is_err());
        assert!(gustafson(4.0, 1.1).is_err());
    }
}
