//! Parse, optionally map, simulate, measure metrics, persist.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::Utc;
use qaccel_core::cqasm::{emit, parse, ParseError, Program};
use qaccel_core::gates::{bitstring, execute, sample, GateError, GateInstance, GateKind, Histogram, NoiseConfig};
use qaccel_core::mapper::{build_topology, map_circuit, to_device_order, LayoutMap, MapError, MappingReport};
use qaccel_core::metrics::{fidelity, success_probability, MetricSet};
use qaccel_core::statecore::{
    estimate_total_memory, Amplitude, MemoryParams, StateError, StateVector, MAX_QUBITS, NORM_TOLERANCE,
};
use qaccel_core::tensor_oracle::dense_simulate_gates;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use uuid::Uuid;

use crate::record::{circuit_hash, top_states, RunConfig, RunRecord};
use crate::store::{Store, StoreError};

/// Registers up to this size are checked against the dense oracle; larger
/// ones use the unmapped noiseless state-vector run as reference.
pub const ORACLE_REFERENCE_QUBITS: usize = 10;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("mapping failed: {0}")]
    Map(#[from] MapError),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl RunError {
    /// Process exit status: 1 for input, I/O and configuration problems,
    /// 2 for mapping failures, 3 for capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Map(_) => 2,
            RunError::Capacity(_) => 3,
            _ => 1,
        }
    }
}

impl From<StateError> for RunError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::Capacity { .. } | StateError::Overflow { .. } => RunError::Capacity(e.to_string()),
            other => RunError::Simulation(other.to_string()),
        }
    }
}

impl From<GateError> for RunError {
    fn from(e: GateError) -> Self {
        RunError::Simulation(e.to_string())
    }
}

/// Reads, runs and (if `store` is given) persists one cQASM file.
pub fn cli_run(path: &Path, config: &RunConfig, store: Option<&Store>) -> Result<RunRecord, RunError> {
    let started = Instant::now();
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let program = parse(&text).map_err(|source| RunError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let mut record = run_program(&program, config)?;
    record.wall_time_ns = elapsed_ns(started);
    if let Some(store) = store {
        store.append(&record)?;
    }
    Ok(record)
}

fn elapsed_ns(t: Instant) -> u64 {
    u64::try_from(t.elapsed().as_nanos()).unwrap_or(u64::MAX)
}

/// Where the executed register lives relative to the program's qubits.
struct Target {
    program: Program,
    layout: LayoutMap,
    report: Option<MappingReport>,
}

/// Instruction classes that decide how a program is simulated.
struct Split {
    /// Unitary instructions, in order.
    unitary: Vec<GateInstance>,
    /// Every measurement is terminal and every preparation acts on a fresh
    /// qubit, so one noiseless run gives the whole output distribution.
    deferrable: bool,
}

fn split(program: &Program) -> Split {
    let mut touched = vec![false; program.num_qubits()];
    let mut measured = vec![false; program.num_qubits()];
    let mut deferrable = true;
    let mut unitary = Vec::new();
    for g in program.instructions() {
        let qs = g.qubits();
        match g.kind() {
            GateKind::PrepZ => deferrable &= !touched[qs[0]],
            GateKind::Measure => measured[qs[0]] = true,
            _ => {
                deferrable &= qs.iter().all(|&q| !measured[q]);
                unitary.push(g.clone());
            }
        }
        for &q in qs {
            touched[q] = true;
        }
    }
    Split { unitary, deferrable }
}

/// Executes `program` under `config` without persisting. `wall_time_ns`
/// covers simulation and metrics only.
pub fn run_program(program: &Program, config: &RunConfig) -> Result<RunRecord, RunError> {
    let started = Instant::now();
    let noise = match config.noise_p {
        Some(p) => Some(NoiseConfig::new(p, config.seed).map_err(|e| RunError::Config(e.to_string()))?),
        None => None,
    };
    let n = program.num_qubits();
    if n > MAX_QUBITS {
        return Err(RunError::Capacity(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit limit")));
    }

    let target = match &config.topology {
        Some(spec) => {
            let topology = build_topology(spec.parse()?)?;
            if topology.nodes() > MAX_QUBITS {
                return Err(RunError::Capacity(format!(
                    "topology {spec} has {} nodes; the simulator holds at most {MAX_QUBITS}",
                    topology.nodes()
                )));
            }
            let mapped = map_circuit(program, &topology, config.placement)?;
            Target {
                program: mapped.program,
                layout: mapped.final_layout,
                report: Some(mapped.report),
            }
        }
        None => Target {
            program: program.clone(),
            layout: LayoutMap::identity(n, n)?,
            report: None,
        },
    };
    let device_qubits = target.program.num_qubits();
    let peak_state_bytes = estimate_total_memory(MemoryParams::doubles(device_qubits as u32))?;

    let logical = split(program);
    let device = split(&target.program);
    let ideal = if logical.deferrable {
        Some(ideal_state(n, &logical.unitary)?)
    } else {
        None
    };
    let ideal_device = ideal.as_deref().map(|v| to_device_order(v, &target.layout));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let outcome = match (&noise, &ideal_device) {
        (None, Some(ideal_device)) => {
            let mut state = StateVector::new(device_qubits)?;
            for g in &device.unitary {
                qaccel_core::apply_gate(&mut state, g)?;
            }
            let amplitudes = virtual_amplitudes(state.amplitudes(), &target.layout);
            let virtual_state = StateVector::from_amplitudes(amplitudes.clone())?;
            Outcome {
                probabilities: virtual_state.probabilities(),
                amplitudes: Some(amplitudes),
                counts: sample(&virtual_state, config.shots, &mut rng),
                fidelity: Some(checked_fidelity(ideal_device, state.amplitudes())?),
            }
        }
        _ => {
            // Deferral is a property of the program; SWAPs through a measured
            // qubit's node only relabel it.
            let gates = if logical.deferrable {
                &device.unitary[..]
            } else {
                target.program.instructions()
            };
            trajectories(gates, device_qubits, &target.layout, noise.as_ref(), ideal_device.as_deref(), config, &mut rng)?
        }
    };

    let mut metrics = MetricSet::for_program(&target.program);
    metrics.fidelity = outcome.fidelity;
    let success: Option<BTreeSet<String>> = match (&config.success_set, &ideal) {
        (Some(set), _) => Some(set.iter().cloned().collect()),
        (None, Some(ideal)) => Some(
            ideal
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > NORM_TOLERANCE)
                .map(|(i, _)| bitstring(i, n))
                .collect(),
        ),
        (None, None) => None,
    };
    metrics.success_probability = match success {
        Some(set) if config.shots > 0 => Some(success_probability(&outcome.counts, &set).map_err(sim_err)?),
        _ => None,
    };

    Ok(RunRecord {
        run_id: Uuid::new_v4(),
        timestamp: Utc::now(),
        circuit_hash: circuit_hash(&emit(program)),
        num_qubits: n,
        simulated_qubits: device_qubits,
        config: config.clone(),
        metrics,
        mapping: target.report,
        final_states: top_states(&outcome.probabilities, outcome.amplitudes.as_deref(), n, config.top_k),
        counts: outcome.counts,
        wall_time_ns: elapsed_ns(started),
        peak_state_bytes,
    })
}

struct Outcome {
    probabilities: Vec<f64>,
    amplitudes: Option<Vec<Amplitude>>,
    counts: Histogram,
    fidelity: Option<f64>,
}

fn sim_err(e: impl std::fmt::Display) -> RunError {
    RunError::Simulation(e.to_string())
}

fn checked_fidelity(ideal: &[Amplitude], actual: &[Amplitude]) -> Result<f64, RunError> {
    fidelity(ideal, actual).map_err(sim_err)
}

/// Noiseless output of the unmapped unitary part.
fn ideal_state(n: usize, unitary: &[GateInstance]) -> Result<Vec<Amplitude>, RunError> {
    if n <= ORACLE_REFERENCE_QUBITS {
        return dense_simulate_gates(n, unitary).map_err(sim_err);
    }
    let mut state = StateVector::new(n)?;
    for g in unitary {
        qaccel_core::apply_gate(&mut state, g)?;
    }
    Ok(state.amplitudes().to_vec())
}

/// Program-order amplitudes of a noiseless device state. Unoccupied device
/// qubits stay `|0⟩` without noise, so nothing is lost.
fn virtual_amplitudes(device: &[Amplitude], layout: &LayoutMap) -> Vec<Amplitude> {
    (0..1usize << layout.num_virtual())
        .map(|x| device[layout.physical_index(x)])
        .collect()
}

/// Program-order marginal distribution of a device state.
fn virtual_probabilities(device: &[Amplitude], layout: &LayoutMap) -> Vec<f64> {
    let mut out = vec![0.0; 1usize << layout.num_virtual()];
    let occupied: Vec<(usize, usize)> = (0..layout.num_virtual()).map(|v| (v, layout.physical(v))).collect();
    for (d, a) in device.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let x = occupied.iter().fold(0, |x, &(v, phys)| x | (d >> phys & 1) << v);
        out[x] += p;
    }
    out
}

/// One state-vector trajectory per shot; each contributes one sample.
fn trajectories(
    gates: &[GateInstance],
    device_qubits: usize,
    layout: &LayoutMap,
    noise: Option<&NoiseConfig>,
    ideal_device: Option<&[Amplitude]>,
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome, RunError> {
    let n = layout.num_virtual();
    let mut mean = vec![0.0; 1usize << n];
    let mut counts = Histogram::new();
    let mut fidelity_sum = 0.0;
    let mut state = StateVector::new(device_qubits)?;
    for _ in 0..config.shots {
        state.reset();
        execute(&mut state, gates, noise, rng)?;
        if let Some(ideal) = ideal_device {
            fidelity_sum += checked_fidelity(ideal, state.amplitudes())?;
        }
        let probs = virtual_probabilities(state.amplitudes(), layout);
        for (m, p) in mean.iter_mut().zip(&probs) {
            *m += p;
        }
        let drawn = WeightedIndex::new(&probs).map_err(sim_err)?.sample(rng);
        *counts.entry(bitstring(drawn, n)).or_insert(0) += 1;
    }
    let shots = config.shots as f64;
    if config.shots > 0 {
        mean.iter_mut().for_each(|m| *m /= shots);
    }
    Ok(Outcome {
        probabilities: mean,
        amplitudes: None,
        counts,
        fidelity: ideal_device.filter(|_| config.shots > 0).map(|_| fidelity_sum / shots),
    })
}
