//! Grover-based read alignment.
//!
//! The reference is cut into every window of the read's length. Each window
//! is loaded into a data register, entangled with an index register holding
//! its position. XOR-ing the read into the data register turns an exact
//! match into the all-zero pattern, which Grover iterations then amplify.
//!
//! Register layout: index qubits `0..k`, data qubits `k..k+d` (data qubit
//! `k + j` holds bit `j` of a slice), then one ancilla that is `|0⟩` before
//! and after every multi-controlled gate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cqasm::Program;
use crate::gates::{apply_gate, GateError, GateInstance};
use crate::statecore::{Amplitude, StateError, StateVector, MAX_QUBITS};

/// Kernel names marking the four stages of the generated program.
pub const STAGES: [&str; 4] = ["superpose", "load_slices", "hamming", "grover"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenomicsError {
    #[error("read is empty")]
    EmptyRead,
    #[error("read of length {read} is longer than the reference ({reference})")]
    ReadTooLong { read: usize, reference: usize },
    #[error("symbol {0:?} is neither binary (0/1) nor a nucleotide (A/C/G/T)")]
    InvalidSymbol(char),
    #[error("reference and read use different alphabets")]
    MixedAlphabet,
    #[error("circuit needs {needed} qubits, the simulator holds at most {max}")]
    QubitBudget { needed: usize, max: usize },
    #[error("threshold {threshold} exceeds the {bits} data bits")]
    Threshold { threshold: usize, bits: usize },
    #[error("not enough spare qubits for a {controls}-control gate")]
    Ancilla { controls: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    /// `0`/`1`, one bit per symbol.
    Binary,
    /// `C=00, A=01, G=10, T=11`, two bits per base (first bit on the lower qubit).
    Nucleotide,
}

impl Alphabet {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Alphabet::Binary => 1,
            Alphabet::Nucleotide => 2,
        }
    }

    fn detect(text: &str) -> Result<Self, GenomicsError> {
        let mut chars = text.chars();
        match chars.next() {
            Some('0' | '1') => Ok(Alphabet::Binary),
            Some(c) if "ACGTacgt".contains(c) => Ok(Alphabet::Nucleotide),
            Some(c) => Err(GenomicsError::InvalidSymbol(c)),
            None => Err(GenomicsError::EmptyRead),
        }
    }

    /// Symbols as bits, `bits_per_symbol` per symbol.
    pub fn encode(self, text: &str) -> Result<Vec<bool>, GenomicsError> {
        let mut bits = Vec::with_capacity(text.len() * self.bits_per_symbol());
        for c in text.chars() {
            match (self, c.to_ascii_uppercase()) {
                (Alphabet::Binary, '0') => bits.push(false),
                (Alphabet::Binary, '1') => bits.push(true),
                (Alphabet::Nucleotide, 'C') => bits.extend([false, false]),
                (Alphabet::Nucleotide, 'A') => bits.extend([false, true]),
                (Alphabet::Nucleotide, 'G') => bits.extend([true, false]),
                (Alphabet::Nucleotide, 'T') => bits.extend([true, true]),
                (Alphabet::Binary, 'A' | 'C' | 'G' | 'T') | (Alphabet::Nucleotide, '0' | '1') => {
                    return Err(GenomicsError::MixedAlphabet)
                }
                _ => return Err(GenomicsError::InvalidSymbol(c)),
            }
        }
        Ok(bits)
    }
}

/// Reference windows tagged by position, plus how many index slots the
/// index register spans. Slots past the last window are sentinels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedReference {
    pub slices: Vec<Vec<bool>>,
    pub index_slots: usize,
}

impl EncodedReference {
    pub fn index_qubits(&self) -> usize {
        self.index_slots.trailing_zeros() as usize
    }

    pub fn sentinels(&self) -> usize {
        self.index_slots - self.slices.len()
    }
}

/// Index slots for `windows` real windows: a power of two, and at least 4
/// once there are two windows (with only two slots Grover diffusion leaves
/// both index marginals equal).
pub fn index_slots(windows: usize) -> usize {
    match windows {
        0 | 1 => 1,
        n => n.next_power_of_two().max(4),
    }
}

/// Windows of `read_len` symbols at every position `0..=R−r`.
pub fn encode_reference(reference: &str, read_len: usize, alphabet: Alphabet) -> Result<EncodedReference, GenomicsError> {
    if read_len == 0 {
        return Err(GenomicsError::EmptyRead);
    }
    let symbols = reference.chars().count();
    if read_len > symbols {
        return Err(GenomicsError::ReadTooLong {
            read: read_len,
            reference: symbols,
        });
    }
    let bits = alphabet.encode(reference)?;
    let w = alphabet.bits_per_symbol();
    let slices: Vec<Vec<bool>> = (0..=symbols - read_len)
        .map(|pos| bits[pos * w..(pos + read_len) * w].to_vec())
        .collect();
    Ok(EncodedReference {
        index_slots: index_slots(slices.len()),
        slices,
    })
}

/// Which register the inversion-about-mean acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diffusion {
    /// Index and data registers together.
    #[default]
    Joint,
    /// Index register only.
    Index,
}

impl FromStr for Diffusion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "joint" => Ok(Diffusion::Joint),
            "index" => Ok(Diffusion::Index),
            _ => Err(format!("unknown diffusion mode {s:?} (expected joint or index)")),
        }
    }
}

/// Which data patterns the Grover oracle phase-flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// Only the all-zero pattern (an exact match).
    #[default]
    Exact,
    /// Every pattern of Hamming weight at most the given value.
    Threshold(usize),
    /// Smallest threshold whose run leaves the index marginal non-uniform.
    Auto,
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleMode::Exact => write!(f, "exact"),
            OracleMode::Threshold(t) => write!(f, "{t}"),
            OracleMode::Auto => write!(f, "auto"),
        }
    }
}

impl FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(OracleMode::Exact),
            "auto" => Ok(OracleMode::Auto),
            t => t
                .parse()
                .map(OracleMode::Threshold)
                .map_err(|_| format!("bad oracle mode {s:?} (expected exact, auto or a number)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentInstance {
    alphabet: Alphabet,
    reference: String,
    read: String,
    read_bits: Vec<bool>,
    encoded: EncodedReference,
    pub iterations: usize,
    pub diffusion: Diffusion,
    pub oracle: OracleMode,
}

impl AlignmentInstance {
    /// The alphabet is inferred from the read; both strings must share it.
    pub fn new(reference: &str, read: &str) -> Result<Self, GenomicsError> {
        let alphabet = Alphabet::detect(read)?;
        let read_bits = alphabet.encode(read)?;
        let encoded = encode_reference(reference, read.chars().count(), alphabet)?;
        let instance = Self {
            alphabet,
            reference: reference.to_string(),
            read: read.to_string(),
            read_bits,
            encoded,
            iterations: 1,
            diffusion: Diffusion::Joint,
            oracle: OracleMode::Exact,
        };
        let needed = instance.total_qubits();
        if needed > MAX_QUBITS {
            return Err(GenomicsError::QubitBudget { needed, max: MAX_QUBITS });
        }
        Ok(instance)
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_diffusion(mut self, diffusion: Diffusion) -> Self {
        self.diffusion = diffusion;
        self
    }

    pub fn with_oracle(mut self, oracle: OracleMode) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }

    pub fn read(&self) -> &str {
        &self.read
    }

    pub fn encoded(&self) -> &EncodedReference {
        &self.encoded
    }

    /// Real window count, `R − r + 1`.
    pub fn positions(&self) -> usize {
        self.encoded.slices.len()
    }

    pub fn index_qubits(&self) -> usize {
        self.encoded.index_qubits()
    }

    pub fn data_qubits(&self) -> usize {
        self.read_bits.len()
    }

    pub fn ancilla(&self) -> usize {
        self.index_qubits() + self.data_qubits()
    }

    pub fn total_qubits(&self) -> usize {
        self.ancilla() + 1
    }

    /// Symbol mismatches between the read and the window at `position`.
    pub fn hamming_distance(&self, position: usize) -> usize {
        let w = self.alphabet.bits_per_symbol();
        self.encoded.slices[position]
            .chunks(w)
            .zip(self.read_bits.chunks(w))
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Bit-level Hamming distance; this is what the data register holds.
    pub fn bit_distance(&self, position: usize) -> usize {
        self.encoded.slices[position]
            .iter()
            .zip(&self.read_bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Stored data for every index slot; sentinels hold the read's complement.
    fn slot_data(&self) -> Vec<Vec<bool>> {
        let sentinel: Vec<bool> = self.read_bits.iter().map(|b| !b).collect();
        (0..self.encoded.index_slots)
            .map(|i| self.encoded.slices.get(i).cloned().unwrap_or_else(|| sentinel.clone()))
            .collect()
    }
}

/// Emits gates into a flat list, tracking the register size for ancilla
/// selection.
struct Emitter {
    gates: Vec<GateInstance>,
    qubits: usize,
    ancilla: usize,
}

impl Emitter {
    fn toffoli_chain(&mut self, controls: &[usize], target: usize, dirty: &[usize]) {
        // Dirty-ancilla V-chain: 4(m − 2) Toffolis, ancillas restored.
        let m = controls.len();
        let c = controls;
        let a = dirty;
        for _ in 0..2 {
            self.gates.push(GateInstance::toffoli(c[m - 1], a[m - 3], target));
            for i in (2..m - 1).rev() {
                self.gates.push(GateInstance::toffoli(c[i], a[i - 2], a[i - 1]));
            }
            self.gates.push(GateInstance::toffoli(c[0], c[1], a[0]));
            for i in 2..m - 1 {
                self.gates.push(GateInstance::toffoli(c[i], a[i - 2], a[i - 1]));
            }
        }
    }

    /// X on `target` controlled on all `controls` being 1. `clean` is a
    /// qubit known to be `|0⟩` that may be borrowed.
    fn mcx(&mut self, controls: &[usize], target: usize, clean: Option<usize>) -> Result<(), GenomicsError> {
        match *controls {
            [] => self.gates.push(GateInstance::x(target)),
            [c] => self.gates.push(GateInstance::cnot(c, target)),
            [c1, c2] => self.gates.push(GateInstance::toffoli(c1, c2, target)),
            _ => {
                let m = controls.len();
                let dirty: Vec<usize> = (0..self.qubits)
                    .filter(|q| !controls.contains(q) && *q != target && Some(*q) != clean)
                    .collect();
                if dirty.len() >= m - 2 {
                    self.toffoli_chain(controls, target, &dirty[..m - 2]);
                    return Ok(());
                }
                let anc = clean.ok_or(GenomicsError::Ancilla { controls: m })?;
                let (head, tail) = controls.split_at(m.div_ceil(2));
                let mut tail = tail.to_vec();
                tail.push(anc);
                self.mcx(head, anc, None)?;
                self.mcx(&tail, target, None)?;
                self.mcx(head, anc, None)?;
            }
        }
        Ok(())
    }

    /// Flips the sign of the all-ones pattern on `qubits`.
    fn mcz(&mut self, qubits: &[usize]) -> Result<(), GenomicsError> {
        match *qubits {
            [] => {}
            [q] => self.gates.push(GateInstance::z(q)),
            [a, b] => self.gates.push(GateInstance::cz(a, b)),
            _ => {
                let (&target, controls) = qubits.split_last().unwrap_or((&0, &[]));
                self.gates.push(GateInstance::h(target));
                self.mcx(controls, target, Some(self.ancilla))?;
                self.gates.push(GateInstance::h(target));
            }
        }
        Ok(())
    }

    fn xs(&mut self, qubits: impl IntoIterator<Item = usize>) {
        self.gates.extend(qubits.into_iter().map(GateInstance::x));
    }

    /// Flips the sign of `pattern` on `qubits`.
    fn flip_pattern(&mut self, qubits: &[usize], pattern: &[bool]) -> Result<(), GenomicsError> {
        let zeros: Vec<usize> = qubits.iter().zip(pattern).filter(|(_, b)| !**b).map(|(q, _)| *q).collect();
        self.xs(zeros.iter().copied());
        self.mcz(qubits)?;
        self.xs(zeros);
        Ok(())
    }

    /// `2|s⟩⟨s| − I` on `qubits`, with `|s⟩` their uniform superposition.
    fn diffusion(&mut self, qubits: &[usize]) -> Result<(), GenomicsError> {
        if qubits.is_empty() {
            return Ok(());
        }
        self.gates.extend(qubits.iter().map(|&q| GateInstance::h(q)));
        self.flip_pattern(qubits, &vec![false; qubits.len()])?;
        self.gates.extend(qubits.iter().map(|&q| GateInstance::h(q)));
        // Z X Z X = −I turns I − 2|s⟩⟨s| into 2|s⟩⟨s| − I.
        let q = qubits[0];
        self.gates.extend([GateInstance::z(q), GateInstance::x(q), GateInstance::z(q), GateInstance::x(q)]);
        Ok(())
    }
}

/// Data patterns of Hamming weight at most `threshold`, in ascending order.
fn patterns_within(bits: usize, threshold: usize) -> Vec<Vec<bool>> {
    (0..1usize << bits)
        .filter(|x| (x.count_ones() as usize) <= threshold)
        .map(|x| (0..bits).map(|j| x >> j & 1 == 1).collect())
        .collect()
}

fn build_with_threshold(a: &AlignmentInstance, threshold: usize) -> Result<Program, GenomicsError> {
    let k = a.index_qubits();
    let d = a.data_qubits();
    if threshold > d {
        return Err(GenomicsError::Threshold { threshold, bits: d });
    }
    let index: Vec<usize> = (0..k).collect();
    let data: Vec<usize> = (k..k + d).collect();
    let mut e = Emitter {
        gates: Vec::new(),
        qubits: a.total_qubits(),
        ancilla: a.ancilla(),
    };
    let mut program = Program::new(a.total_qubits());

    program.begin_kernel(STAGES[0]);
    program.extend(index.iter().map(|&q| GateInstance::h(q)))?;

    program.begin_kernel(STAGES[1]);
    for (slot, bits) in a.slot_data().iter().enumerate() {
        let zeros: Vec<usize> = index.iter().copied().filter(|q| slot >> q & 1 == 0).collect();
        e.xs(zeros.iter().copied());
        for (j, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            e.mcx(&index, data[j], Some(a.ancilla()))?;
        }
        e.xs(zeros);
    }
    program.extend(e.gates.drain(..))?;

    program.begin_kernel(STAGES[2]);
    let read_ones = data.iter().zip(&a.read_bits).filter(|(_, b)| **b).map(|(q, _)| *q);
    program.extend(read_ones.map(GateInstance::x))?;

    program.begin_kernel(STAGES[3]);
    let marked = patterns_within(d, threshold);
    let diffused: Vec<usize> = match a.diffusion {
        Diffusion::Joint => index.iter().chain(&data).copied().collect(),
        Diffusion::Index => index.clone(),
    };
    for _ in 0..a.iterations {
        for pattern in &marked {
            e.flip_pattern(&data, pattern)?;
        }
        e.diffusion(&diffused)?;
    }
    program.extend(e.gates.drain(..))?;
    Ok(program)
}

/// The four-stage alignment program; each stage is a kernel named after
/// [`STAGES`]. `OracleMode::Auto` builds the exact-match oracle.
pub fn build_alignment_circuit(a: &AlignmentInstance) -> Result<Program, GenomicsError> {
    let threshold = match a.oracle {
        OracleMode::Exact | OracleMode::Auto => 0,
        OracleMode::Threshold(t) => t,
    };
    build_with_threshold(a, threshold)
}

/// Runs `program` on a fresh register.
pub fn simulate(program: &Program) -> Result<StateVector, GenomicsError> {
    let mut state = StateVector::new(program.num_qubits())?;
    for g in program.instructions() {
        apply_gate(&mut state, g)?;
    }
    Ok(state)
}

/// Probability of each index slot, summed over data and ancilla.
pub fn index_marginals(amplitudes: &[Amplitude], index_qubits: usize) -> Vec<f64> {
    let mask = (1usize << index_qubits) - 1;
    let mut marginals = vec![0.0; 1 << index_qubits];
    for (i, a) in amplitudes.iter().enumerate() {
        marginals[i & mask] += a.norm_sqr();
    }
    marginals
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedPosition {
    pub position: usize,
    pub probability: f64,
    pub hamming_distance: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// Real positions, most probable first; ties by ascending position.
    pub ranking: Vec<RankedPosition>,
    /// Marginal of every index slot, sentinels included.
    pub index_marginals: Vec<f64>,
    /// Probability left on sentinel slots.
    pub sentinel_mass: f64,
    /// Oracle threshold actually used.
    pub threshold: usize,
    pub program: Program,
    pub amplitudes: Vec<Amplitude>,
    /// Sampled index readouts: position → count (sentinels included).
    pub counts: BTreeMap<usize, u64>,
}

impl AlignmentResult {
    pub fn best(&self) -> Option<&RankedPosition> {
        self.ranking.first()
    }
}

fn is_uniform(values: &[f64]) -> bool {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max - min <= 1e-12
}

/// Builds, simulates and ranks. With `OracleMode::Auto` the threshold
/// climbs from 0 until the real positions' marginals differ.
pub fn align<R: Rng + ?Sized>(a: &AlignmentInstance, shots: u64, rng: &mut R) -> Result<AlignmentResult, GenomicsError> {
    let thresholds: Vec<usize> = match a.oracle {
        OracleMode::Exact => vec![0],
        OracleMode::Threshold(t) => vec![t],
        OracleMode::Auto => (0..=a.data_qubits()).collect(),
    };
    let positions = a.positions();
    let mut chosen = None;
    for &t in &thresholds {
        let program = build_with_threshold(a, t)?;
        let state = simulate(&program)?;
        let marginals = index_marginals(state.amplitudes(), a.index_qubits());
        let done = !is_uniform(&marginals[..positions]);
        chosen = Some((t, program, state, marginals));
        if done {
            break;
        }
    }
    let (threshold, program, state, marginals) = chosen.unwrap_or_else(|| unreachable!("threshold list is never empty"));

    let mut ranking: Vec<RankedPosition> = (0..positions)
        .map(|position| RankedPosition {
            position,
            probability: marginals[position],
            hamming_distance: a.hamming_distance(position),
        })
        .collect();
    ranking.sort_by(|x, y| y.probability.total_cmp(&x.probability).then(x.position.cmp(&y.position)));

    let mut counts = BTreeMap::new();
    if shots > 0 {
        let dist = WeightedIndex::new(&marginals).map_err(|_| GateError::DegenerateState)?;
        for _ in 0..shots {
            *counts.entry(dist.sample(rng)).or_insert(0) += 1;
        }
    }

    Ok(AlignmentResult {
        ranking,
        sentinel_mass: marginals[positions..].iter().sum(),
        index_marginals: marginals,
        threshold,
        program,
        amplitudes: state.amplitudes().to_vec(),
        counts,
    })
}
