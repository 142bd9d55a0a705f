//! Gates as basis-state mapping functions.
//!
//! No gate matrix is ever materialized. Each gate is compiled into a
//! [`Kernel`] that, for one input basis state, names the one or two output
//! basis states it feeds and the coefficient for each. Applying a gate sweeps
//! the live buffer once, accumulating into the idle buffer.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::statecore::{Amplitude, StateVector, ZERO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("qubit {qubit} out of range for a {qubits}-qubit register")]
    OperandOutOfRange { qubit: usize, qubits: usize },
    #[error("{kind} takes {expected} operand(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} operands must be distinct, got {qubits:?}")]
    DuplicateOperand { kind: GateKind, qubits: Vec<usize> },
    #[error("{0} requires a rotation angle")]
    MissingAngle(GateKind),
    #[error("{0} does not take an angle")]
    UnexpectedAngle(GateKind),
    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),
    #[error("{0} is not unitary and needs a random source")]
    NonUnitary(GateKind),
    #[error("depolarizing probability {0} outside [0, 1]")]
    InvalidNoise(f64),
    #[error("state has zero total probability")]
    DegenerateState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    Rx,
    Ry,
    Rz,
    Cnot,
    Cphase,
    Toffoli,
    Swap,
    PrepZ,
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cnot,
        GateKind::Cphase,
        GateKind::Toffoli,
        GateKind::Swap,
        GateKind::PrepZ,
        GateKind::Measure,
    ];

    /// Unitary gates in the order of the per-gate timing table.
    pub const TIMED: [GateKind; 10] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cnot,
        GateKind::Cphase,
        GateKind::Toffoli,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cphase | GateKind::Swap => 2,
            GateKind::Toffoli => 3,
            _ => 1,
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::PrepZ | GateKind::Measure)
    }

    /// Lowercase assembly mnemonic.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cnot => "cnot",
            GateKind::Cphase => "cz",
            GateKind::Toffoli => "toffoli",
            GateKind::Swap => "swap",
            GateKind::PrepZ => "prep_z",
            GateKind::Measure => "measure",
        }
    }

    /// Case-insensitive mnemonic lookup.
    pub fn from_mnemonic(text: &str) -> Option<Self> {
        let lower = text.to_ascii_lowercase();
        GateKind::ALL.into_iter().find(|k| k.mnemonic() == lower)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// One gate application: kind, operands (controls before target) and an
/// optional rotation angle in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    kind: GateKind,
    qubits: Vec<usize>,
    angle: Option<f64>,
}

impl GateInstance {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<f64>) -> Result<Self, GateError> {
        if qubits.len() != kind.arity() {
            return Err(GateError::Arity {
                kind,
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(GateError::DuplicateOperand { kind, qubits });
            }
        }
        match (kind.takes_angle(), angle) {
            (true, None) => return Err(GateError::MissingAngle(kind)),
            (false, Some(_)) => return Err(GateError::UnexpectedAngle(kind)),
            (true, Some(a)) if !a.is_finite() => return Err(GateError::NonFiniteAngle(a)),
            _ => {}
        }
        Ok(Self { kind, qubits, angle })
    }

    fn fixed(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self::new(kind, qubits, None).expect("operands must be distinct")
    }

    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::fixed(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::fixed(GateKind::Z, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, vec![q])
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Rx, vec![q], Some(theta)).expect("finite angle")
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Ry, vec![q], Some(theta)).expect("finite angle")
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Rz, vec![q], Some(theta)).expect("finite angle")
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::Cnot, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::fixed(GateKind::Cphase, vec![a, b])
    }
    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Self::fixed(GateKind::Toffoli, vec![c1, c2, target])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::fixed(GateKind::Swap, vec![a, b])
    }
    pub fn prep_z(q: usize) -> Self {
        Self::fixed(GateKind::PrepZ, vec![q])
    }
    pub fn measure(q: usize) -> Self {
        Self::fixed(GateKind::Measure, vec![q])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    /// Same gate with every operand passed through `f`, which must be injective.
    pub fn remapped(&self, f: impl Fn(usize) -> usize) -> Self {
        Self {
            kind: self.kind,
            qubits: self.qubits.iter().map(|&q| f(q)).collect(),
            angle: self.angle,
        }
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits.iter().copied().max().unwrap_or(0)
    }

    pub fn check_range(&self, qubits: usize) -> Result<(), GateError> {
        match self.qubits.iter().find(|&&q| q >= qubits) {
            Some(&qubit) => Err(GateError::OperandOutOfRange { qubit, qubits }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for GateInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for (i, q) in self.qubits.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}q[{q}]")?;
        }
        if let Some(a) = self.angle {
            // Shortest representation that parses back to the same f64.
            write!(f, ", {a:?}")?;
        }
        Ok(())
    }
}

/// 2×2 matrix, `m[row][col]`, acting on one target bit.
type Mat2 = [[Amplitude; 2]; 2];

fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

fn single_qubit_matrix(kind: GateKind, angle: f64) -> Mat2 {
    let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    match kind {
        GateKind::X => [[ZERO, c(1.0, 0.0)], [c(1.0, 0.0), ZERO]],
        GateKind::Y => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
        GateKind::Z => [[c(1.0, 0.0), ZERO], [ZERO, c(-1.0, 0.0)]],
        GateKind::H => [
            [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
        ],
        GateKind::Rx => [[c(ch, 0.0), c(0.0, -sh)], [c(0.0, -sh), c(ch, 0.0)]],
        GateKind::Ry => [[c(ch, 0.0), c(-sh, 0.0)], [c(sh, 0.0), c(ch, 0.0)]],
        GateKind::Rz => [[c(ch, -sh), ZERO], [ZERO, c(ch, sh)]],
        other => unreachable!("{other} is not a single-qubit unitary"),
    }
}

/// How a gate maps one input basis state onto the output buffer.
#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// Apply `m` to the `target` bit of states whose `controls` bits are all set;
    /// pass every other state through unchanged.
    Target {
        controls: usize,
        target: usize,
        m: Mat2,
    },
    /// Multiply states whose `mask` bits are all set by `phase`.
    Phase { mask: usize, phase: Amplitude },
    /// Exchange the values of bits `a` and `b`.
    Swap { a: usize, b: usize },
}

impl Kernel {
    fn compile(gate: &GateInstance) -> Result<Self, GateError> {
        let bit = |i: usize| 1usize << gate.qubits[i];
        let angle = gate.angle.unwrap_or(0.0);
        Ok(match gate.kind {
            GateKind::Cnot => Kernel::Target {
                controls: bit(0),
                target: bit(1),
                m: single_qubit_matrix(GateKind::X, 0.0),
            },
            GateKind::Toffoli => Kernel::Target {
                controls: bit(0) | bit(1),
                target: bit(2),
                m: single_qubit_matrix(GateKind::X, 0.0),
            },
            GateKind::Cphase => Kernel::Phase {
                mask: bit(0) | bit(1),
                phase: c(-1.0, 0.0),
            },
            GateKind::Swap => Kernel::Swap { a: bit(0), b: bit(1) },
            GateKind::PrepZ | GateKind::Measure => return Err(GateError::NonUnitary(gate.kind)),
            kind => Kernel::Target {
                controls: 0,
                target: bit(0),
                m: single_qubit_matrix(kind, angle),
            },
        })
    }

    /// True when every input basis state feeds exactly one output state.
    fn is_one_to_one(&self) -> bool {
        match self {
            Kernel::Target { m, .. } => {
                (m[0][1] == ZERO && m[1][0] == ZERO) || (m[0][0] == ZERO && m[1][1] == ZERO)
            }
            Kernel::Phase { .. } | Kernel::Swap { .. } => true,
        }
    }
}

/// Visits every input basis state, handing `(index, amplitude)` to `map`
/// and leaving `input` zeroed. With `skip` set, zero amplitudes are not
/// visited. Outputs only ever accumulate, so skipping is bit-identical.
#[inline(always)]
fn sweep(
    input: &mut [Amplitude],
    output: &mut [Amplitude],
    skip: bool,
    mut map: impl FnMut(usize, Amplitude, &mut [Amplitude]),
) {
    if skip {
        for (i, slot) in input.iter_mut().enumerate() {
            let amp = *slot;
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            *slot = ZERO;
            map(i, amp, output);
        }
    } else {
        for (i, &amp) in input.iter().enumerate() {
            map(i, amp, output);
        }
        input.fill(ZERO);
    }
}

fn run_kernel(kernel: Kernel, input: &mut [Amplitude], output: &mut [Amplitude], skip: bool) {
    match kernel {
        Kernel::Target { controls, target, m } => {
            // Columns of `m`: where a state with target bit `b` sends its amplitude.
            let cols = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
            sweep(input, output, skip, |i, amp, out| {
                if i & controls != controls {
                    out[i] += amp;
                    return;
                }
                let col = cols[usize::from(i & target != 0)];
                if col[0] != ZERO {
                    out[i & !target] += col[0] * amp;
                }
                if col[1] != ZERO {
                    out[i | target] += col[1] * amp;
                }
            });
        }
        Kernel::Phase { mask, phase } => sweep(input, output, skip, |i, amp, out| {
            if i & mask == mask {
                out[i] += phase * amp;
            } else {
                out[i] += amp;
            }
        }),
        Kernel::Swap { a, b } => sweep(input, output, skip, |i, amp, out| {
            let (has_a, has_b) = (i & a != 0, i & b != 0);
            let j = if has_a == has_b { i } else { i ^ a ^ b };
            out[j] += amp;
        }),
    }
}

/// Applies a unitary gate: sweeps the live buffer into the idle one, clears
/// the old input and toggles parity.
pub fn apply_gate(state: &mut StateVector, gate: &GateInstance) -> Result<(), GateError> {
    gate.check_range(state.num_qubits())?;
    let kernel = Kernel::compile(gate)?;
    let skip = state.zero_skip();
    let (input, output) = state.io_buffers();
    run_kernel(kernel, input, output, skip);
    state.toggle_parity();
    Ok(())
}

/// Whether `gate` is a one-to-one mapping (no superposition created).
pub fn is_one_to_one(gate: &GateInstance) -> Result<bool, GateError> {
    Ok(Kernel::compile(gate)?.is_one_to_one())
}

/// Projective measurement of `qubit` in the computational basis. Collapses
/// the live buffer and returns the observed bit.
pub fn measure<R: Rng + ?Sized>(state: &mut StateVector, qubit: usize, rng: &mut R) -> Result<u8, GateError> {
    let qubits = state.num_qubits();
    if qubit >= qubits {
        return Err(GateError::OperandOutOfRange { qubit, qubits });
    }
    let mask = 1usize << qubit;
    let amps = state.amplitudes();
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(GateError::DegenerateState);
    }
    let p_one: f64 = amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        / total;
    let draw: f64 = rng.gen();
    let bit = u8::from(draw < p_one);
    let kept = if bit == 1 { p_one } else { 1.0 - p_one };
    let scale = 1.0 / (kept * total).sqrt();
    for (i, amp) in state.live_mut().iter_mut().enumerate() {
        if (i & mask != 0) == (bit == 1) {
            *amp *= scale;
        } else {
            *amp = ZERO;
        }
    }
    Ok(bit)
}

/// Measurement counts keyed by bitstring; the leftmost character is the
/// highest-numbered qubit.
pub type Histogram = BTreeMap<String, u64>;

pub fn bitstring(index: usize, qubits: usize) -> String {
    format!("{index:0qubits$b}")
}

/// Draws `shots` full-register samples without disturbing the state.
pub fn sample<R: Rng + ?Sized>(state: &StateVector, shots: u64, rng: &mut R) -> Histogram {
    let mut cumulative = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let last = cumulative.len() - 1;
    let mut counts = vec![0u64; cumulative.len()];
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c <= u).min(last);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|(_, n)| *n > 0)
        .map(|(i, n)| (bitstring(i, state.num_qubits()), n))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn gate(self, qubit: usize) -> GateInstance {
        match self {
            Pauli::X => GateInstance::x(qubit),
            Pauli::Y => GateInstance::y(qubit),
            Pauli::Z => GateInstance::z(qubit),
        }
    }
}

/// Symmetric depolarizing noise: after each gate, every operand qubit
/// independently suffers X, Y or Z (uniformly) with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub p: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(p: f64, seed: u64) -> Result<Self, GateError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GateError::InvalidNoise(p));
        }
        Ok(Self { p, seed })
    }
}

/// Applies `gate` followed by depolarizing errors; returns the injected errors.
pub fn apply_depolarizing<R: Rng + ?Sized>(
    state: &mut StateVector,
    gate: &GateInstance,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<Vec<(usize, Pauli)>, GateError> {
    if !(0.0..=1.0).contains(&noise.p) {
        return Err(GateError::InvalidNoise(noise.p));
    }
    apply_gate(state, gate)?;
    let mut injected = Vec::new();
    for &q in gate.qubits() {
        if rng.gen::<f64>() < noise.p {
            let pauli = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
            apply_gate(state, &pauli.gate(q))?;
            injected.push((q, pauli));
        }
    }
    Ok(injected)
}

/// One measurement outcome recorded while executing a gate list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub instruction: usize,
    pub qubit: usize,
    pub bit: u8,
}

/// Runs a gate list in order. `measure` collapses; `prep_z` measures and
/// flips back to `|0⟩` on a 1. Noise, if given, follows every unitary gate.
pub fn execute<R: Rng + ?Sized>(
    state: &mut StateVector,
    gates: &[GateInstance],
    noise: Option<&NoiseConfig>,
    rng: &mut R,
) -> Result<Vec<MeasurementRecord>, GateError> {
    let mut transcript = Vec::new();
    for (instruction, gate) in gates.iter().enumerate() {
        gate.check_range(state.num_qubits())?;
        match gate.kind() {
            GateKind::Measure => {
                let qubit = gate.qubits()[0];
                let bit = measure(state, qubit, rng)?;
                transcript.push(MeasurementRecord { instruction, qubit, bit });
            }
            GateKind::PrepZ => {
                let qubit = gate.qubits()[0];
                if measure(state, qubit, rng)? == 1 {
                    apply_gate(state, &GateInstance::x(qubit))?;
                }
            }
            _ => match noise {
                Some(cfg) if cfg.p > 0.0 => {
                    apply_depolarizing(state, gate, cfg, rng)?;
                }
                _ => apply_gate(state, gate)?,
            },
        }
    }
    Ok(transcript)
}
