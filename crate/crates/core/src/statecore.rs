//! Amplitude storage with alternating input/output buffers, plus the
//! memory cost model for state vectors and dense gate matrices.
//!
//! Basis index bit `k` holds qubit `k`; qubit 0 is the least significant bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex amplitude of one basis state, stored as a `(re, im)` pair of doubles.
pub type Amplitude = Complex64;

pub const ZERO: Amplitude = Complex64::new(0.0, 0.0);
pub const ONE: Amplitude = Complex64::new(1.0, 0.0);

/// Largest register the execution engine will allocate.
pub const MAX_QUBITS: usize = 30;

/// Tolerance used for normalization and equivalence checks.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Bytes per scalar component the execution engine actually uses.
pub const EXEC_SCALAR_BYTES: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("cannot allocate {qubits} qubits: needs {bytes} bytes of amplitude storage (supported range 1..={MAX_QUBITS})")]
    Capacity { qubits: usize, bytes: u128 },
    #[error("basis index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("byte count for {qubits} qubits with {scalar_bytes}-byte scalars overflows u64")]
    Overflow { qubits: u32, scalar_bytes: u32 },
    #[error("invalid memory parameters: {0}")]
    InvalidParams(String),
    #[error("amplitude vector of length {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("amplitudes are not normalized (total probability {0})")]
    NotNormalized(f64),
}

/// Which of the two buffers currently holds the live state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn toggled(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// An `n`-qubit state held in two `2^n` amplitude buffers.
///
/// Gates read from the live buffer, accumulate into the other one, clear
/// the buffer they read from and flip [`Parity`]. Between gate
/// applications the idle buffer is all zeros.
#[derive(Debug, Clone)]
pub struct StateVector {
    qubits: usize,
    even: Vec<Amplitude>,
    odd: Vec<Amplitude>,
    parity: Parity,
    zero_skip: bool,
}

fn capacity_bytes(qubits: usize) -> u128 {
    (EXEC_SCALAR_BYTES as u128) << (qubits.min(120) + 2)
}

impl StateVector {
    /// Ground state `|0…0⟩` on `qubits` qubits.
    pub fn new(qubits: usize) -> Result<Self, StateError> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(StateError::Capacity {
                qubits,
                bytes: capacity_bytes(qubits),
            });
        }
        let dim = 1usize << qubits;
        let mut even = vec![ZERO; dim];
        even[0] = ONE;
        Ok(Self {
            qubits,
            even,
            odd: vec![ZERO; dim],
            parity: Parity::Even,
            zero_skip: true,
        })
    }

    /// Builds a state from explicit amplitudes. The vector must be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Amplitude>) -> Result<Self, StateError> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(StateError::BadLength(dim));
        }
        let qubits = dim.trailing_zeros() as usize;
        if qubits > MAX_QUBITS {
            return Err(StateError::Capacity {
                qubits,
                bytes: capacity_bytes(qubits),
            });
        }
        let total: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !total.is_finite() || (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::NotNormalized(total));
        }
        Ok(Self {
            qubits,
            even: amplitudes,
            odd: vec![ZERO; dim],
            parity: Parity::Even,
            zero_skip: true,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    /// Number of basis states, `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn zero_skip(&self) -> bool {
        self.zero_skip
    }

    /// Enables or disables skipping of zero-amplitude basis states during gate application.
    pub fn set_zero_skip(&mut self, enabled: bool) {
        self.zero_skip = enabled;
    }

    /// The live amplitude buffer.
    pub fn amplitudes(&self) -> &[Amplitude] {
        match self.parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    pub fn amplitude(&self, index: usize) -> Result<Amplitude, StateError> {
        self.amplitudes()
            .get(index)
            .copied()
            .ok_or(StateError::IndexOutOfRange {
                index,
                qubits: self.qubits,
            })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes().iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    /// True when the non-live buffer holds only zeros.
    pub fn idle_buffer_is_clear(&self) -> bool {
        let idle = match self.parity {
            Parity::Even => &self.odd,
            Parity::Odd => &self.even,
        };
        idle.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    /// Returns to `|0…0⟩` without reallocating.
    pub fn reset(&mut self) {
        self.even.fill(ZERO);
        self.odd.fill(ZERO);
        self.even[0] = ONE;
        self.parity = Parity::Even;
    }

    /// `(input, output)` buffers for the next gate application.
    pub(crate) fn io_buffers(&mut self) -> (&mut [Amplitude], &mut [Amplitude]) {
        match self.parity {
            Parity::Even => (&mut self.even, &mut self.odd),
            Parity::Odd => (&mut self.odd, &mut self.even),
        }
    }

    pub(crate) fn toggle_parity(&mut self) {
        self.parity = self.parity.toggled();
    }

    pub(crate) fn live_mut(&mut self) -> &mut [Amplitude] {
        match self.parity {
            Parity::Even => &mut self.even,
            Parity::Odd => &mut self.odd,
        }
    }
}

pub fn alloc_state(qubits: usize) -> Result<StateVector, StateError> {
    StateVector::new(qubits)
}

pub fn get_amplitude(state: &StateVector, index: usize) -> Result<Amplitude, StateError> {
    state.amplitude(index)
}

pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.probabilities()
}

/// Inputs to the memory cost model: qubit count and the byte size of one
/// scalar component (half of a complex amplitude).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryParams {
    pub qubits: u32,
    pub scalar_bytes: u32,
}

impl MemoryParams {
    pub fn new(qubits: u32, scalar_bytes: u32) -> Result<Self, StateError> {
        let params = Self {
            qubits,
            scalar_bytes,
        };
        params.validate()?;
        Ok(params)
    }

    /// Double-precision parameters for `qubits` qubits.
    pub fn doubles(qubits: u32) -> Self {
        Self {
            qubits,
            scalar_bytes: EXEC_SCALAR_BYTES,
        }
    }

    fn validate(&self) -> Result<(), StateError> {
        if self.qubits == 0 {
            return Err(StateError::InvalidParams("qubit count must be at least 1".into()));
        }
        if !matches!(self.scalar_bytes, 4 | 8 | 16) {
            return Err(StateError::InvalidParams(format!(
                "scalar size must be 4, 8 or 16 bytes, got {}",
                self.scalar_bytes
            )));
        }
        Ok(())
    }

    fn scaled(&self, factor: u64, exponent: u32) -> Result<u64, StateError> {
        self.validate()?;
        let overflow = StateError::Overflow {
            qubits: self.qubits,
            scalar_bytes: self.scalar_bytes,
        };
        let states = 1u64.checked_shl(exponent).ok_or(overflow.clone())?;
        factor
            .checked_mul(self.scalar_bytes as u64)
            .and_then(|b| b.checked_mul(states))
            .ok_or(overflow)
    }
}

/// One amplitude buffer: `2 · s_T · 2^n` bytes.
pub fn estimate_vector_memory(params: MemoryParams) -> Result<u64, StateError> {
    params.scaled(2, params.qubits)
}

/// Both buffers: `s_T · 2^(n+2)` bytes.
pub fn estimate_total_memory(params: MemoryParams) -> Result<u64, StateError> {
    params.scaled(1, params.qubits.saturating_add(2))
}

/// A dense `2^n × 2^n` complex gate matrix: `2 · s_T · 2^(2n)` bytes.
pub fn estimate_matrix_memory(params: MemoryParams) -> Result<u64, StateError> {
    params.scaled(2, params.qubits.saturating_mul(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_states() {
        let s = alloc_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO]);
        assert_eq!(s.parity(), Parity::Even);

        let s = alloc_state(2).unwrap();
        assert_eq!(get_amplitude(&s, 0).unwrap(), ONE);
        for i in 1..4 {
            assert_eq!(get_amplitude(&s, i).unwrap(), ZERO);
        }
        assert!(s.idle_buffer_is_clear());
    }

    #[test]
    fn capacity_error_names_byte_requirement() {
        let err = alloc_state(31).unwrap_err();
        assert_eq!(
            err,
            StateError::Capacity {
                qubits: 31,
                bytes: 8u128 << 33
            }
        );
        assert!(err.to_string().contains("68719476736"));
        assert!(alloc_state(0).is_err());
    }

    #[test]
    fn amplitude_index_bounds() {
        let s = alloc_state(2).unwrap();
        assert_eq!(
            get_amplitude(&s, 4),
            Err(StateError::IndexOutOfRange { index: 4, qubits: 2 })
        );
    }

    #[test]
    fn ground_probabilities() {
        let s = alloc_state(1).unwrap();
        assert_eq!(probabilities(&s), vec![1.0, 0.0]);
    }

    #[test]
    fn vector_memory_examples() {
        let v = |n| estimate_vector_memory(MemoryParams::new(n, 8).unwrap()).unwrap();
        assert_eq!(v(10), 16384);
        assert_eq!(v(1), 32);
        assert_eq!(v(25), 536_870_912);
    }

    #[test]
    fn total_memory_examples() {
        let t = |n| estimate_total_memory(MemoryParams::new(n, 8).unwrap()).unwrap();
        assert_eq!(t(2), 128);
        assert_eq!(t(13), 262_144);
        assert_eq!(t(20), 33_554_432);
    }

    #[test]
    fn matrix_memory_examples() {
        let m = |n| estimate_matrix_memory(MemoryParams::new(n, 8).unwrap()).unwrap();
        assert_eq!(m(1), 64);
        assert_eq!(m(2), 256);
        // 2 * 8 * 2^20
        assert_eq!(m(10), 16_777_216);
    }

    #[test]
    fn memory_ratios_and_overflow() {
        for s in [4, 8, 16] {
            for n in 1..=28 {
                let p = MemoryParams::new(n, s).unwrap();
                let v = estimate_vector_memory(p).unwrap();
                assert_eq!(estimate_total_memory(p).unwrap(), 2 * v);
                assert_eq!(estimate_matrix_memory(p).unwrap() / v, 1u64 << n);
            }
        }
        let big = MemoryParams::new(40, 8).unwrap();
        assert!(matches!(estimate_matrix_memory(big), Err(StateError::Overflow { .. })));
        assert!(matches!(
            estimate_vector_memory(MemoryParams::new(61, 8).unwrap()),
            Err(StateError::Overflow { .. })
        ));
        assert!(MemoryParams::new(3, 2).is_err());
        assert!(MemoryParams::new(0, 8).is_err());
    }

    #[test]
    fn from_amplitudes_validates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert!(StateVector::from_amplitudes(vec![ONE, ONE]).is_err());
        assert!(StateVector::from_amplitudes(vec![ONE, ZERO, ZERO]).is_err());
    }
}
