//! Dense Kronecker-product reference simulator.
//!
//! Deliberately naive: every gate becomes a full `2^n × 2^n` matrix built
//! from Kronecker chains of 2×2 factors, and the state evolves by plain
//! matrix-vector products. Only used as ground truth for small registers.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul};

use thiserror::Error;

use crate::gates::{GateInstance, GateKind};
use crate::statecore::{Amplitude, ONE, ZERO};

/// Largest register the oracle will build matrices for.
pub const MAX_ORACLE_QUBITS: usize = 12;

const MAX_DIM: usize = 1 << MAX_ORACLE_QUBITS;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("matrix must be non-empty")]
    Empty,
    #[error("kronecker product of {0}×{1} exceeds the {MAX_DIM}×{MAX_DIM} limit")]
    TooLarge(usize, usize),
    #[error("register of {0} qubits exceeds the oracle limit of {MAX_ORACLE_QUBITS}")]
    TooManyQubits(usize),
    #[error("{0} is not unitary; the oracle only simulates unitary circuits")]
    NonUnitary(GateKind),
    #[error("operand {qubit} out of range for {qubits} qubits")]
    OperandOutOfRange { qubit: usize, qubits: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Amplitude>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Amplitude>) -> Result<Self, OracleError> {
        if rows * cols != entries.len() {
            return Err(OracleError::Dimension(format!(
                "{rows}×{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[&[Amplitude]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            entries: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn column(values: &[Amplitude]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            entries: values.to_vec(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.cols + col]
    }

    pub fn scale(&self, factor: Amplitude) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, OracleError> {
        if self.cols != other.rows {
            return Err(OracleError::Dimension(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.entries[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, vector: &[Amplitude]) -> Result<Vec<Amplitude>, OracleError> {
        if self.cols != vector.len() {
            return Err(OracleError::Dimension(format!(
                "{}×{} matrix applied to length-{} vector",
                self.rows,
                self.cols,
                vector.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.entries[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(vector)
                    .map(|(m, v)| m * v)
                    .sum()
            })
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("conforming dimensions")
    }
}

/// Kronecker product: the block matrix `[A_ij · B]`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, OracleError> {
    if a.entries.is_empty() || b.entries.is_empty() {
        return Err(OracleError::Empty);
    }
    let rows = a.rows.checked_mul(b.rows).filter(|&r| r <= MAX_DIM);
    let cols = a.cols.checked_mul(b.cols).filter(|&c| c <= MAX_DIM);
    let (Some(rows), Some(cols)) = (rows, cols) else {
        return Err(OracleError::TooLarge(a.rows.saturating_mul(b.rows), a.cols.saturating_mul(b.cols)));
    };
    let mut out = DenseMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let coef = a.get(ar, ac);
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out.entries[(ar * b.rows + br) * cols + ac * b.cols + bc] = coef * b.get(br, bc);
                }
            }
        }
    }
    Ok(out)
}

fn m2(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> DenseMatrix {
    let z = |p: [f64; 2]| Amplitude::new(p[0], p[1]);
    DenseMatrix::from_rows(&[&[z(a), z(b)], &[z(c), z(d)]])
}

pub fn pauli_x() -> DenseMatrix {
    m2([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0])
}

pub fn pauli_y() -> DenseMatrix {
    m2([0.0, 0.0], [0.0, -1.0], [0.0, 1.0], [0.0, 0.0])
}

pub fn pauli_z() -> DenseMatrix {
    m2([1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0])
}

pub fn hadamard() -> DenseMatrix {
    let h = FRAC_1_SQRT_2;
    m2([h, 0.0], [h, 0.0], [h, 0.0], [-h, 0.0])
}

fn projector(bit: u8) -> DenseMatrix {
    if bit == 0 {
        m2([1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
    } else {
        m2([0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0])
    }
}

/// 2×2 unitary of a single-qubit gate.
pub fn single_qubit_unitary(kind: GateKind, angle: Option<f64>) -> Option<DenseMatrix> {
    let t = angle.unwrap_or(0.0) / 2.0;
    let (cs, sn) = (t.cos(), t.sin());
    Some(match kind {
        GateKind::X => pauli_x(),
        GateKind::Y => pauli_y(),
        GateKind::Z => pauli_z(),
        GateKind::H => hadamard(),
        GateKind::Rx => m2([cs, 0.0], [0.0, -sn], [0.0, -sn], [cs, 0.0]),
        GateKind::Ry => m2([cs, 0.0], [-sn, 0.0], [sn, 0.0], [cs, 0.0]),
        GateKind::Rz => m2([cs, -sn], [0.0, 0.0], [0.0, 0.0], [cs, sn]),
        _ => return None,
    })
}

/// `factors[q]` acts on qubit `q`; the chain is `f[n-1] ⊗ … ⊗ f[0]`
/// because qubit 0 is the least significant index bit.
fn kron_chain(factors: &[DenseMatrix]) -> Result<DenseMatrix, OracleError> {
    let mut acc = DenseMatrix::identity(1);
    for f in factors.iter().rev() {
        acc = kron(&acc, f)?;
    }
    Ok(acc)
}

/// Kronecker chain with `ops` placed on the listed qubits and identity elsewhere.
fn placed(n: usize, ops: &[(usize, DenseMatrix)]) -> Result<DenseMatrix, OracleError> {
    let mut factors = vec![DenseMatrix::identity(2); n];
    for (q, m) in ops {
        factors[*q] = m.clone();
    }
    kron_chain(&factors)
}

/// Full `2^n × 2^n` unitary of `gate` on an `n`-qubit register.
///
/// Multi-qubit gates are sums of Kronecker chains: controlled gates split
/// on control projectors, CPHASE is `I − 2·P1⊗P1`, and SWAP is
/// `(I + X⊗X + Y⊗Y + Z⊗Z)/2`.
pub fn gate_matrix(gate: &GateInstance, n: usize) -> Result<DenseMatrix, OracleError> {
    if n > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooManyQubits(n));
    }
    if let Some(&qubit) = gate.qubits().iter().find(|&&q| q >= n) {
        return Err(OracleError::OperandOutOfRange { qubit, qubits: n });
    }
    let q = gate.qubits();
    let dim = 1usize << n;
    match gate.kind() {
        GateKind::Cnot => {
            let idle = placed(n, &[(q[0], projector(0))])?;
            let active = placed(n, &[(q[0], projector(1)), (q[1], pauli_x())])?;
            Ok(&idle + &active)
        }
        GateKind::Toffoli => {
            let mut total = DenseMatrix::zeros(dim, dim);
            for (a, b) in [(0, 0), (0, 1), (1, 0)] {
                total = &total + &placed(n, &[(q[0], projector(a)), (q[1], projector(b))])?;
            }
            let active = placed(n, &[(q[0], projector(1)), (q[1], projector(1)), (q[2], pauli_x())])?;
            Ok(&total + &active)
        }
        GateKind::Cphase => {
            let both = placed(n, &[(q[0], projector(1)), (q[1], projector(1))])?;
            Ok(&DenseMatrix::identity(dim) + &both.scale(Amplitude::new(-2.0, 0.0)))
        }
        GateKind::Swap => {
            let mut total = DenseMatrix::identity(dim);
            for p in [pauli_x(), pauli_y(), pauli_z()] {
                total = &total + &placed(n, &[(q[0], p.clone()), (q[1], p)])?;
            }
            Ok(total.scale(Amplitude::new(0.5, 0.0)))
        }
        kind => {
            let u = single_qubit_unitary(kind, gate.angle()).ok_or(OracleError::NonUnitary(kind))?;
            placed(n, &[(q[0], u)])
        }
    }
}

/// Evolves `|0…0⟩` through `gates` by explicit matrix-vector products.
pub fn dense_simulate_gates(n: usize, gates: &[GateInstance]) -> Result<Vec<Amplitude>, OracleError> {
    if n > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooManyQubits(n));
    }
    let mut state = vec![ZERO; 1 << n];
    state[0] = ONE;
    for g in gates {
        if !g.kind().is_unitary() {
            return Err(OracleError::NonUnitary(g.kind()));
        }
        state = gate_matrix(g, n)?.apply(&state)?;
    }
    Ok(state)
}

/// Dense simulation of a whole program (unitary instructions only).
pub fn dense_simulate(program: &crate::cqasm::Program) -> Result<Vec<Amplitude>, OracleError> {
    dense_simulate_gates(program.num_qubits(), program.instructions())
}

/// Dense simulator that builds each distinct gate matrix once. Useful when
/// many circuits over the same register repeat the same gates.
#[derive(Debug, Default)]
pub struct CachedOracle {
    matrices: HashMap<(usize, GateKind, Vec<usize>, Option<u64>), DenseMatrix>,
}

impl CachedOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn simulate(&mut self, n: usize, gates: &[GateInstance]) -> Result<Vec<Amplitude>, OracleError> {
        if n > MAX_ORACLE_QUBITS {
            return Err(OracleError::TooManyQubits(n));
        }
        let mut state = vec![ZERO; 1 << n];
        state[0] = ONE;
        for g in gates {
            if !g.kind().is_unitary() {
                return Err(OracleError::NonUnitary(g.kind()));
            }
            let key = (n, g.kind(), g.qubits().to_vec(), g.angle().map(f64::to_bits));
            let m = match self.matrices.entry(key) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => e.insert(gate_matrix(g, n)?),
            };
            state = m.apply(&state)?;
        }
        Ok(state)
    }
}

/// Closed form of `H^{⊗n}|a⟩`: amplitude `(−1)^{a·b} / √(2^n)` at every `b`,
/// with `a·b` the parity of the bitwise AND.
pub fn hadamard_tensor_check(n: usize, a: usize) -> Vec<Amplitude> {
    let norm = (1usize << n) as f64;
    let scale = 1.0 / norm.sqrt();
    (0..1usize << n)
        .map(|b| {
            let sign = if (a & b).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            Amplitude::new(sign * scale, 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    #[test]
    fn kron_x_y_block_expansion() {
        let got = kron(&pauli_x(), &pauli_y()).unwrap();
        let o = ZERO;
        let expected = DenseMatrix::from_rows(&[
            &[o, o, o, z(0.0, -1.0)],
            &[o, o, z(0.0, 1.0), o],
            &[o, z(0.0, -1.0), o, o],
            &[z(0.0, 1.0), o, o, o],
        ]);
        assert_eq!(got, expected);
    }

    #[test]
    fn kron_columns() {
        let a = [z(2.0, 0.0), z(3.0, 0.0)];
        let b = [z(5.0, 0.0), z(7.0, 0.0), z(11.0, 0.0)];
        let got = kron(&DenseMatrix::column(&a), &DenseMatrix::column(&b)).unwrap();
        let expected: Vec<_> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        assert_eq!(got, DenseMatrix::column(&expected));
        assert_eq!(got.rows(), 6);
    }

    #[test]
    fn kron_identities() {
        assert_eq!(
            kron(&DenseMatrix::identity(2), &DenseMatrix::identity(2)).unwrap(),
            DenseMatrix::identity(4)
        );
        assert_eq!(kron(&DenseMatrix::zeros(0, 0), &pauli_x()), Err(OracleError::Empty));
        let big = DenseMatrix::identity(1 << 7);
        assert!(matches!(kron(&big, &big), Err(OracleError::TooLarge(..))));
    }

    #[test]
    fn x_on_single_qubit() {
        assert_eq!(gate_matrix(&GateInstance::x(0), 1).unwrap(), pauli_x());
    }

    #[test]
    fn h_on_qubit_zero_is_i_kron_h() {
        let m = gate_matrix(&GateInstance::h(0), 2).unwrap();
        assert_eq!(m, kron(&DenseMatrix::identity(2), &hadamard()).unwrap());
        // Column action: H on bit 0 mixes |b1 0⟩ and |b1 1⟩ only.
        let h = FRAC_1_SQRT_2;
        for col in 0..4usize {
            for row in 0..4usize {
                let expected = if row >> 1 != col >> 1 {
                    0.0
                } else if row & col & 1 == 1 {
                    -h
                } else {
                    h
                };
                assert!((m.get(row, col) - z(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cnot_maps_index_one_to_three() {
        let m = gate_matrix(&GateInstance::cnot(0, 1), 2).unwrap();
        let out = m.apply(&[ZERO, ONE, ZERO, ZERO]).unwrap();
        assert_eq!(out, vec![ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn oracle_size_limits() {
        assert_eq!(gate_matrix(&GateInstance::x(0), 13), Err(OracleError::TooManyQubits(13)));
        assert!(matches!(
            dense_simulate_gates(2, &[GateInstance::measure(0)]),
            Err(OracleError::NonUnitary(GateKind::Measure))
        ));
    }

    #[test]
    fn dense_examples() {
        let h = FRAC_1_SQRT_2;
        let s = dense_simulate_gates(1, &[GateInstance::h(0)]).unwrap();
        assert!((s[0] - z(h, 0.0)).norm() < 1e-15 && (s[1] - z(h, 0.0)).norm() < 1e-15);

        let bell = dense_simulate_gates(2, &[GateInstance::h(0), GateInstance::cnot(0, 1)]).unwrap();
        let want = [z(h, 0.0), ZERO, ZERO, z(h, 0.0)];
        for (a, b) in bell.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }

        let hh = dense_simulate_gates(2, &[GateInstance::h(0), GateInstance::h(1)]).unwrap();
        for a in hh {
            assert!((a - z(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn hadamard_closed_form() {
        let h = FRAC_1_SQRT_2;
        let got = hadamard_tensor_check(1, 1);
        assert!((got[0] - z(h, 0.0)).norm() < 1e-15 && (got[1] - z(-h, 0.0)).norm() < 1e-15);
        assert_eq!(hadamard_tensor_check(2, 0), vec![z(0.5, 0.0); 4]);
        assert_eq!(
            hadamard_tensor_check(2, 3),
            vec![z(0.5, 0.0), z(-0.5, 0.0), z(-0.5, 0.0), z(0.5, 0.0)]
        );
    }

    #[test]
    fn kron_associative_exactly() {
        let a = pauli_y();
        let b = hadamard();
        let c = DenseMatrix::from_rows(&[&[z(0.3, 0.1), z(-1.2, 0.0)], &[z(0.0, 2.0), z(0.5, -0.5)]]);
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}
