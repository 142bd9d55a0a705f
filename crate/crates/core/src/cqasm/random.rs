use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::Rng;

use super::Program;
use crate::gates::{GateInstance, GateKind};

/// Random gate of one of `kinds` on a `qubits`-qubit register; kinds whose
/// arity exceeds the register are skipped. Angles fall in `[-2π, 2π)`.
pub fn random_gate<R: Rng + ?Sized>(rng: &mut R, qubits: usize, kinds: &[GateKind]) -> Option<GateInstance> {
    let usable: Vec<GateKind> = kinds.iter().copied().filter(|k| k.arity() <= qubits).collect();
    let kind = *usable.get(rng.gen_range(0..usable.len().max(1)))?;
    let operands = sample(rng, qubits, kind.arity()).into_vec();
    let angle = kind.takes_angle().then(|| rng.gen_range(-2.0 * PI..2.0 * PI));
    GateInstance::new(kind, operands, angle).ok()
}

/// Program of `len` random gates drawn from `kinds`.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, qubits: usize, len: usize, kinds: &[GateKind]) -> Program {
    let mut program = Program::new(qubits);
    for _ in 0..len {
        if let Some(g) = random_gate(rng, qubits, kinds) {
            program.instructions.push(g);
        }
    }
    program
}

/// Unitary gate kinds, the default pool for random programs.
pub const UNITARY_KINDS: [GateKind; 11] = [
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
];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_register_and_is_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_program(&mut rng, 2, 50, &UNITARY_KINDS);
        assert_eq!(p.len(), 50);
        assert!(p.instructions().iter().all(|g| g.kind() != GateKind::Toffoli && g.max_qubit() < 2));
        let again = random_program(&mut ChaCha8Rng::seed_from_u64(5), 2, 50, &UNITARY_KINDS);
        assert_eq!(p, again);
        assert!(random_gate(&mut rng, 1, &[GateKind::Cnot]).is_none());
    }
}
