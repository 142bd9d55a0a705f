//! The cQASM subset: program model, parser, canonical emitter, instruction
//! dependency graph and the qubit symbol table.
//!
//! Grammar, one statement per line, `#` starts a comment:
//!
//! ```text
//! version 1.0
//! qubits <N>
//! .<kernel_name>
//! <gate> q[i](, q[j](, q[k]))(, <angle>)
//! ```
//!
//! Gate mnemonics are case-insensitive: `x y z h rx ry rz cnot cz toffoli
//! swap prep_z measure`. Kernel names are case-sensitive identifiers.
//! Qubit `k` is bit `k` of a basis index (qubit 0 least significant).

mod dag;
mod parse;
mod random;
mod symbols;

pub use dag::{dependency_graph, DependencyDag};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use random::{random_gate, random_program, UNITARY_KINDS};
pub use symbols::{SymbolEntry, SymbolError, SymbolTable};

use crate::gates::{GateError, GateInstance};

pub const VERSION: &str = "1.0";

/// A named kernel. Kernels only label a contiguous run of instructions;
/// `start` is the index of the first instruction that belongs to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    pub name: String,
    pub start: usize,
}

/// A parsed cQASM program: header plus a flat instruction list, with
/// kernel labels pointing into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    version: String,
    num_qubits: usize,
    kernels: Vec<Kernel>,
    instructions: Vec<GateInstance>,
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Program {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            version: VERSION.to_string(),
            num_qubits,
            kernels: Vec::new(),
            instructions: Vec::new(),
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn instructions(&self) -> &[GateInstance] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Opens a new kernel; following pushes belong to it. Panics on an
    /// invalid or duplicate name.
    pub fn begin_kernel(&mut self, name: &str) {
        assert!(is_identifier(name), "invalid kernel name {name:?}");
        assert!(
            self.kernels.iter().all(|k| k.name != name),
            "duplicate kernel {name:?}"
        );
        self.kernels.push(Kernel {
            name: name.to_string(),
            start: self.instructions.len(),
        });
    }

    pub fn push(&mut self, gate: GateInstance) -> Result<(), GateError> {
        gate.check_range(self.num_qubits)?;
        self.instructions.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = GateInstance>>(&mut self, gates: I) -> Result<(), GateError> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// `(kernel name or None for the unlabelled prefix, instructions)` in order.
    pub fn sections(&self) -> Vec<(Option<&str>, &[GateInstance])> {
        let mut out = Vec::new();
        let first = self.kernels.first().map_or(self.instructions.len(), |k| k.start);
        if first > 0 {
            out.push((None, &self.instructions[..first]));
        }
        for (i, k) in self.kernels.iter().enumerate() {
            let end = self
                .kernels
                .get(i + 1)
                .map_or(self.instructions.len(), |next| next.start);
            out.push((Some(k.name.as_str()), &self.instructions[k.start..end]));
        }
        out
    }

    /// Same kernel structure over a different instruction list and register
    /// size. `starts` gives each kernel's new start index.
    pub fn rebuilt(&self, num_qubits: usize, instructions: Vec<GateInstance>, starts: &[usize]) -> Self {
        assert_eq!(starts.len(), self.kernels.len());
        Self {
            version: self.version.clone(),
            num_qubits,
            kernels: self
                .kernels
                .iter()
                .zip(starts)
                .map(|(k, &start)| Kernel {
                    name: k.name.clone(),
                    start,
                })
                .collect(),
            instructions,
        }
    }
}

/// Canonical text: header, then each kernel with one instruction per line.
/// Angles are written in the shortest form that parses back bit-exactly.
pub fn emit(program: &Program) -> String {
    let mut out = format!("version {}\nqubits {}\n", program.version, program.num_qubits);
    for (name, body) in program.sections() {
        if let Some(name) = name {
            out.push('.');
            out.push_str(name);
            out.push('\n');
        }
        for g in body {
            out.push_str(&g.to_string());
            out.push('\n');
        }
    }
    out
}
