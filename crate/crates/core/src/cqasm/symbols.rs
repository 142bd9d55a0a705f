use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::Program;
use crate::statecore::{Amplitude, StateVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("layout covers {got} qubits, program declares {expected}")]
    LayoutSize { expected: usize, got: usize },
    #[error("layout is not injective: physical qubit {0} assigned twice")]
    NotInjective(usize),
    #[error("snapshot has {got} amplitudes, expected {expected}")]
    SnapshotSize { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolEntry {
    pub name: String,
    pub virtual_index: usize,
    pub physical: Option<usize>,
}

/// Links each qubit name to its physical location (once a layout is
/// attached) and to the most recent amplitude snapshot.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    entries: Vec<SymbolEntry>,
    by_name: BTreeMap<String, usize>,
    snapshot: Option<Arc<[Amplitude]>>,
    snapshot_qubits: usize,
}

impl SymbolTable {
    pub fn from_program(program: &Program) -> Self {
        let entries: Vec<SymbolEntry> = (0..program.num_qubits())
            .map(|i| SymbolEntry {
                name: format!("q[{i}]"),
                virtual_index: i,
                physical: None,
            })
            .collect();
        let by_name = entries.iter().map(|e| (e.name.clone(), e.virtual_index)).collect();
        Self {
            entries,
            by_name,
            snapshot: None,
            snapshot_qubits: 0,
        }
    }

    pub fn entries(&self) -> &[SymbolEntry] {
        &self.entries
    }

    pub fn lookup(&self, name: &str) -> Option<&SymbolEntry> {
        self.by_name.get(name).map(|&i| &self.entries[i])
    }

    /// Attaches a virtual→physical assignment; it must be injective.
    pub fn attach_layout(&mut self, virtual_to_physical: &[usize]) -> Result<(), SymbolError> {
        if virtual_to_physical.len() != self.entries.len() {
            return Err(SymbolError::LayoutSize {
                expected: self.entries.len(),
                got: virtual_to_physical.len(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &p in virtual_to_physical {
            if !seen.insert(p) {
                return Err(SymbolError::NotInjective(p));
            }
        }
        for (entry, &p) in self.entries.iter_mut().zip(virtual_to_physical) {
            entry.physical = Some(p);
        }
        Ok(())
    }

    /// Stores a shared copy of the state's live amplitudes. With a layout
    /// attached, the state is indexed by physical qubits.
    pub fn record_snapshot(&mut self, state: &StateVector) -> Result<(), SymbolError> {
        let needed = self
            .entries
            .iter()
            .map(|e| e.physical.unwrap_or(e.virtual_index) + 1)
            .max()
            .unwrap_or(0);
        if state.num_qubits() < needed {
            return Err(SymbolError::SnapshotSize {
                expected: 1 << needed,
                got: state.dim(),
            });
        }
        self.snapshot = Some(Arc::from(state.amplitudes()));
        self.snapshot_qubits = state.num_qubits();
        Ok(())
    }

    pub fn snapshot(&self) -> Option<&Arc<[Amplitude]>> {
        self.snapshot.as_ref()
    }

    /// Probability of reading 1 on the named qubit in the latest snapshot.
    pub fn probability_of_one(&self, name: &str) -> Option<f64> {
        let entry = self.lookup(name)?;
        let snapshot = self.snapshot.as_ref()?;
        let bit = 1usize << entry.physical.unwrap_or(entry.virtual_index);
        Some(
            snapshot
                .iter()
                .enumerate()
                .filter(|(i, _)| i & bit != 0)
                .map(|(_, a)| a.norm_sqr())
                .sum(),
        )
    }
}
