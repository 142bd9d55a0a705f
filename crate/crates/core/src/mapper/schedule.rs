use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cqasm::{dependency_graph, Program};
use crate::gates::{GateInstance, GateKind};

/// Instructions with their ASAP cycle under unit gate durations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledCircuit {
    instructions: Vec<GateInstance>,
    cycles: Vec<usize>,
    depth: usize,
}

pub fn schedule_asap(program: &Program) -> ScheduledCircuit {
    let dag = dependency_graph(program);
    let mut cycles = vec![0usize; program.len()];
    // Program order is already a topological order.
    for j in 0..program.len() {
        cycles[j] = dag
            .predecessors(j)
            .iter()
            .map(|&i| cycles[i] + 1)
            .max()
            .unwrap_or(0);
    }
    let depth = cycles.iter().max().map_or(0, |c| c + 1);
    ScheduledCircuit {
        instructions: program.instructions().to_vec(),
        cycles,
        depth,
    }
}

impl ScheduledCircuit {
    pub fn instructions(&self) -> &[GateInstance] {
        &self.instructions
    }

    pub fn cycles(&self) -> &[usize] {
        &self.cycles
    }

    /// Number of cycles; 0 for an empty program.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Instruction indices grouped by cycle.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers = vec![Vec::new(); self.depth];
        for (i, &c) in self.cycles.iter().enumerate() {
            layers[c].push(i);
        }
        layers
    }

    /// Wall-clock latency: each cycle lasts as long as its slowest gate.
    pub fn latency(&self, durations: &DurationTable) -> f64 {
        self.layers()
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|&i| durations.duration(self.instructions[i].kind()))
                    .fold(0.0, f64::max)
            })
            .sum()
    }
}

/// Per-gate durations in arbitrary time units; unlisted kinds take
/// `default`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationTable {
    pub default: f64,
    pub per_kind: BTreeMap<GateKind, f64>,
}

impl Default for DurationTable {
    fn default() -> Self {
        Self {
            default: 1.0,
            per_kind: BTreeMap::new(),
        }
    }
}

impl DurationTable {
    pub fn duration(&self, kind: GateKind) -> f64 {
        self.per_kind.get(&kind).copied().unwrap_or(self.default)
    }
}
