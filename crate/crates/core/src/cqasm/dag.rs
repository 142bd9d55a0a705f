use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use super::Program;

/// Instruction dependency graph. Node `i` is the program's `i`-th
/// instruction; an edge `i → j` means `j` is the next instruction after `i`
/// on at least one shared qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDag {
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

pub fn dependency_graph(program: &Program) -> DependencyDag {
    let n = program.len();
    let mut last_on_qubit: Vec<Option<usize>> = vec![None; program.num_qubits()];
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    for (j, gate) in program.instructions().iter().enumerate() {
        let mut from = BTreeSet::new();
        for &q in gate.qubits() {
            if let Some(i) = last_on_qubit[q].replace(j) {
                from.insert(i);
            }
        }
        for i in from {
            preds[j].push(i);
            succs[i].push(j);
        }
    }
    DependencyDag { preds, succs }
}

impl DependencyDag {
    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succs[node]
    }

    /// All edges `(from, to)` in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .succs
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Kahn's algorithm, always releasing the lowest ready index first.
    /// Returns `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = indegree
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == 0)
            .map(|(i, _)| Reverse(i))
            .collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &j in &self.succs[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(Reverse(j));
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}
