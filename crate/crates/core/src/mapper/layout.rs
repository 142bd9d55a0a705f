use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{MapError, Topology};
use crate::cqasm::Program;
use crate::gates::GateKind;

/// Virtual→physical assignment for the `n` program qubits on a device with
/// `nodes ≥ n` physical qubits, kept together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutMap {
    v2p: Vec<usize>,
    p2v: Vec<Option<usize>>,
}

impl LayoutMap {
    pub fn identity(qubits: usize, nodes: usize) -> Result<Self, MapError> {
        Self::new((0..qubits).collect(), nodes)
    }

    pub fn new(virtual_to_physical: Vec<usize>, nodes: usize) -> Result<Self, MapError> {
        if virtual_to_physical.len() > nodes {
            return Err(MapError::TopologyTooSmall {
                needed: virtual_to_physical.len(),
                nodes,
            });
        }
        let mut p2v = vec![None; nodes];
        for (v, &p) in virtual_to_physical.iter().enumerate() {
            if p >= nodes {
                return Err(MapError::InvalidLayout(format!("physical qubit {p} outside 0..{nodes}")));
            }
            if p2v[p].replace(v).is_some() {
                return Err(MapError::InvalidLayout(format!("physical qubit {p} assigned twice")));
            }
        }
        Ok(Self {
            v2p: virtual_to_physical,
            p2v,
        })
    }

    pub fn num_virtual(&self) -> usize {
        self.v2p.len()
    }

    pub fn num_physical(&self) -> usize {
        self.p2v.len()
    }

    pub fn physical(&self, v: usize) -> usize {
        self.v2p[v]
    }

    pub fn virtual_at(&self, p: usize) -> Option<usize> {
        self.p2v[p]
    }

    pub fn virtual_to_physical(&self) -> &[usize] {
        &self.v2p
    }

    /// Exchanges whatever occupies physical nodes `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        self.p2v.swap(a, b);
        for p in [a, b] {
            if let Some(v) = self.p2v[p] {
                self.v2p[v] = p;
            }
        }
    }

    /// Basis index on the device holding virtual basis index `x`.
    pub fn physical_index(&self, x: usize) -> usize {
        self.v2p
            .iter()
            .enumerate()
            .filter(|(v, _)| x >> v & 1 == 1)
            .map(|(_, &p)| 1usize << p)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementStrategy {
    #[default]
    Identity,
    Greedy,
}

impl FromStr for PlacementStrategy {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, MapError> {
        match s.to_ascii_lowercase().as_str() {
            "identity" => Ok(Self::Identity),
            "greedy" => Ok(Self::Greedy),
            _ => Err(MapError::InvalidLayout(format!("unknown placement strategy {s:?}"))),
        }
    }
}

/// Interaction counts per unordered virtual pair. A Toffoli contributes
/// each control paired with the target.
fn interaction_counts(program: &Program) -> BTreeMap<(usize, usize), usize> {
    let mut counts = BTreeMap::new();
    for g in program.instructions() {
        let q = g.qubits();
        let pairs: &[(usize, usize)] = match g.kind() {
            GateKind::Toffoli => &[(q[0], q[2]), (q[1], q[2])],
            _ if q.len() == 2 => &[(q[0], q[1])],
            _ => &[],
        };
        for &(a, b) in pairs {
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
}

pub fn initial_placement(
    program: &Program,
    topology: &Topology,
    strategy: PlacementStrategy,
) -> Result<LayoutMap, MapError> {
    let n = program.num_qubits();
    let nodes = topology.nodes();
    if n > nodes {
        return Err(MapError::TopologyTooSmall { needed: n, nodes });
    }
    // Every placement is equivalent on a complete graph.
    if strategy == PlacementStrategy::Identity || topology.is_fully_connected() {
        return LayoutMap::identity(n, nodes);
    }

    let mut pairs: Vec<((usize, usize), usize)> = interaction_counts(program).into_iter().collect();
    pairs.sort_by(|(pa, ca), (pb, cb)| cb.cmp(ca).then(pa.cmp(pb)));

    let mut v2p: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; nodes];
    for ((a, b), _) in pairs {
        match (v2p[a], v2p[b]) {
            (None, None) => {
                if let Some(&(u, w)) = topology.edges().iter().find(|(u, w)| !used[*u] && !used[*w]) {
                    v2p[a] = Some(u);
                    v2p[b] = Some(w);
                    used[u] = true;
                    used[w] = true;
                }
            }
            (Some(anchor), None) | (None, Some(anchor)) => {
                let free = if v2p[a].is_none() { a } else { b };
                if let Some(&w) = topology.neighbors(anchor).iter().find(|&&w| !used[w]) {
                    v2p[free] = Some(w);
                    used[w] = true;
                }
            }
            (Some(_), Some(_)) => {}
        }
    }
    let mut free_nodes = (0..nodes).filter(|&p| !used[p]);
    let v2p = v2p
        .into_iter()
        .map(|p| p.or_else(|| free_nodes.next()))
        .collect::<Option<Vec<_>>>()
        .ok_or(MapError::TopologyTooSmall { needed: n, nodes })?;
    LayoutMap::new(v2p, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateInstance;
    use crate::mapper::{build_topology, TopologyKind};

    fn line(n: usize) -> Topology {
        build_topology(TopologyKind::Line { nodes: n }).unwrap()
    }

    #[test]
    fn layout_rejects_collisions() {
        assert!(LayoutMap::new(vec![0, 0], 3).is_err());
        assert!(LayoutMap::new(vec![3], 3).is_err());
        assert!(matches!(
            LayoutMap::identity(4, 3),
            Err(MapError::TopologyTooSmall { needed: 4, nodes: 3 })
        ));
    }

    #[test]
    fn swap_updates_both_directions() {
        let mut l = LayoutMap::identity(2, 3).unwrap();
        l.swap_physical(1, 2);
        assert_eq!(l.virtual_to_physical(), &[0, 2]);
        assert_eq!(l.virtual_at(1), None);
        assert_eq!(l.virtual_at(2), Some(1));
        assert_eq!(l.physical_index(0b10), 0b100);
    }

    #[test]
    fn identity_strategy() {
        let p = Program::new(3);
        let l = initial_placement(&p, &line(5), PlacementStrategy::Identity).unwrap();
        assert_eq!(l.virtual_to_physical(), &[0, 1, 2]);
        assert!(initial_placement(&Program::new(6), &line(5), PlacementStrategy::Identity).is_err());
    }

    #[test]
    fn greedy_puts_busiest_pair_on_an_edge() {
        let mut p = Program::new(4);
        for _ in 0..3 {
            p.push(GateInstance::cnot(0, 3)).unwrap();
        }
        p.push(GateInstance::cnot(1, 2)).unwrap();
        let t = line(4);
        let l = initial_placement(&p, &t, PlacementStrategy::Greedy).unwrap();
        assert!(t.is_adjacent(l.physical(0), l.physical(3)));
        assert_eq!(l.virtual_to_physical(), &[0, 2, 3, 1]);
    }

    #[test]
    fn greedy_without_two_qubit_gates_is_identity() {
        let mut p = Program::new(3);
        p.extend([GateInstance::h(0), GateInstance::x(2)]).unwrap();
        let l = initial_placement(&p, &line(4), PlacementStrategy::Greedy).unwrap();
        assert_eq!(l.virtual_to_physical(), &[0, 1, 2]);
    }
}
