//! Compiles a program onto a nearest-neighbour device: initial placement,
//! SWAP routing, then ASAP scheduling.
//!
//! The routed program addresses physical qubits and declares one qubit per
//! topology node. SWAPs are kept native, so `gates_after = gates_before +
//! added_swaps` holds exactly.

mod layout;
mod route;
mod schedule;
mod topology;

pub use layout::{initial_placement, LayoutMap, PlacementStrategy};
pub use route::{lower_swaps, respects_topology, route, MappingReport};
pub use schedule::{schedule_asap, DurationTable, ScheduledCircuit};
pub use topology::{build_topology, Topology, TopologyKind};

use thiserror::Error;

use crate::cqasm::{emit, Program};
use crate::statecore::Amplitude;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("program needs {needed} qubits but the topology has {nodes} nodes")]
    TopologyTooSmall { needed: usize, nodes: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("topology is not connected")]
    Disconnected,
    #[error("instruction {instruction} cannot be routed")]
    Unroutable { instruction: usize },
}

/// Output of the full mapping pipeline.
#[derive(Debug, Clone)]
pub struct MappedCircuit {
    pub program: Program,
    /// Canonical cQASM text of `program`.
    pub text: String,
    pub initial_layout: LayoutMap,
    pub final_layout: LayoutMap,
    pub schedule: ScheduledCircuit,
    pub report: MappingReport,
}

pub fn map_circuit(
    program: &Program,
    topology: &Topology,
    strategy: PlacementStrategy,
) -> Result<MappedCircuit, MapError> {
    let initial_layout = initial_placement(program, topology, strategy)?;
    let (routed, final_layout, report) = route(program, topology, &initial_layout)?;
    let schedule = schedule_asap(&routed);
    Ok(MappedCircuit {
        text: emit(&routed),
        program: routed,
        initial_layout,
        final_layout,
        schedule,
        report,
    })
}

/// Reads the virtual-qubit state out of a device state: entry `x` is the
/// device amplitude at `layout.physical_index(x)`. Device qubits holding no
/// virtual qubit are assumed to be `|0⟩`.
pub fn to_virtual_order(device: &[Amplitude], layout: &LayoutMap) -> Vec<Amplitude> {
    (0..1usize << layout.num_virtual())
        .map(|x| device[layout.physical_index(x)])
        .collect()
}

/// Device state holding `virtual_state` under `layout`, other qubits `|0⟩`.
pub fn to_device_order(virtual_state: &[Amplitude], layout: &LayoutMap) -> Vec<Amplitude> {
    let mut out = vec![Amplitude::new(0.0, 0.0); 1usize << layout.num_physical()];
    for (x, &a) in virtual_state.iter().enumerate() {
        out[layout.physical_index(x)] = a;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cqasm::parse;
    use crate::gates::GateInstance;
    use crate::tensor_oracle::dense_simulate;

    fn topo(s: &str) -> Topology {
        build_topology(s.parse().unwrap()).unwrap()
    }

    fn ghz() -> Program {
        let mut p = Program::new(3);
        p.extend([GateInstance::h(0), GateInstance::cnot(0, 1), GateInstance::cnot(0, 2)])
            .unwrap();
        p
    }

    #[test]
    fn bell_on_line_round_trips() {
        let p = parse("version 1.0\nqubits 2\n.bell\nh q[0]\ncnot q[0], q[1]\nmeasure q[0]\n").unwrap();
        let m = map_circuit(&p, &topo("line:2"), PlacementStrategy::Identity).unwrap();
        assert_eq!(parse(&m.text).unwrap(), m.program);
        assert_eq!(m.report.added_swaps, 0);
        assert_eq!(m.report.gates_after, m.report.gates_before);
    }

    #[test]
    fn ghz_on_line_pays_for_the_far_pair() {
        let m = map_circuit(&ghz(), &topo("line:3"), PlacementStrategy::Identity).unwrap();
        assert!(m.report.added_swaps >= 1);
        assert!(m.report.depth_after > m.report.depth_before);
        assert!(respects_topology(&m.program, &topo("line:3")));
    }

    #[test]
    fn ghz_on_full_has_no_overhead() {
        let m = map_circuit(&ghz(), &topo("full:3"), PlacementStrategy::Greedy).unwrap();
        assert_eq!(m.report.added_swaps, 0);
        assert_eq!(m.report.gates_after, m.report.gates_before);
        assert_eq!(m.report.depth_after, m.report.depth_before);
    }

    #[test]
    fn mapped_ghz_matches_the_oracle() {
        let p = ghz();
        let expected = dense_simulate(&p).unwrap();
        for s in ["line:3", "ring:4", "grid:2x2"] {
            for strategy in [PlacementStrategy::Identity, PlacementStrategy::Greedy] {
                let m = map_circuit(&p, &topo(s), strategy).unwrap();
                let device = dense_simulate(&m.program).unwrap();
                let got = to_virtual_order(&device, &m.final_layout);
                for (a, b) in got.iter().zip(&expected) {
                    assert!((a - b).norm() < 1e-9, "{s} {strategy:?}");
                }
            }
        }
    }

    #[test]
    fn device_order_inverts_virtual_order() {
        let l = LayoutMap::new(vec![2, 0], 3).unwrap();
        let v: Vec<Amplitude> = (0..4).map(|i| Amplitude::new(i as f64, 0.0)).collect();
        assert_eq!(to_virtual_order(&to_device_order(&v, &l), &l), v);
    }
}
