use serde::{Deserialize, Serialize};

use super::{schedule_asap, LayoutMap, MapError, Topology};
use crate::cqasm::Program;
use crate::gates::{GateInstance, GateKind};

/// Overhead introduced by routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MappingReport {
    pub gates_before: usize,
    pub gates_after: usize,
    pub added_swaps: usize,
    pub depth_before: usize,
    pub depth_after: usize,
}

/// Physical-node swaps needed to move the first operand next to the second.
fn route_pair(topology: &Topology, from: usize, to: usize) -> Option<Vec<(usize, usize)>> {
    let path = topology.shortest_path(from, to, &[])?;
    Some(path.windows(2).take(path.len().saturating_sub(2)).map(|w| (w[0], w[1])).collect())
}

/// Moves token `mover` to `dest` avoiding `fixed` nodes, updating the
/// positions of any tokens it displaces.
fn walk(
    topology: &Topology,
    positions: &mut [usize; 3],
    mover: usize,
    dest: usize,
    fixed: &[usize],
    swaps: &mut Vec<(usize, usize)>,
) -> bool {
    let Some(path) = topology.shortest_path(positions[mover], dest, fixed) else {
        return false;
    };
    for w in path.windows(2) {
        if let Some(other) = positions.iter().position(|&p| p == w[1]) {
            positions[other] = w[0];
        }
        positions[mover] = w[1];
        swaps.push((w[0], w[1]));
    }
    true
}

/// Token order `[target, c1, c2]` moved in `order` to `[m, n1, n2]`.
fn try_meeting(
    topology: &Topology,
    start: [usize; 3],
    dest: [usize; 3],
    order: [usize; 3],
) -> Option<Vec<(usize, usize)>> {
    let mut positions = start;
    let mut swaps = Vec::new();
    let mut fixed = Vec::with_capacity(3);
    for token in order {
        if !walk(topology, &mut positions, token, dest[token], &fixed, &mut swaps) {
            return None;
        }
        fixed.push(dest[token]);
    }
    (positions == dest).then_some(swaps)
}

const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Swaps that leave both controls adjacent to the target. Controls are
/// first moved to neighbours of the target where it stands; only if that is
/// impossible (target on a degree-1 node, say) may the target move too.
/// Fewest swaps wins, remaining ties go to the smallest `(m, n1, n2, order)`.
fn route_toffoli(topology: &Topology, start: [usize; 3]) -> Option<Vec<(usize, usize)>> {
    let [t, c1, c2] = start;
    if topology.is_adjacent(t, c1) && topology.is_adjacent(t, c2) {
        return Some(Vec::new());
    }
    let mut best: Option<Vec<(usize, usize)>> = None;
    let consider = |best: &mut Option<Vec<(usize, usize)>>, candidate: Option<Vec<(usize, usize)>>| {
        if let Some(s) = candidate {
            if best.as_ref().is_none_or(|b| s.len() < b.len()) {
                *best = Some(s);
            }
        }
    };
    let meetings = |m: usize| {
        let nbrs = topology.neighbors(m);
        nbrs.iter()
            .flat_map(move |&n1| nbrs.iter().filter(move |&&n2| n2 != n1).map(move |&n2| [m, n1, n2]))
    };
    for dest in meetings(t) {
        for order in [[0, 1, 2], [0, 2, 1]] {
            consider(&mut best, try_meeting(topology, start, dest, order));
        }
    }
    if best.is_some() {
        return best;
    }
    for m in 0..topology.nodes() {
        for dest in meetings(m) {
            for order in ORDERS {
                consider(&mut best, try_meeting(topology, start, dest, order));
            }
        }
    }
    best
}

/// Rewrites `program` onto physical qubits, inserting SWAPs so every
/// multi-qubit gate acts on adjacent nodes. Returns the routed program,
/// the final layout and the overhead report.
pub fn route(
    program: &Program,
    topology: &Topology,
    layout: &LayoutMap,
) -> Result<(Program, LayoutMap, MappingReport), MapError> {
    if layout.num_virtual() != program.num_qubits() || layout.num_physical() != topology.nodes() {
        return Err(MapError::InvalidLayout(format!(
            "layout maps {} qubits onto {} nodes; expected {} onto {}",
            layout.num_virtual(),
            layout.num_physical(),
            program.num_qubits(),
            topology.nodes()
        )));
    }
    if !topology.is_connected() {
        return Err(MapError::Disconnected);
    }

    let mut layout = layout.clone();
    let mut out = Vec::with_capacity(program.len());
    let mut starts = Vec::with_capacity(program.kernels().len());
    let mut kernels = program.kernels().iter().peekable();
    let mut added_swaps = 0;

    for (index, gate) in program.instructions().iter().enumerate() {
        while kernels.next_if(|k| k.start == index).is_some() {
            starts.push(out.len());
        }
        let q = gate.qubits();
        let swaps = match q.len() {
            2 => {
                let (a, b) = (layout.physical(q[0]), layout.physical(q[1]));
                route_pair(topology, a, b).ok_or(MapError::Unroutable { instruction: index })?
            }
            3 => {
                let start = [layout.physical(q[2]), layout.physical(q[0]), layout.physical(q[1])];
                route_toffoli(topology, start).ok_or(MapError::Unroutable { instruction: index })?
            }
            _ => Vec::new(),
        };
        added_swaps += swaps.len();
        for (a, b) in swaps {
            layout.swap_physical(a, b);
            out.push(GateInstance::swap(a, b));
        }
        out.push(gate.remapped(|v| layout.physical(v)));
    }
    starts.extend(kernels.map(|_| out.len()));

    let routed = program.rebuilt(topology.nodes(), out, &starts);
    let report = MappingReport {
        gates_before: program.len(),
        gates_after: routed.len(),
        added_swaps,
        depth_before: schedule_asap(program).depth(),
        depth_after: schedule_asap(&routed).depth(),
    };
    Ok((routed, layout, report))
}

/// Replaces every SWAP by three CNOTs on the same pair.
pub fn lower_swaps(program: &Program) -> Program {
    let mut out = Vec::with_capacity(program.len());
    let mut starts = Vec::with_capacity(program.kernels().len());
    let mut kernels = program.kernels().iter().peekable();
    for (index, gate) in program.instructions().iter().enumerate() {
        while kernels.next_if(|k| k.start == index).is_some() {
            starts.push(out.len());
        }
        if gate.kind() == GateKind::Swap {
            let (a, b) = (gate.qubits()[0], gate.qubits()[1]);
            out.extend([GateInstance::cnot(a, b), GateInstance::cnot(b, a), GateInstance::cnot(a, b)]);
        } else {
            out.push(gate.clone());
        }
    }
    starts.extend(kernels.map(|_| out.len()));
    program.rebuilt(program.num_qubits(), out, &starts)
}

/// True when every multi-qubit gate acts on adjacent nodes; a Toffoli needs
/// both controls adjacent to its target.
pub fn respects_topology(program: &Program, topology: &Topology) -> bool {
    program.instructions().iter().all(|g| {
        let q = g.qubits();
        match q.len() {
            2 => topology.is_adjacent(q[0], q[1]),
            3 => topology.is_adjacent(q[0], q[2]) && topology.is_adjacent(q[1], q[2]),
            _ => true,
        }
    })
}
