use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MapError;

/// Shape of a device coupling graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TopologyKind {
    Line { nodes: usize },
    Ring { nodes: usize },
    Grid { rows: usize, cols: usize },
    Full { nodes: usize },
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyKind::Line { nodes } => write!(f, "line:{nodes}"),
            TopologyKind::Ring { nodes } => write!(f, "ring:{nodes}"),
            TopologyKind::Grid { rows, cols } => write!(f, "grid:{rows}x{cols}"),
            TopologyKind::Full { nodes } => write!(f, "full:{nodes}"),
        }
    }
}

/// Accepts `line:N`, `ring:N`, `full:N` and `grid:RxC`.
impl FromStr for TopologyKind {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, MapError> {
        let bad = || MapError::InvalidTopology(format!("cannot parse topology {s:?}"));
        let (kind, dims) = s.trim().split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match kind.trim().to_ascii_lowercase().as_str() {
            "line" => Ok(TopologyKind::Line { nodes: num(dims)? }),
            "ring" => Ok(TopologyKind::Ring { nodes: num(dims)? }),
            "full" => Ok(TopologyKind::Full { nodes: num(dims)? }),
            "grid" => {
                let (r, c) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
                Ok(TopologyKind::Grid {
                    rows: num(r)?,
                    cols: num(c)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Undirected coupling graph over physical qubits `0..nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    kind: Option<TopologyKind>,
    nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

pub fn build_topology(kind: TopologyKind) -> Result<Topology, MapError> {
    let invalid = |msg: &str| Err(MapError::InvalidTopology(format!("{kind}: {msg}")));
    let (nodes, edges): (usize, Vec<(usize, usize)>) = match kind {
        TopologyKind::Line { nodes } | TopologyKind::Ring { nodes } | TopologyKind::Full { nodes }
            if nodes == 0 =>
        {
            return invalid("node count must be at least 1");
        }
        TopologyKind::Grid { rows, cols } if rows == 0 || cols == 0 => {
            return invalid("grid dimensions must be at least 1");
        }
        TopologyKind::Line { nodes } => (nodes, (1..nodes).map(|i| (i - 1, i)).collect()),
        TopologyKind::Ring { nodes } => {
            let mut e: Vec<_> = (1..nodes).map(|i| (i - 1, i)).collect();
            if nodes > 2 {
                e.push((nodes - 1, 0));
            }
            (nodes, e)
        }
        TopologyKind::Grid { rows, cols } => {
            let mut e = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let i = r * cols + c;
                    if c + 1 < cols {
                        e.push((i, i + 1));
                    }
                    if r + 1 < rows {
                        e.push((i, i + cols));
                    }
                }
            }
            (rows * cols, e)
        }
        TopologyKind::Full { nodes } => (
            nodes,
            (0..nodes)
                .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
                .collect(),
        ),
    };
    let mut t = Topology::from_edges(nodes, edges)?;
    t.kind = Some(kind);
    Ok(t)
}

impl Topology {
    /// Arbitrary graph; connectivity is checked when routing, not here.
    pub fn from_edges(nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, MapError> {
        if nodes == 0 {
            return Err(MapError::InvalidTopology("node count must be at least 1".into()));
        }
        let mut set = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); nodes];
        for (a, b) in edges {
            if a >= nodes || b >= nodes || a == b {
                return Err(MapError::InvalidTopology(format!("bad edge ({a}, {b}) for {nodes} nodes")));
            }
            if set.insert((a.min(b), a.max(b))) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        adjacency.iter_mut().for_each(|n| n.sort_unstable());
        Ok(Self {
            kind: None,
            nodes,
            edges: set,
            adjacency,
        })
    }

    pub fn kind(&self) -> Option<TopologyKind> {
        self.kind
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Edges as `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// Neighbours in ascending order.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_fully_connected(&self) -> bool {
        self.edges.len() == self.nodes * (self.nodes - 1) / 2
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.nodes
    }

    fn distances_to(&self, target: usize, blocked: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes];
        dist[target] = Some(0);
        let mut queue = VecDeque::from([target]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if dist[v].is_none() && !blocked.contains(&v) {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest path from `from` to `to` that avoids `blocked` nodes. Among
    /// equally short paths, the lexicographically smallest node sequence wins.
    pub fn shortest_path(&self, from: usize, to: usize, blocked: &[usize]) -> Option<Vec<usize>> {
        let dist = self.distances_to(to, blocked);
        let mut d = dist[from]?;
        let mut path = vec![from];
        let mut cur = from;
        while d > 0 {
            cur = *self.adjacency[cur]
                .iter()
                .find(|&&v| dist[v] == Some(d - 1))?;
            path.push(cur);
            d -= 1;
        }
        Some(path)
    }

    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        self.distances_to(b, &[])[a]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(t: &Topology) -> Vec<(usize, usize)> {
        t.edges().iter().copied().collect()
    }

    #[test]
    fn shapes() {
        let line = build_topology(TopologyKind::Line { nodes: 4 }).unwrap();
        assert_eq!(edges(&line), vec![(0, 1), (1, 2), (2, 3)]);
        let ring = build_topology(TopologyKind::Ring { nodes: 4 }).unwrap();
        assert_eq!(edges(&ring), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        let grid = build_topology(TopologyKind::Grid { rows: 2, cols: 2 }).unwrap();
        assert_eq!(edges(&grid), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        let full = build_topology(TopologyKind::Full { nodes: 4 }).unwrap();
        assert_eq!(full.edges().len(), 6);
        assert!(full.is_fully_connected());
        assert!(build_topology(TopologyKind::Line { nodes: 1 }).unwrap().is_connected());
    }

    #[test]
    fn invalid_params() {
        assert!(build_topology(TopologyKind::Line { nodes: 0 }).is_err());
        assert!(build_topology(TopologyKind::Grid { rows: 0, cols: 3 }).is_err());
        assert!(Topology::from_edges(3, [(0, 3)]).is_err());
        assert!(Topology::from_edges(3, [(1, 1)]).is_err());
    }

    #[test]
    fn parse_kinds() {
        for s in ["line:4", "ring:5", "grid:2x3", "full:3"] {
            let k: TopologyKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("line".parse::<TopologyKind>().is_err());
        assert!("grid:3".parse::<TopologyKind>().is_err());
        assert!("star:3".parse::<TopologyKind>().is_err());
    }

    #[test]
    fn lexicographic_shortest_paths() {
        let grid = build_topology(TopologyKind::Grid { rows: 2, cols: 2 }).unwrap();
        // 0 → 3 via 1 or 2; 1 is smaller.
        assert_eq!(grid.shortest_path(0, 3, &[]), Some(vec![0, 1, 3]));
        assert_eq!(grid.shortest_path(0, 3, &[1]), Some(vec![0, 2, 3]));
        assert_eq!(grid.shortest_path(0, 3, &[1, 2]), None);
        let line = build_topology(TopologyKind::Line { nodes: 4 }).unwrap();
        assert_eq!(line.shortest_path(0, 3, &[]), Some(vec![0, 1, 2, 3]));
        assert_eq!(line.distance(3, 0), Some(3));
        let split = Topology::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!split.is_connected());
        assert_eq!(split.shortest_path(0, 3, &[]), None);
    }
}
