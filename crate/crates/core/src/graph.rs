//! The port-numbered graph model.
//!
//! A [`PortGraph`] is a finite, connected, simple, undirected graph in which
//! every node of degree `d` labels its incident edge ends with the local port
//! numbers `0..d-1`. Nodes carry no labels of their own; node indices are
//! internal handles only and are never visible to an agent walking the graph.

use std::fmt;

/// Internal handle for a node. Agents never observe these values.
pub type NodeId = usize;

/// An invariant of the port-numbered graph model that failed to hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The graph has no nodes, or a node of degree zero in a graph with more
    /// than one node (which could never be connected).
    Empty,
    /// `adj[u][p] = (v, q)` names a node index `v` that does not exist.
    DanglingNeighbor { node: NodeId, port: usize },
    /// An edge connects a node to itself.
    SelfLoop { node: NodeId },
    /// Two ports of the same node lead to the same neighbor.
    ParallelEdge { node: NodeId, neighbor: NodeId },
    /// `adj[u][p] = (v, q)` but `adj[v][q]` does not point back to `(u, p)`.
    PortSymmetry { node: NodeId, port: usize },
    /// The graph is not connected.
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "graph has no usable nodes"),
            Violation::DanglingNeighbor { node, port } => {
                write!(f, "port {port} of node {node} points outside the graph")
            }
            Violation::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            Violation::ParallelEdge { node, neighbor } => {
                write!(f, "parallel edge between nodes {node} and {neighbor}")
            }
            Violation::PortSymmetry { node, port } => {
                write!(f, "port symmetry broken at port {port} of node {node}")
            }
            Violation::Disconnected => write!(f, "graph is not connected"),
        }
    }
}

impl std::error::Error for Violation {}

/// Error for graph constructors with size preconditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidParameter(pub String);

impl fmt::Display for InvalidParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameter: {}", self.0)
    }
}

impl std::error::Error for InvalidParameter {}

/// A connected simple graph with local port numbers.
///
/// `adj[u][p] = (v, q)` means port `p` of node `u` leads to node `v`, entering
/// it by port `q`. Construction through [`PortGraph::new`] guarantees all
/// model invariants: dense ports `0..d-1`, port symmetry, no self-loops, no
/// parallel edges, connectivity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortGraph {
    adj: Vec<Vec<(NodeId, usize)>>,
}

impl PortGraph {
    /// Builds a graph from an adjacency structure, checking every invariant.
    pub fn new(adj: Vec<Vec<(NodeId, usize)>>) -> Result<Self, Violation> {
        validate(&adj)?;
        Ok(PortGraph { adj })
    }

    /// Builds without validation. Callers must guarantee the invariants;
    /// used on enumeration hot paths where the construction is symmetric by
    /// design and kept graphs are validated once at insertion.
    pub(crate) fn from_parts_unchecked(adj: Vec<Vec<(NodeId, usize)>>) -> Self {
        PortGraph { adj }
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Degree of `v`.
    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    /// Follows port `p` out of `u`; returns the node entered and the entry
    /// port at that node.
    pub fn step(&self, u: NodeId, p: usize) -> (NodeId, usize) {
        self.adj[u][p]
    }

    /// All node handles.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.adj.len()
    }

    /// Raw adjacency view.
    pub fn adjacency(&self) -> &[Vec<(NodeId, usize)>] {
        &self.adj
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Multiset of degrees as (degree, count) pairs, sorted by degree.
    pub fn degree_census(&self) -> Vec<(usize, usize)> {
        let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
        for v in self.nodes() {
            *counts.entry(self.degree(v)).or_default() += 1;
        }
        counts.into_iter().collect()
    }

    /// True if the graph has no cycle.
    pub fn is_tree(&self) -> bool {
        self.edge_count() == self.node_count() - 1
    }

    /// BFS distances from `v` (in edges), ignoring ports.
    pub fn bfs_distances(&self, v: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[v] = 0;
        let mut queue = std::collections::VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Checks the adjacency structure against every model invariant, reporting
/// the first one violated.
pub fn validate(adj: &[Vec<(NodeId, usize)>]) -> Result<(), Violation> {
    let n = adj.len();
    if n == 0 {
        return Err(Violation::Empty);
    }
    if n > 1 && adj.iter().any(Vec::is_empty) {
        return Err(Violation::Empty);
    }
    for (u, ports) in adj.iter().enumerate() {
        let mut seen = vec![false; n];
        for (p, &(v, q)) in ports.iter().enumerate() {
            if v >= n {
                return Err(Violation::DanglingNeighbor { node: u, port: p });
            }
            if v == u {
                return Err(Violation::SelfLoop { node: u });
            }
            if seen[v] {
                return Err(Violation::ParallelEdge { node: u, neighbor: v });
            }
            seen[v] = true;
            // Ports are dense 0..d-1 by indexing; symmetry must be explicit.
            if q >= adj[v].len() || adj[v][q] != (u, p) {
                return Err(Violation::PortSymmetry { node: u, port: p });
            }
        }
    }
    // Connectivity by BFS from node 0.
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    if reached != n {
        return Err(Violation::Disconnected);
    }
    Ok(())
}

/// The two-node graph: a single edge, port 0 to port 0.
pub fn single_edge() -> PortGraph {
    PortGraph::new(vec![vec![(1, 0)], vec![(0, 0)]]).unwrap()
}

/// Ring of size `s` in which port 1 always leads to the clockwise neighbor
/// and port 0 to the counterclockwise one.
pub fn ring(s: usize) -> Result<PortGraph, InvalidParameter> {
    if s < 3 {
        return Err(InvalidParameter(format!("ring size must be >= 3, got {s}")));
    }
    let adj = (0..s)
        .map(|i| vec![((i + s - 1) % s, 1), ((i + 1) % s, 0)])
        .collect();
    Ok(PortGraph::new(adj).unwrap())
}

/// Ring of size `k` with one extra degree-1 node attached to ring node 0.
///
/// The unique degree-3 node reaches the pendant by port 2; the pendant's
/// single port is 0. Node layout: ring nodes `0..k`, pendant `k`.
pub fn pendant_ring(k: usize) -> Result<PortGraph, InvalidParameter> {
    if k < 3 {
        return Err(InvalidParameter(format!(
            "pendant ring size must be >= 3, got {k}"
        )));
    }
    let mut adj: Vec<Vec<(NodeId, usize)>> = (0..k)
        .map(|i| vec![((i + k - 1) % k, 1), ((i + 1) % k, 0)])
        .collect();
    adj[0].push((k, 0));
    adj.push(vec![(0, 2)]);
    Ok(PortGraph::new(adj).unwrap())
}

/// Ring of size `6j` with a degree-1 node attached to every third ring node,
/// plus a second degree-1 node at ring node 0, which thereby has degree 4.
///
/// Pendants hang off port 2 at each degree-3 node, and off ports 2 and 3 at
/// the degree-4 node. Node layout: ring nodes `0..6j`; the pendant of ring
/// node `3t` is `6j + t`; the extra pendant of ring node 0 is `8j`.
pub fn studded_ring(j: usize) -> Result<PortGraph, InvalidParameter> {
    if j < 1 {
        return Err(InvalidParameter(format!(
            "studded ring parameter must be >= 1, got {j}"
        )));
    }
    let s = 6 * j;
    let mut adj: Vec<Vec<(NodeId, usize)>> = (0..s)
        .map(|i| vec![((i + s - 1) % s, 1), ((i + 1) % s, 0)])
        .collect();
    for t in 0..2 * j {
        adj[3 * t].push((s + t, 0));
    }
    adj[0].push((8 * j, 0));
    for t in 0..2 * j {
        adj.push(vec![(3 * t, 2)]);
    }
    adj.push(vec![(0, 3)]);
    Ok(PortGraph::new(adj).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_valid() {
        let g = single_edge();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.step(0, 0), (1, 0));
    }

    #[test]
    fn broken_symmetry_is_reported() {
        // Port 0 of node 1 claims to come back on port 1, which does not exist.
        let adj = vec![vec![(1, 0)], vec![(0, 1)]];
        assert_eq!(
            validate(&adj),
            Err(Violation::PortSymmetry { node: 0, port: 0 })
        );
    }

    #[test]
    fn disconnected_is_reported() {
        // Two disjoint edges.
        let adj = vec![vec![(1, 0)], vec![(0, 0)], vec![(3, 0)], vec![(2, 0)]];
        assert_eq!(validate(&adj), Err(Violation::Disconnected));
    }

    #[test]
    fn self_loop_and_parallel_edge_are_reported() {
        let adj = vec![vec![(0, 0)]];
        assert_eq!(validate(&adj), Err(Violation::SelfLoop { node: 0 }));
        let adj = vec![vec![(1, 0), (1, 1)], vec![(0, 0), (0, 1)]];
        assert_eq!(
            validate(&adj),
            Err(Violation::ParallelEdge { node: 0, neighbor: 1 })
        );
    }

    #[test]
    fn ring_ports_run_clockwise() {
        let g = ring(3).unwrap();
        assert_eq!(g.node_count(), 3);
        assert!(g.nodes().all(|v| g.degree(v) == 2));

        // Walk forward by port 1 around a size-4 ring: back at the start
        // after exactly 4 steps and not before.
        let g = ring(4).unwrap();
        let mut at = 0;
        for step in 1..=4 {
            at = g.step(at, 1).0;
            if step < 4 {
                assert_ne!(at, 0);
            }
        }
        assert_eq!(at, 0);

        assert!(ring(2).is_err());
    }

    #[test]
    fn pendant_ring_shape() {
        let g = pendant_ring(3).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.degree_census(), vec![(1, 1), (2, 2), (3, 1)]);

        assert_eq!(pendant_ring(5).unwrap().node_count(), 6);

        // From the pendant, port 0 arrives at the degree-3 node by port 2.
        let g = pendant_ring(3).unwrap();
        let (v, entry) = g.step(3, 0);
        assert_eq!(g.degree(v), 3);
        assert_eq!(entry, 2);

        assert!(pendant_ring(2).is_err());
    }

    #[test]
    fn studded_ring_census() {
        let g = studded_ring(1).unwrap();
        assert_eq!(g.node_count(), 9);
        assert_eq!(g.degree_census(), vec![(1, 3), (2, 4), (3, 1), (4, 1)]);

        let g = studded_ring(2).unwrap();
        assert_eq!(g.node_count(), 17);
        assert_eq!(g.degree_census(), vec![(1, 5), (2, 8), (3, 3), (4, 1)]);

        for j in 1..=6 {
            let g = studded_ring(j).unwrap();
            assert_eq!(g.node_count(), 8 * j + 1);
            assert_eq!(
                g.degree_census(),
                vec![(1, 2 * j + 1), (2, 4 * j), (3, 2 * j - 1), (4, 1)]
            );
        }

        assert!(studded_ring(0).is_err());
    }

    #[test]
    fn studded_ring_antipode_distance() {
        // Ring distance from the degree-4 node to its antipodal ring node is
        // 3j, and that node has degree 3 (it carries a pendant).
        let g = studded_ring(1).unwrap();
        let dist = g.bfs_distances(0);
        assert_eq!(dist[3], 3);
        assert_eq!(g.degree(3), 3);
    }

    #[test]
    fn pendant_ports_sit_at_two_and_three() {
        for j in 1..=4 {
            let g = studded_ring(j).unwrap();
            for v in g.nodes() {
                match g.degree(v) {
                    3 => assert_eq!(g.degree(g.step(v, 2).0), 1),
                    4 => {
                        assert_eq!(g.degree(g.step(v, 2).0), 1);
                        assert_eq!(g.degree(g.step(v, 3).0), 1);
                    }
                    _ => {}
                }
            }
        }
    }
}
