//! Truncated views: what an agent can possibly learn within `k` moves.
//!
//! The depth-`k` view from node `v` is the depth-`k` truncation of the
//! universal cover of the graph rooted at `v`: a rooted tree in which the
//! root carries `v`'s degree and has one child per port, and every non-root
//! node carries the entry port and degree of the node it unfolds, again with
//! one child per port (backtracking included) until the depth bound. Views
//! capture agent-observable information exactly: two starts with equal
//! depth-`(k+1)` views are indistinguishable for the first `k` moves.
//!
//! The unfolded tree is exponential in `k`, so [`TruncatedView`] stores it as
//! a DAG with one node per (graph node, remaining depth) pair. Equality is
//! decided structurally on the DAG. [`node_views_equal`] is the fast
//! alternative route: joint port-aware partition refinement on the disjoint
//! union of the two graphs.

use std::collections::HashMap;
use std::fmt;

use crate::graph::{NodeId, PortGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViewError {
    InvalidNode { node: NodeId, size: usize },
    DepthMismatch { left: usize, right: usize },
}

impl fmt::Display for ViewError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViewError::InvalidNode { node, size } => {
                write!(f, "node {node} out of range for graph of size {size}")
            }
            ViewError::DepthMismatch { left, right } => {
                write!(f, "views have different depths ({left} vs {right})")
            }
        }
    }
}

impl std::error::Error for ViewError {}

/// One unfolded node: its degree, and per exit port the entry port at the
/// child together with the child's arena index. Children are empty at the
/// depth boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ViewNode {
    degree: usize,
    children: Vec<(usize, usize)>,
}

/// A depth-`k` truncated view as a rooted DAG.
#[derive(Debug, Clone)]
pub struct TruncatedView {
    nodes: Vec<ViewNode>,
    root: usize,
    depth: usize,
}

impl TruncatedView {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Degree of the view's origin node.
    pub fn root_degree(&self) -> usize {
        self.nodes[self.root].degree
    }

    /// `(entry port, degree)` of each depth-1 child, ordered by exit port.
    pub fn root_children(&self) -> Vec<(usize, usize)> {
        self.nodes[self.root]
            .children
            .iter()
            .map(|&(q, idx)| (q, self.nodes[idx].degree))
            .collect()
    }

    /// Arena index of the root, for traversals via [`Self::children_of`].
    pub fn root_index(&self) -> usize {
        self.root
    }

    /// `(entry port, arena index)` pairs of a node's children, ordered by
    /// exit port; empty at the depth boundary.
    pub fn children_of(&self, idx: usize) -> Vec<(usize, usize)> {
        self.nodes[idx].children.clone()
    }

    /// Degree recorded at an arena node.
    pub fn degree_of(&self, idx: usize) -> usize {
        self.nodes[idx].degree
    }

    /// Nested-term rendering `(entryPort:degree children...)`; the root has
    /// no entry port. Expands the DAG, so the output is exponential in the
    /// depth on cyclic graphs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(self.root, None, &mut out);
        out
    }

    fn render_node(&self, idx: usize, entry: Option<usize>, out: &mut String) {
        out.push('(');
        match entry {
            None => out.push(':'),
            Some(q) => {
                out.push_str(&q.to_string());
                out.push(':');
            }
        }
        out.push_str(&self.nodes[idx].degree.to_string());
        for &(q, child) in &self.nodes[idx].children {
            out.push(' ');
            self.render_node(child, Some(q), out);
        }
        out.push(')');
    }
}

/// Unfolds the depth-`k` view from `v` in `g`.
pub fn unfold_view(g: &PortGraph, v: NodeId, k: usize) -> Result<TruncatedView, ViewError> {
    if v >= g.node_count() {
        return Err(ViewError::InvalidNode {
            node: v,
            size: g.node_count(),
        });
    }
    let mut nodes = Vec::new();
    let mut memo: HashMap<(NodeId, usize), usize> = HashMap::new();
    let root = unfold_into(g, v, k, &mut nodes, &mut memo);
    Ok(TruncatedView {
        nodes,
        root,
        depth: k,
    })
}

fn unfold_into(
    g: &PortGraph,
    u: NodeId,
    depth: usize,
    nodes: &mut Vec<ViewNode>,
    memo: &mut HashMap<(NodeId, usize), usize>,
) -> usize {
    if let Some(&idx) = memo.get(&(u, depth)) {
        return idx;
    }
    let children = if depth == 0 {
        Vec::new()
    } else {
        (0..g.degree(u))
            .map(|p| {
                let (w, q) = g.step(u, p);
                (q, unfold_into(g, w, depth - 1, nodes, memo))
            })
            .collect()
    };
    let idx = nodes.len();
    nodes.push(ViewNode {
        degree: g.degree(u),
        children,
    });
    memo.insert((u, depth), idx);
    idx
}

/// Structural equality of two views of the same depth.
pub fn views_equal(a: &TruncatedView, b: &TruncatedView) -> Result<bool, ViewError> {
    if a.depth != b.depth {
        return Err(ViewError::DepthMismatch {
            left: a.depth,
            right: b.depth,
        });
    }
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    Ok(nodes_equal(a, b, a.root, b.root, &mut memo))
}

fn nodes_equal(
    a: &TruncatedView,
    b: &TruncatedView,
    x: usize,
    y: usize,
    memo: &mut HashMap<(usize, usize), bool>,
) -> bool {
    if let Some(&r) = memo.get(&(x, y)) {
        return r;
    }
    let (nx, ny) = (&a.nodes[x], &b.nodes[y]);
    let mut result = nx.degree == ny.degree && nx.children.len() == ny.children.len();
    if result {
        for (&(qa, ca), &(qb, cb)) in nx.children.iter().zip(&ny.children) {
            if qa != qb || !nodes_equal(a, b, ca, cb, memo) {
                result = false;
                break;
            }
        }
    }
    memo.insert((x, y), result);
    result
}

/// The depth-`k` views of all nodes of `g`, indexed by node.
pub fn all_views(g: &PortGraph, k: usize) -> Vec<TruncatedView> {
    g.nodes().map(|v| unfold_view(g, v, k).unwrap()).collect()
}

/// Number of pairwise distinct views in a slice.
pub fn distinct_views(views: &[TruncatedView]) -> usize {
    let mut reps: Vec<&TruncatedView> = Vec::new();
    for v in views {
        if !reps.iter().any(|r| views_equal(r, v).unwrap()) {
            reps.push(v);
        }
    }
    reps.len()
}

/// Depth-`k` views of all nodes of one graph in a single shared arena, so
/// that comparing many node pairs across two graphs reuses one memo table
/// instead of re-walking per pair.
pub struct GraphViews {
    nodes: Vec<ViewNode>,
    roots: Vec<usize>,
    depth: usize,
}

impl GraphViews {
    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// Builds the shared view table of `g` at depth `k`.
pub fn graph_views(g: &PortGraph, k: usize) -> GraphViews {
    let mut nodes = Vec::new();
    let mut memo: HashMap<(NodeId, usize), usize> = HashMap::new();
    let roots = g
        .nodes()
        .map(|v| unfold_into(g, v, k, &mut nodes, &mut memo))
        .collect();
    GraphViews {
        nodes,
        roots,
        depth: k,
    }
}

/// Structural comparator over two view tables; the memo persists across
/// queries, so comparing all node pairs costs one DAG-product walk total.
pub struct ViewTableComparator<'a> {
    a: &'a GraphViews,
    b: &'a GraphViews,
    memo: HashMap<(usize, usize), bool>,
}

impl<'a> ViewTableComparator<'a> {
    pub fn new(a: &'a GraphViews, b: &'a GraphViews) -> Result<Self, ViewError> {
        if a.depth != b.depth {
            return Err(ViewError::DepthMismatch {
                left: a.depth,
                right: b.depth,
            });
        }
        Ok(ViewTableComparator {
            a,
            b,
            memo: HashMap::new(),
        })
    }

    /// Structural equality of the views rooted at node `v` of the first
    /// table and node `w` of the second.
    pub fn equal(&mut self, v: NodeId, w: NodeId) -> bool {
        self.arena_equal(self.a.roots[v], self.b.roots[w])
    }

    fn arena_equal(&mut self, x: usize, y: usize) -> bool {
        if let Some(&r) = self.memo.get(&(x, y)) {
            return r;
        }
        let (nx, ny) = (&self.a.nodes[x], &self.b.nodes[y]);
        let mut result = nx.degree == ny.degree && nx.children.len() == ny.children.len();
        if result {
            for (&(qa, ca), &(qb, cb)) in nx.children.iter().zip(&ny.children) {
                if qa != qb || !self.arena_equal(ca, cb) {
                    result = false;
                    break;
                }
            }
        }
        self.memo.insert((x, y), result);
        result
    }
}

// ---------------------------------------------------------------------------
// Partition refinement
// ---------------------------------------------------------------------------

/// Joint port-aware partition refinement over the disjoint union of two
/// graphs. Round-`t` colors classify nodes exactly by depth-`t` view
/// equality: round 0 is the degree, and round `t+1` refines by the ordered
/// list of (exit port, entry port, neighbor's round-`t` color).
///
/// Refinement only ever splits classes, so once a round induces the same
/// partition as the previous one the coloring is stable and answers queries
/// at every larger depth.
pub struct PairRefinement {
    rounds: Vec<Vec<u32>>,
    split: usize,
}

impl PairRefinement {
    pub fn new(g: &PortGraph, h: &PortGraph, max_depth: usize) -> Self {
        let total = g.node_count() + h.node_count();
        let split = g.node_count();
        let side = |u: usize| -> (&PortGraph, usize) {
            if u < split {
                (g, u)
            } else {
                (h, u - split)
            }
        };

        let mut rounds: Vec<Vec<u32>> = Vec::with_capacity(max_depth + 1);
        let mut palette: HashMap<usize, u32> = HashMap::new();
        let colors = (0..total)
            .map(|u| {
                let (gr, v) = side(u);
                let next = palette.len() as u32;
                *palette.entry(gr.degree(v)).or_insert(next)
            })
            .collect();
        let mut classes = palette.len();
        rounds.push(colors);

        for _ in 0..max_depth {
            let prev = rounds.last().unwrap();
            let mut palette: HashMap<Vec<u32>, u32> = HashMap::new();
            let next = (0..total)
                .map(|u| {
                    let (gr, v) = side(u);
                    // Degree is implied by the signature length.
                    let mut sig = Vec::with_capacity(2 * gr.degree(v));
                    for p in 0..gr.degree(v) {
                        let (w, q) = gr.step(v, p);
                        let w_global = if u < split { w } else { w + split };
                        sig.push(q as u32);
                        sig.push(prev[w_global]);
                    }
                    let fresh = palette.len() as u32;
                    *palette.entry(sig).or_insert(fresh)
                })
                .collect();
            let new_classes = palette.len();
            rounds.push(next);
            if new_classes == classes {
                break; // stable: further rounds cannot split anything
            }
            classes = new_classes;
        }
        PairRefinement { rounds, split }
    }

    /// Depth-`k` view equality between node `v` of the first graph and node
    /// `w` of the second. Depths beyond the stabilization round are answered
    /// by the stable coloring.
    pub fn views_equal(&self, v: NodeId, w: NodeId, k: usize) -> bool {
        let round = k.min(self.rounds.len() - 1);
        self.rounds[round][v] == self.rounds[round][self.split + w]
    }

    /// Round at which the partition stabilized (upper bound on useful depth).
    pub fn stable_round(&self) -> usize {
        self.rounds.len() - 1
    }
}

/// Depth-`k` view equality via partition refinement; agrees with
/// [`views_equal`] on [`unfold_view`] outputs.
pub fn node_views_equal(g: &PortGraph, v: NodeId, h: &PortGraph, w: NodeId, k: usize) -> bool {
    PairRefinement::new(g, h, k).views_equal(v, w, k)
}
