//! Exhaustive enumeration of small connected port-numbered graphs.
//!
//! The whole space of port-numbered graphs is listed one representative per
//! port-preserving isomorphism class, ordered by size and then by canonical
//! code. One-node graphs have no edges and are excluded. The combinatorial
//! count explodes with size, so exact-size buckets are only built up to
//! [`MAX_GRAPH_SIZE`] (all graphs) and [`MAX_TREE_SIZE`] (trees); results are
//! cached process-wide, since a bucket's content does not depend on any
//! configuration.

use std::collections::HashSet;
use std::sync::{Arc, Mutex, OnceLock};

use crate::canon::{canonical_code_with, CanonicalCode, CodeScratch};
use crate::graph::{single_edge, PortGraph};

/// Largest size for which the full graph space is enumerated (the size-5
/// bucket already holds six-figure class counts).
pub const MAX_GRAPH_SIZE: usize = 5;

/// Largest size for which all trees are enumerated.
pub const MAX_TREE_SIZE: usize = 8;

/// An enumeration index fell beyond the configured size cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeCapExceeded {
    pub index: usize,
    pub cap: usize,
}

impl std::fmt::Display for SizeCapExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "enumeration index {} requires graphs larger than the size cap {}",
            self.index, self.cap
        )
    }
}

impl std::error::Error for SizeCapExceeded {}

/// A size bucket: graphs of one exact size in canonical-code order.
pub type Bucket = Arc<Vec<Arc<PortGraph>>>;

fn bucket_cache(
    cache: &'static OnceLock<Mutex<Vec<Option<Bucket>>>>,
    n: usize,
    max: usize,
    build: impl FnOnce(usize) -> Vec<Arc<PortGraph>>,
) -> Bucket {
    assert!(n <= max, "exhaustive enumeration unsupported at size {n}");
    let cache = cache.get_or_init(|| Mutex::new(vec![None; max + 1]));
    if let Some(b) = &cache.lock().unwrap()[n] {
        return Arc::clone(b);
    }
    // Build outside the lock; duplicate work on a race is harmless and the
    // result is deterministic.
    let built: Bucket = Arc::new(build(n));
    let mut guard = cache.lock().unwrap();
    if guard[n].is_none() {
        guard[n] = Some(Arc::clone(&built));
    }
    Arc::clone(guard[n].as_ref().unwrap())
}

/// All connected port-numbered graphs of exactly `n` nodes, one per
/// isomorphism class, in canonical order. `n` must be at most
/// [`MAX_GRAPH_SIZE`].
pub fn graphs_of_size(n: usize) -> Bucket {
    static CACHE: OnceLock<Mutex<Vec<Option<Bucket>>>> = OnceLock::new();
    bucket_cache(&CACHE, n, MAX_GRAPH_SIZE, build_graph_bucket)
}

/// All trees of exactly `n` nodes with all port labelings, one per class, in
/// canonical order. `n` must be at most [`MAX_TREE_SIZE`].
pub fn trees_of_size(n: usize) -> Bucket {
    static CACHE: OnceLock<Mutex<Vec<Option<Bucket>>>> = OnceLock::new();
    bucket_cache(&CACHE, n, MAX_TREE_SIZE, build_tree_bucket)
}

/// The `i`-th (1-based) connected port-numbered graph in canonical order
/// across all sizes up to `cap`.
pub fn nth_graph(i: usize, cap: usize) -> Result<Arc<PortGraph>, SizeCapExceeded> {
    nth_in(i, cap, graphs_of_size)
}

/// The `i`-th (1-based) tree in canonical order across sizes up to `cap`.
pub fn nth_tree(i: usize, cap: usize) -> Result<Arc<PortGraph>, SizeCapExceeded> {
    nth_in(i, cap, trees_of_size)
}

fn nth_in(
    i: usize,
    cap: usize,
    bucket: impl Fn(usize) -> Bucket,
) -> Result<Arc<PortGraph>, SizeCapExceeded> {
    assert!(i >= 1, "enumeration indices are 1-based");
    let mut remaining = i - 1;
    for n in 2..=cap {
        let b = bucket(n);
        if remaining < b.len() {
            return Ok(Arc::clone(&b[remaining]));
        }
        remaining -= b.len();
    }
    Err(SizeCapExceeded { index: i, cap })
}

/// Number of classes of size at most `cap`.
pub fn graphs_up_to(cap: usize) -> usize {
    (2..=cap).map(|n| graphs_of_size(n).len()).sum()
}

// ---------------------------------------------------------------------------
// Underlying simple graphs up to isomorphism
// ---------------------------------------------------------------------------

/// Connected simple graphs on `n` labeled nodes, one adjacency-list
/// representative per (unlabeled) isomorphism class.
fn underlying_connected(n: usize) -> Vec<Vec<Vec<usize>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let mut perms = Vec::new();
    permutations(n, &mut perms);
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut neighbors = vec![Vec::new(); n];
        for (e, &(a, b)) in pairs.iter().enumerate() {
            if mask & (1 << e) != 0 {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        if n > 1 && neighbors.iter().any(Vec::is_empty) {
            continue;
        }
        if !connected(&neighbors) {
            continue;
        }
        // Canonical form: least edge mask over all vertex permutations.
        let canon = perms
            .iter()
            .map(|perm| {
                let mut m = 0u32;
                for (e, &(a, b)) in pairs.iter().enumerate() {
                    if mask & (1 << e) != 0 {
                        let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
                        let idx = pairs.iter().position(|&p| p == (x, y)).unwrap();
                        let _ = e;
                        m |= 1 << idx;
                    }
                }
                m
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            reps.push(neighbors);
        }
    }
    reps
}

fn connected(neighbors: &[Vec<usize>]) -> bool {
    let n = neighbors.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &neighbors[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

fn permutations(n: usize, out: &mut Vec<Vec<usize>>) {
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(&mut cur, n, out);
}

fn heap_permute(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(cur, k - 1, out);
        if k.is_multiple_of(2) {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Port assignments
// ---------------------------------------------------------------------------

/// Calls `f` with every port labeling of the given underlying graph. The
/// graph passed to `f` is rebuilt for each assignment.
fn for_each_port_assignment(neighbors: &[Vec<usize>], mut f: impl FnMut(PortGraph)) {
    let n = neighbors.len();
    let max_deg = neighbors.iter().map(Vec::len).max().unwrap_or(0);
    // perm_tables[d] = all permutations of 0..d; inverse_tables mirrors them.
    let mut perm_tables: Vec<Vec<Vec<usize>>> = Vec::with_capacity(max_deg + 1);
    let mut inverse_tables: Vec<Vec<Vec<usize>>> = Vec::with_capacity(max_deg + 1);
    for d in 0..=max_deg {
        let mut perms = Vec::new();
        permutations(d, &mut perms);
        perms.sort();
        let inverses = perms
            .iter()
            .map(|p| {
                let mut inv = vec![0; d];
                for (port, &idx) in p.iter().enumerate() {
                    inv[idx] = port;
                }
                inv
            })
            .collect();
        perm_tables.push(perms);
        inverse_tables.push(inverses);
    }
    // position_of[v] maps a neighbor u of v to u's index in neighbors[v].
    let position_of: Vec<std::collections::HashMap<usize, usize>> = neighbors
        .iter()
        .map(|ns| ns.iter().enumerate().map(|(i, &u)| (u, i)).collect())
        .collect();

    let mut odometer = vec![0usize; n];
    loop {
        let mut adj = Vec::with_capacity(n);
        for u in 0..n {
            let d = neighbors[u].len();
            let perm = &perm_tables[d][odometer[u]];
            let mut ports = Vec::with_capacity(d);
            for &idx in perm.iter() {
                let v = neighbors[u][idx];
                let dv = neighbors[v].len();
                let back = inverse_tables[dv][odometer[v]][position_of[v][&u]];
                ports.push((v, back));
            }
            adj.push(ports);
        }
        f(PortGraph::from_parts_unchecked(adj));

        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == n {
                return;
            }
            odometer[pos] += 1;
            if odometer[pos] < perm_tables[neighbors[pos].len()].len() {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

fn collect_classes(reps: &[Vec<Vec<usize>>]) -> Vec<Arc<PortGraph>> {
    let mut scratch = CodeScratch::default();
    let mut kept: Vec<(CanonicalCode, Arc<PortGraph>)> = Vec::new();
    let mut seen: HashSet<CanonicalCode> = HashSet::new();
    for rep in reps {
        for_each_port_assignment(rep, |g| {
            let code = canonical_code_with(&g, &mut scratch);
            if seen.insert(code.clone()) {
                debug_assert!(crate::graph::validate(g.adjacency()).is_ok());
                kept.push((code, Arc::new(g)));
            }
        });
    }
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    kept.into_iter().map(|(_, g)| g).collect()
}

fn build_graph_bucket(n: usize) -> Vec<Arc<PortGraph>> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![Arc::new(single_edge())];
    }
    collect_classes(&underlying_connected(n))
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

fn build_tree_bucket(n: usize) -> Vec<Arc<PortGraph>> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![Arc::new(single_edge())];
    }
    collect_classes(&underlying_trees(n))
}

/// Unlabeled trees on `n` nodes as adjacency-list representatives, found by
/// decoding every Pruefer sequence and deduplicating by the classic
/// rooted-at-center canonical form.
fn underlying_trees(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let neighbors = pruefer_decode(&seq, n);
        let canon = tree_canonical(&neighbors);
        if seen.insert(canon) {
            reps.push(neighbors);
        }
        let mut pos = 0;
        loop {
            if pos == seq.len() {
                return reps;
            }
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
            pos += 1;
        }
    }
}

fn pruefer_decode(seq: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut neighbors = vec![Vec::new(); n];
    let add = |a: usize, b: usize, nb: &mut Vec<Vec<usize>>| {
        nb[a].push(b);
        nb[b].push(a);
    };
    let mut deg = degree.clone();
    for &s in seq {
        let leaf = (0..n).find(|&v| deg[v] == 1).unwrap();
        add(leaf, s, &mut neighbors);
        deg[leaf] = 0;
        deg[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    add(rest[0], rest[1], &mut neighbors);
    neighbors
}

/// Canonical byte string of an unlabeled tree (ports ignored).
fn tree_canonical(neighbors: &[Vec<usize>]) -> Vec<u8> {
    let centers = tree_centers(neighbors);
    centers
        .iter()
        .map(|&c| rooted_canonical(neighbors, c, usize::MAX))
        .min()
        .unwrap()
}

fn tree_centers(neighbors: &[Vec<usize>]) -> Vec<usize> {
    let n = neighbors.len();
    if n == 1 {
        return vec![0];
    }
    let mut degree: Vec<usize> = neighbors.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            degree[v] = 0;
            for &u in &neighbors[v] {
                if degree[u] > 1 {
                    degree[u] -= 1;
                    if degree[u] == 1 {
                        next.push(u);
                    }
                }
            }
        }
        layer = next;
    }
    layer
}

fn rooted_canonical(neighbors: &[Vec<usize>], v: usize, parent: usize) -> Vec<u8> {
    let mut children: Vec<Vec<u8>> = neighbors[v]
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| rooted_canonical(neighbors, u, v))
        .collect();
    children.sort();
    let mut out = vec![b'('];
    for c in children {
        out.extend(c);
    }
    out.push(b')');
    out
}

/// Deterministic sample of tree classes of exactly `n` nodes, used where the
/// full bucket would be too large to sweep. Every unlabeled shape is
/// represented; port labelings are strided so that roughly `per_shape`
/// assignments per shape survive deduplication.
pub fn sampled_trees(n: usize, per_shape: usize) -> Vec<Arc<PortGraph>> {
    let reps = underlying_trees(n);
    let mut scratch = CodeScratch::default();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for rep in &reps {
        let total: usize = rep.iter().map(|ns| factorial(ns.len())).product();
        let stride = (total / per_shape.max(1)).max(1);
        let mut kept = 0usize;
        let mut index = 0usize;
        for_each_port_assignment(rep, |g| {
            if index.is_multiple_of(stride) && kept < per_shape {
                let code = canonical_code_with(&g, &mut scratch);
                if seen.insert(code) {
                    kept += 1;
                    out.push(Arc::new(g));
                }
            }
            index += 1;
        });
    }
    out
}

fn factorial(d: usize) -> usize {
    (1..=d).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{canonical_code, port_isomorphic};
    use crate::graph::ring;

    #[test]
    fn first_graph_is_the_single_edge() {
        let g = nth_graph(1, 5).unwrap();
        assert!(port_isomorphic(&g, &single_edge()));
        let t = nth_tree(1, 6).unwrap();
        assert!(port_isomorphic(&t, &single_edge()));
    }

    #[test]
    fn size_three_bucket_contents() {
        let bucket = graphs_of_size(3);
        // One path (both center labelings are isomorphic), the oriented ring
        // labeling (clockwise = counterclockwise up to isomorphism), and the
        // mixed ring labeling.
        assert_eq!(bucket.len(), 3);
        let paths = bucket.iter().filter(|g| g.is_tree()).count();
        assert_eq!(paths, 1);
        assert!(bucket.iter().any(|g| port_isomorphic(g, &ring(3).unwrap())));
    }

    #[test]
    fn all_size_three_trees_are_paths() {
        let bucket = trees_of_size(3);
        assert_eq!(bucket.len(), 1);
        assert_eq!(bucket[0].degree_census(), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn enumeration_is_canonical() {
        // Pairwise distinct codes and non-decreasing sizes across buckets.
        let mut last_size = 0;
        let mut codes = HashSet::new();
        for n in 2..=4 {
            for g in graphs_of_size(n).iter() {
                assert!(g.node_count() >= last_size);
                last_size = g.node_count();
                assert!(codes.insert(canonical_code(g)));
            }
        }
        // Within a bucket the order is strictly increasing by code.
        let bucket = graphs_of_size(4);
        for w in bucket.windows(2) {
            assert!(canonical_code(&w[0]) < canonical_code(&w[1]));
        }
    }

    #[test]
    fn cap_violation_names_the_cap() {
        let total = graphs_up_to(3);
        let err = nth_graph(total + 1, 3).unwrap_err();
        assert_eq!(err.cap, 3);
    }

    #[test]
    fn tree_enumeration_sizes_are_non_decreasing() {
        let mut sizes = Vec::new();
        for i in 1..=20 {
            sizes.push(nth_tree(i, 6).unwrap().node_count());
        }
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn codes_are_isomorphism_complete_small_sizes() {
        use crate::canon::testing::isomorphic_by_search;

        // Equal code <=> isomorphic, with the bijection search as the
        // independent oracle. Exhaustive over all class pairs up to size 4.
        let mut graphs = Vec::new();
        for n in 2..=4 {
            graphs.extend(graphs_of_size(n).iter().cloned());
        }
        let codes: Vec<_> = graphs.iter().map(|g| canonical_code(g)).collect();
        for a in 0..graphs.len() {
            for b in a + 1..graphs.len() {
                assert_ne!(codes[a], codes[b]);
                assert!(
                    !isomorphic_by_search(&graphs[a], &graphs[b]),
                    "bucket entries {a} and {b} must be distinct classes"
                );
            }
        }
        // Isomorphic inputs (relabelings) map to equal codes.
        for g in graphs.iter().step_by(7) {
            let n = g.node_count();
            let perm: Vec<usize> = (0..n).map(|v| (v + 1) % n).collect();
            let mut adj = vec![Vec::new(); n];
            for u in 0..n {
                adj[perm[u]] = (0..g.degree(u))
                    .map(|p| {
                        let (v, q) = g.step(u, p);
                        (perm[v], q)
                    })
                    .collect();
            }
            let h = PortGraph::new(adj).unwrap();
            assert!(isomorphic_by_search(g, &h));
            assert_eq!(canonical_code(g), canonical_code(&h));
        }
    }

    #[test]
    fn size_five_codes_spot_checked_against_search() {
        use crate::canon::testing::isomorphic_by_search;
        let bucket = graphs_of_size(5);
        // The whole bucket is strictly ordered by code (hence pairwise
        // distinct classes); the bijection-search oracle audits a sample.
        for w in bucket.windows(2) {
            assert!(canonical_code(&w[0]) < canonical_code(&w[1]));
        }
        let sample: Vec<_> = bucket.iter().step_by(bucket.len() / 25).collect();
        for (a, g) in sample.iter().enumerate() {
            for h in &sample[a + 1..] {
                assert_eq!(
                    canonical_code(g) == canonical_code(h),
                    isomorphic_by_search(g, h)
                );
            }
        }
    }

    #[test]
    fn sampled_trees_cover_every_shape() {
        let sample = sampled_trees(7, 3);
        // 11 unlabeled trees on 7 nodes.
        let shapes: HashSet<Vec<u8>> = sample
            .iter()
            .map(|g| {
                let neighbors: Vec<Vec<usize>> = g
                    .nodes()
                    .map(|v| (0..g.degree(v)).map(|p| g.step(v, p).0).collect())
                    .collect();
                tree_canonical(&neighbors)
            })
            .collect();
        assert_eq!(shapes.len(), 11);
        assert!(sample.iter().all(|g| g.is_tree()));
    }
}
