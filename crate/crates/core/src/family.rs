//! Families of graphs: canonical enumerations equipped with witnesses.
//!
//! A family is a deterministic sequence of pairwise non-isomorphic graphs
//! with non-decreasing sizes (ties broken by canonical code). A family is
//! explorable exactly when every node `v` of every member `G_i` has a
//! *separation witness*: a lexicographically first pair `(k, m)` such that
//! the depth-`k` view from `v` differs from every depth-`k` view of every
//! node of every `G_j` with `j > m`. The witness search here checks a finite
//! surrogate of that condition, scanning tail members up to a bound `j_max`;
//! the unchecked tail is covered per family by structural arguments (ring
//! length becomes visible in a view once the depth passes the size, and a
//! tree's full-depth view reconstructs the tree exactly).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::enumerate::{nth_graph, nth_tree, trees_of_size, SizeCapExceeded};
use crate::graph::{pendant_ring, ring, studded_ring, NodeId, PortGraph};
use crate::view::PairRefinement;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    UnknownFamily(String),
    Enumeration(SizeCapExceeded),
    /// No witness is available for `(i, v)`: the family has no witness
    /// oracle, or the bounded search came back empty.
    WitnessUnavailable { family: String, i: usize, v: NodeId },
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::UnknownFamily(name) => write!(f, "unknown family `{name}`"),
            FamilyError::Enumeration(e) => write!(f, "{e}"),
            FamilyError::WitnessUnavailable { family, i, v } => {
                write!(f, "no witness available for node {v} of member {i} of `{family}`")
            }
        }
    }
}

impl std::error::Error for FamilyError {}

impl From<SizeCapExceeded> for FamilyError {
    fn from(e: SizeCapExceeded) -> Self {
        FamilyError::Enumeration(e)
    }
}

/// Bounds of the finite witness surrogate.
#[derive(Debug, Clone, Copy)]
pub struct WitnessBounds {
    pub k_max: usize,
    pub m_max: usize,
    pub j_max: usize,
}

impl Default for WitnessBounds {
    fn default() -> Self {
        WitnessBounds {
            k_max: 24,
            m_max: 16,
            j_max: 20,
        }
    }
}

#[derive(Debug, Clone)]
enum FamilyKind {
    /// Rings with one pendant: member `i` is `pendant_ring(i + 2)`.
    PendantRings,
    /// Plain clockwise rings: member `i` is `ring(i + 2)`.
    ClockwiseRings,
    /// All trees up to the enumeration cap.
    Trees { cap: usize },
    /// Pendant rings up to index `r`, studded rings beyond.
    Mixed { r: usize },
    /// The whole canonical enumeration up to the cap.
    AllGraphs { cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WitnessMode {
    /// No witness oracle (family is not explorable, or none is needed).
    None,
    /// Witnesses computed by the bounded search and cached.
    Computed,
    /// Tree rule: `(size of member, last index of that size)`.
    TreeFormula,
}

/// Cached witnesses for one member, indexed by node.
type WitnessTable = Arc<Vec<Option<(usize, usize)>>>;

/// A named family with an optional witness oracle and an optional
/// non-explorability counterexample rule.
pub struct Family {
    name: String,
    kind: FamilyKind,
    witness_mode: WitnessMode,
    bounds: WitnessBounds,
    witness_cache: Mutex<HashMap<usize, WitnessTable>>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family").field("name", &self.name).finish()
    }
}

/// Rings with one pendant node; sizes strictly increase, so the enumeration
/// order is canonical.
pub fn pendant_ring_family() -> Family {
    Family {
        name: "c".into(),
        kind: FamilyKind::PendantRings,
        witness_mode: WitnessMode::Computed,
        bounds: WitnessBounds::default(),
        witness_cache: Mutex::default(),
    }
}

/// Clockwise rings: not explorable, equipped with the counterexample rule
/// instead of witnesses.
pub fn clockwise_ring_family() -> Family {
    Family {
        name: "rings".into(),
        kind: FamilyKind::ClockwiseRings,
        witness_mode: WitnessMode::None,
        bounds: WitnessBounds::default(),
        witness_cache: Mutex::default(),
    }
}

/// All trees in canonical order.
pub fn tree_family() -> Family {
    Family {
        name: "trees".into(),
        kind: FamilyKind::Trees { cap: 6 },
        witness_mode: WitnessMode::TreeFormula,
        bounds: WitnessBounds::default(),
        witness_cache: Mutex::default(),
    }
}

/// Pendant rings for members `1..=r`, studded rings from `r + 1` on. Sizes
/// strictly increase across the seam (`8(r+1) + 1 > r + 3`), keeping the
/// order canonical.
pub fn mixed_family(r: usize) -> Family {
    Family {
        name: format!("fstar:r={r}"),
        kind: FamilyKind::Mixed { r },
        witness_mode: WitnessMode::None,
        bounds: WitnessBounds::default(),
        witness_cache: Mutex::default(),
    }
}

/// The canonical enumeration of every connected port-numbered graph up to
/// the cap, viewed as a family.
pub fn all_graphs_family(cap: usize) -> Family {
    Family {
        name: "all-graphs".into(),
        kind: FamilyKind::AllGraphs { cap },
        witness_mode: WitnessMode::None,
        bounds: WitnessBounds::default(),
        witness_cache: Mutex::default(),
    }
}

/// Resolves registry names: `c`, `rings`, `trees`, `fstar:r=<R>`,
/// `all-graphs`.
pub fn family_by_name(name: &str) -> Result<Family, FamilyError> {
    if let Some(rest) = name.strip_prefix("fstar:r=") {
        let r = rest
            .parse()
            .map_err(|_| FamilyError::UnknownFamily(name.into()))?;
        return Ok(mixed_family(r));
    }
    match name {
        "c" => Ok(pendant_ring_family()),
        "rings" => Ok(clockwise_ring_family()),
        "trees" => Ok(tree_family()),
        "all-graphs" => Ok(all_graphs_family(crate::enumerate::MAX_GRAPH_SIZE)),
        _ => Err(FamilyError::UnknownFamily(name.into())),
    }
}

impl Family {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The `i`-th member (1-based).
    pub fn enumerate(&self, i: usize) -> Result<Arc<PortGraph>, FamilyError> {
        assert!(i >= 1, "family indices are 1-based");
        match &self.kind {
            FamilyKind::PendantRings => Ok(Arc::new(pendant_ring(i + 2).unwrap())),
            FamilyKind::ClockwiseRings => Ok(Arc::new(ring(i + 2).unwrap())),
            FamilyKind::Trees { cap } => Ok(nth_tree(i, *cap)?),
            FamilyKind::Mixed { r } => {
                if i <= *r {
                    Ok(Arc::new(pendant_ring(i + 2).unwrap()))
                } else {
                    Ok(Arc::new(studded_ring(i).unwrap()))
                }
            }
            FamilyKind::AllGraphs { cap } => Ok(nth_graph(i, *cap)?),
        }
    }

    /// Size of the `i`-th member, without building it where a closed form
    /// exists.
    pub fn size(&self, i: usize) -> Result<usize, FamilyError> {
        match &self.kind {
            FamilyKind::PendantRings => Ok(i + 3),
            FamilyKind::ClockwiseRings => Ok(i + 2),
            FamilyKind::Mixed { r } => Ok(if i <= *r { i + 3 } else { 8 * i + 1 }),
            _ => Ok(self.enumerate(i)?.node_count()),
        }
    }

    pub fn has_witnesses(&self) -> bool {
        self.witness_mode != WitnessMode::None
    }

    /// The separation witness `(k, m)` for node `v` of member `i`.
    pub fn witness(&self, i: usize, v: NodeId) -> Result<(usize, usize), FamilyError> {
        let unavailable = || FamilyError::WitnessUnavailable {
            family: self.name.clone(),
            i,
            v,
        };
        match self.witness_mode {
            WitnessMode::None => Err(unavailable()),
            WitnessMode::TreeFormula => {
                let n = self.enumerate(i)?.node_count();
                Ok((n, self.last_index_of_size(n)))
            }
            WitnessMode::Computed => {
                let table = self.witness_table(i)?;
                table.get(v).copied().flatten().ok_or_else(unavailable)
            }
        }
    }

    /// Witnesses for all nodes of member `i`, computed in one pass and
    /// cached.
    fn witness_table(&self, i: usize) -> Result<WitnessTable, FamilyError> {
        if let Some(t) = self.witness_cache.lock().unwrap().get(&i) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(find_witnesses_all(self, i, self.bounds)?);
        let mut guard = self.witness_cache.lock().unwrap();
        let entry = guard.entry(i).or_insert_with(|| Arc::clone(&table));
        Ok(Arc::clone(entry))
    }

    fn last_index_of_size(&self, n: usize) -> usize {
        let FamilyKind::Trees { cap } = self.kind else {
            unreachable!("tree witness rule on a non-tree family");
        };
        assert!(n <= cap);
        (2..=n).map(|s| trees_of_size(s).len()).sum()
    }

    /// Non-explorability counterexample: a pair `(j, w)` with `j > m` whose
    /// node `w` has the same depth-`k` view as node `v` of member `i`. Only
    /// the ring family carries this rule; every clockwise ring node has the
    /// same view at every depth, so any later member works.
    pub fn counterexample(
        &self,
        _i: usize,
        _v: NodeId,
        k: usize,
        m: usize,
    ) -> Option<(usize, NodeId)> {
        match self.kind {
            FamilyKind::ClockwiseRings => Some((m.max(k) + 1, 0)),
            _ => None,
        }
    }

    pub fn bounds(&self) -> WitnessBounds {
        self.bounds
    }

    /// Largest enumerable index, if the family is capped.
    fn max_index(&self) -> Option<usize> {
        match &self.kind {
            FamilyKind::Trees { cap } => Some((2..=*cap).map(|s| trees_of_size(s).len()).sum()),
            FamilyKind::AllGraphs { cap } => Some(crate::enumerate::graphs_up_to(*cap)),
            _ => None,
        }
    }

    fn scan_end(&self, j_max: usize) -> usize {
        self.max_index().map_or(j_max, |m| m.min(j_max))
    }
}

/// For every node of `G_i`, the first depth at which it separates from all
/// nodes of `G_j`, or `usize::MAX` if that never happens within `k_max`.
fn separation_depths(gi: &PortGraph, gj: &PortGraph, k_max: usize) -> Vec<usize> {
    let refinement = PairRefinement::new(gi, gj, k_max);
    gi.nodes()
        .map(|v| {
            (0..=k_max)
                .find(|&k| gj.nodes().all(|w| !refinement.views_equal(v, w, k)))
                .unwrap_or(usize::MAX)
        })
        .collect()
}

/// The lexicographically first `(k, m)` within `bounds` for each node of
/// member `i`: the depth-`k` view from the node differs from every depth-`k`
/// view of every node of `G_j` for `m < j <= j_max`.
fn find_witnesses_all(
    f: &Family,
    i: usize,
    bounds: WitnessBounds,
) -> Result<Vec<Option<(usize, usize)>>, FamilyError> {
    let gi = f.enumerate(i)?;
    let scan_end = f.scan_end(bounds.j_max);
    // sep[j - 1][v] = first separating depth against member j.
    let mut sep: Vec<Vec<usize>> = Vec::with_capacity(scan_end);
    for j in 1..=scan_end {
        let gj = f.enumerate(j)?;
        sep.push(separation_depths(&gi, &gj, bounds.k_max));
    }
    Ok(gi
        .nodes()
        .map(|v| {
            for k in 1..=bounds.k_max {
                // Members still colliding at depth k force m up to their index.
                let worst = (1..=scan_end)
                    .filter(|&j| sep[j - 1][v] > k)
                    .max()
                    .unwrap_or(0);
                let m = worst.max(1);
                if m <= bounds.m_max {
                    return Some((k, m));
                }
            }
            None
        })
        .collect())
}

/// Public single-node witness search (see [`find_witnesses_all`]).
pub fn find_witness(
    f: &Family,
    i: usize,
    v: NodeId,
    bounds: WitnessBounds,
) -> Result<Option<(usize, usize)>, FamilyError> {
    Ok(find_witnesses_all(f, i, bounds)?.get(v).copied().flatten())
}

/// Checks the witness property directly: the depth-`k` view from `v` in
/// `G_i` differs from every depth-`k` view of every node of `G_j` for all
/// `m < j <= j_max` (clamped to the family's enumerable prefix).
pub fn verify_witness_prefix(
    f: &Family,
    i: usize,
    v: NodeId,
    k: usize,
    m: usize,
    j_max: usize,
) -> Result<bool, FamilyError> {
    let gi = f.enumerate(i)?;
    for j in (m + 1)..=f.scan_end(j_max) {
        let gj = f.enumerate(j)?;
        let refinement = PairRefinement::new(&gi, &gj, k);
        if gj.nodes().any(|w| refinement.views_equal(v, w, k)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Primes the witness cache from a table produced by
/// [`witness_table_lines`]. Lines for other families are ignored; a member
/// is only adopted when every one of its nodes is present and the recorded
/// `j_max` is at least the family's current bound (a narrower scan must not
/// shadow a wider one). Returns the number of members adopted.
pub fn load_witness_table(f: &Family, text: &str) -> usize {
    let mut per_member: HashMap<usize, Vec<(usize, usize, usize)>> = HashMap::new();
    for line in text.lines() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != f.name() {
            continue;
        }
        let parsed: Option<Vec<usize>> = fields[1..].iter().map(|w| w.parse().ok()).collect();
        let Some(nums) = parsed else { continue };
        let (i, v, k, m, j_max) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
        if j_max >= f.bounds.j_max {
            per_member.entry(i).or_default().push((v, k, m));
        }
    }
    let mut adopted = 0;
    for (i, entries) in per_member {
        let Ok(g) = f.enumerate(i) else { continue };
        let mut table = vec![None; g.node_count()];
        for (v, k, m) in entries {
            if v < table.len() {
                table[v] = Some((k, m));
            }
        }
        if table.iter().all(Option::is_some) {
            f.witness_cache
                .lock()
                .unwrap()
                .insert(i, Arc::new(table));
            adopted += 1;
        }
    }
    adopted
}

/// One line per cached witness: `family i v k m j_max`.
pub fn witness_table_lines(f: &Family) -> String {
    let cache = f.witness_cache.lock().unwrap();
    let mut entries: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (&i, table) in cache.iter() {
        for (v, w) in table.iter().enumerate() {
            if let Some((k, m)) = w {
                entries.push((i, v, *k, *m));
            }
        }
    }
    entries.sort();
    entries
        .into_iter()
        .map(|(i, v, k, m)| format!("{} {i} {v} {k} {m} {}\n", f.name(), f.bounds.j_max))
        .collect()
}
