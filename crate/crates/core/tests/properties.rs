//! Property tests for the invariants that hold across the whole graph space
//! rather than on specific constructions.

use std::sync::Arc;

use proptest::prelude::*;

use explore_core::agent::{run, traces_prefix_equal, Agent, AgentAction, Observation};
use explore_core::enumerate::graphs_of_size;
use explore_core::graph::PortGraph;
use explore_core::uxs::uxs_walk;
use explore_core::view::{node_views_equal, PairRefinement};

fn small_graph(index: usize) -> Arc<PortGraph> {
    // A stable pool: all graphs of sizes 2..=4.
    let mut pool = Vec::new();
    for n in 2..=4 {
        pool.extend(graphs_of_size(n).iter().cloned());
    }
    Arc::clone(&pool[index % pool.len()])
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic agent whose decisions depend only on the observation
/// sequence: hash-chained state drives port choice and occasional stops.
struct HashChainAgent {
    state: u64,
}

impl Agent for HashChainAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        self.state ^= (obs.degree as u64) << 32;
        self.state ^= obs.entry_port.map_or(u64::MAX, |p| p as u64);
        let roll = splitmix(&mut self.state);
        if roll.is_multiple_of(17) {
            AgentAction::Stop
        } else {
            AgentAction::Move(roll as usize % obs.degree)
        }
    }
}

proptest! {
    /// Equal views at depth k+1 imply equal views at depth k.
    #[test]
    fn view_equality_is_monotone(ga in 0usize..200, gb in 0usize..200, k in 0usize..7) {
        let g = small_graph(ga);
        let h = small_graph(gb);
        let refinement = PairRefinement::new(&g, &h, k + 1);
        for v in g.nodes() {
            for w in h.nodes() {
                if refinement.views_equal(v, w, k + 1) {
                    prop_assert!(refinement.views_equal(v, w, k));
                }
            }
        }
    }

    /// Any deterministic hook-free agent behaves identically for its first k
    /// moves when started at nodes with equal depth-(k+1) views.
    #[test]
    fn equal_views_pin_agent_behavior(
        ga in 0usize..200,
        gb in 0usize..200,
        k in 0usize..6,
        seed in any::<u64>(),
    ) {
        let g = small_graph(ga);
        let h = small_graph(gb);
        for v in g.nodes() {
            for w in h.nodes() {
                if !node_views_equal(&g, v, &h, w, k + 1) {
                    continue;
                }
                let t1 = run(&mut HashChainAgent { state: seed }, &g, v, k).unwrap();
                let t2 = run(&mut HashChainAgent { state: seed }, &h, w, k).unwrap();
                prop_assert!(
                    traces_prefix_equal(&t1, &t2, k),
                    "divergence within {k} steps from equal views"
                );
            }
        }
    }

    /// Re-running a deterministic agent reproduces its trace bit for bit.
    #[test]
    fn runs_replay_exactly(gi in 0usize..200, start_pick in 0usize..8, seed in any::<u64>(), limit in 0usize..40) {
        let g = small_graph(gi);
        let start = start_pick % g.node_count();
        let t1 = run(&mut HashChainAgent { state: seed }, &g, start, limit).unwrap();
        let t2 = run(&mut HashChainAgent { state: seed }, &g, start, limit).unwrap();
        prop_assert_eq!(t1.steps, t2.steps);
        prop_assert_eq!(t1.status, t2.status);
    }

    /// Offset walks commute with port-preserving relabelings.
    #[test]
    fn offset_walks_are_equivariant(
        gi in 0usize..200,
        start_pick in 0usize..8,
        offsets in proptest::collection::vec(0usize..8, 0..24),
        perm_seed in any::<u64>(),
    ) {
        let g = small_graph(gi);
        let n = g.node_count();
        // Deterministic permutation from the seed (Fisher-Yates).
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = perm_seed;
        for i in (1..n).rev() {
            let j = splitmix(&mut state) as usize % (i + 1);
            perm.swap(i, j);
        }
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
        let start = start_pick % n;
        let a = uxs_walk(&g, start, &offsets);
        let b = uxs_walk(&h, perm[start], &offsets);
        for v in 0..n {
            prop_assert_eq!(a[v], b[perm[v]]);
        }
    }
}
