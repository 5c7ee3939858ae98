//! Universal exploration through a yes/no oracle.
//!
//! The oracle knows the input family completely but answers only yes or no,
//! truthfully, over three query schemas: "is the i-th member isomorphic to
//! candidate j?", "is the depth witness of (v, i) equal to j?", and "is the
//! range witness of (v, i) equal to j?". An agent wired to such an oracle
//! can explore any graph of any family with verified witnesses, without the
//! family being hardwired: it reconstructs members and witnesses query by
//! query and otherwise behaves exactly like the dedicated explorer.
//!
//! Candidate graphs for the first schema come from a fixed deterministic
//! stream: the full canonical enumeration up to a size cap, then per-size
//! extension buckets holding the recognizable constructions (all trees,
//! the plain ring, the pendant ring, the studded ring) so that scans for
//! family members beyond the exhaustively enumerable sizes stay tractable.
//! The stream stays pairwise non-isomorphic, so answers are unambiguous.

use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::agent::{Agent, AgentAction, Observation, QueryDetail, QueryLog};
use crate::enumerate::{graphs_of_size, trees_of_size, MAX_GRAPH_SIZE, MAX_TREE_SIZE};
use crate::explore::{CheckEvent, CheckRun, SubStep};
use crate::family::{Family, FamilyError};
use crate::graph::{pendant_ring, ring, studded_ring, NodeId, PortGraph};
use crate::uxs::{sequence_for_bound, SequenceAgent, UxsConfig};
use crate::view::unfold_view;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The backing family has no witness for the queried pair; a fault, not
    /// a "no".
    WitnessFault { i: usize, v: NodeId },
    /// The candidate stream (or the family) ran out before a yes.
    ResourceCap { detail: String },
    Family(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::WitnessFault { i, v } => {
                write!(f, "oracle fault: no witness recorded for node {v} of member {i}")
            }
            OracleError::ResourceCap { detail } => write!(f, "resource cap: {detail}"),
            OracleError::Family(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for OracleError {}

impl From<FamilyError> for OracleError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::WitnessUnavailable { i, v, .. } => OracleError::WitnessFault { i, v },
            FamilyError::Enumeration(c) => OracleError::ResourceCap {
                detail: c.to_string(),
            },
            other => OracleError::Family(other.to_string()),
        }
    }
}

/// Shape of the candidate stream.
#[derive(Debug, Clone)]
pub struct StreamConfig {
    /// Sizes up to this bound come from the full canonical enumeration.
    pub canonical_cap: usize,
    /// Last size served by the construction buckets.
    pub max_size: usize,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            canonical_cap: 4,
            max_size: 64,
        }
    }
}

/// The `j`-th candidate graph (1-based).
pub fn stream_candidate(j: usize, config: &StreamConfig) -> Result<Arc<PortGraph>, OracleError> {
    assert!(j >= 1);
    let mut remaining = j - 1;
    let cap = config.canonical_cap.min(MAX_GRAPH_SIZE);
    for n in 2..=cap {
        let bucket = graphs_of_size(n);
        if remaining < bucket.len() {
            return Ok(Arc::clone(&bucket[remaining]));
        }
        remaining -= bucket.len();
    }
    for n in cap + 1..=config.max_size {
        let bucket = extension_bucket(n);
        if remaining < bucket.len() {
            return Ok(bucket[remaining].clone());
        }
        remaining -= bucket.len();
    }
    Err(OracleError::ResourceCap {
        detail: format!(
            "candidate stream exhausted at index {j} (max size {})",
            config.max_size
        ),
    })
}

/// Construction graphs of exactly size `n`, pairwise non-isomorphic: trees
/// are acyclic, the ring is 2-regular, the pendant ring has degree-1 and
/// degree-3 nodes, the studded ring a degree-4 node.
fn extension_bucket(n: usize) -> Vec<Arc<PortGraph>> {
    let mut bucket = Vec::new();
    if n <= MAX_TREE_SIZE {
        bucket.extend(trees_of_size(n).iter().cloned());
    }
    if n >= 3 {
        bucket.push(Arc::new(ring(n).unwrap()));
    }
    if n >= 4 {
        bucket.push(Arc::new(pendant_ring(n - 1).unwrap()));
    }
    if n >= 9 && (n - 1).is_multiple_of(8) {
        bucket.push(Arc::new(studded_ring((n - 1) / 8).unwrap()));
    }
    bucket
}

/// Truthful yes/no oracle backed by a family with witnesses; every query is
/// logged together with its answer. Canonical codes of members and stream
/// candidates are cached, since the member scans revisit the same graphs
/// thousands of times.
pub struct YesNoOracle {
    family: Arc<Family>,
    stream: StreamConfig,
    log: QueryLog,
    member_codes: std::cell::RefCell<std::collections::HashMap<usize, crate::canon::CanonicalCode>>,
    candidate_codes:
        std::cell::RefCell<std::collections::HashMap<usize, crate::canon::CanonicalCode>>,
}

impl YesNoOracle {
    pub fn new(family: Arc<Family>, stream: StreamConfig, log: QueryLog) -> Self {
        YesNoOracle {
            family,
            stream,
            log,
            member_codes: Default::default(),
            candidate_codes: Default::default(),
        }
    }

    pub fn family(&self) -> &Arc<Family> {
        &self.family
    }

    /// Schema 1: is the `i`-th member isomorphic to stream candidate `j`?
    pub fn is_nth_member(&self, i: usize, j: usize) -> Result<bool, OracleError> {
        let member_code = match self.member_codes.borrow_mut().entry(i) {
            std::collections::hash_map::Entry::Occupied(e) => e.get().clone(),
            std::collections::hash_map::Entry::Vacant(e) => {
                let g = self.family.enumerate(i)?;
                e.insert(crate::canon::canonical_code(&g)).clone()
            }
        };
        let candidate_code = match self.candidate_codes.borrow_mut().entry(j) {
            std::collections::hash_map::Entry::Occupied(e) => e.get().clone(),
            std::collections::hash_map::Entry::Vacant(e) => {
                let g = stream_candidate(j, &self.stream)?;
                e.insert(crate::canon::canonical_code(&g)).clone()
            }
        };
        let answer = member_code == candidate_code;
        self.log.record(QueryDetail::IsNthMember { i, j, answer });
        Ok(answer)
    }

    /// Schema 2: is the depth witness of `(v, i)` equal to `j`?
    pub fn depth_witness_is(&self, i: usize, v: NodeId, j: usize) -> Result<bool, OracleError> {
        let (k, _) = self.family.witness(i, v)?;
        let answer = k == j;
        self.log.record(QueryDetail::DepthWitnessIs { i, v, j, answer });
        Ok(answer)
    }

    /// Schema 3: is the range witness of `(v, i)` equal to `j`?
    pub fn range_witness_is(&self, i: usize, v: NodeId, j: usize) -> Result<bool, OracleError> {
        let (_, m) = self.family.witness(i, v)?;
        let answer = m == j;
        self.log.record(QueryDetail::RangeWitnessIs { i, v, j, answer });
        Ok(answer)
    }

    /// Extension point beyond the three schemas the exploration algorithm
    /// needs: any pluggable family predicate can be asked as a yes/no
    /// question. Replaying such records requires handing the same evaluator
    /// to [`replay_query_log`].
    pub fn satisfies(&self, predicate: &dyn FamilyPredicate) -> Result<bool, OracleError> {
        let answer = predicate.holds(&self.family)?;
        self.log.record(QueryDetail::Predicate {
            name: predicate.name().to_string(),
            answer,
        });
        Ok(answer)
    }
}

/// A yes/no question about a whole family, evaluated on the oracle side.
pub trait FamilyPredicate {
    fn name(&self) -> &str;
    fn holds(&self, family: &Arc<Family>) -> Result<bool, OracleError>;
}

/// Asks "is the i-th member candidate j?" for j = 1, 2, ... until yes, and
/// returns that member. The graph handed back uses the family's own node
/// indexing, so witness queries about its nodes line up exactly.
pub fn find_ith_graph(oracle: &YesNoOracle, i: usize) -> Result<Arc<PortGraph>, OracleError> {
    let mut j = 1;
    loop {
        if oracle.is_nth_member(i, j)? {
            return Ok(oracle.family.enumerate(i)?);
        }
        j += 1;
    }
}

/// Asks "is the depth witness of (v, i) equal to j?" for j = 1, 2, ...
pub fn find_depth_witness(oracle: &YesNoOracle, i: usize, v: NodeId) -> Result<usize, OracleError> {
    let mut j = 1;
    loop {
        if oracle.depth_witness_is(i, v, j)? {
            return Ok(j);
        }
        j += 1;
    }
}

/// Asks "is the range witness of (v, i) equal to j?" for j = 1, 2, ...
pub fn find_range_witness(oracle: &YesNoOracle, i: usize, v: NodeId) -> Result<usize, OracleError> {
    let mut j = 1;
    loop {
        if oracle.range_witness_is(i, v, j)? {
            return Ok(j);
        }
        j += 1;
    }
}

/// Recomputes every logged answer against the family; true when the log
/// replays identically. Records of plugged-in predicates need
/// [`replay_query_log_with`] and the matching evaluators.
pub fn replay_query_log(
    family: &Arc<Family>,
    stream: &StreamConfig,
    records: &[crate::agent::QueryRecord],
) -> Result<bool, OracleError> {
    replay_query_log_with(family, stream, records, &[])
}

/// [`replay_query_log`] with evaluators for predicate records, matched by
/// name.
pub fn replay_query_log_with(
    family: &Arc<Family>,
    stream: &StreamConfig,
    records: &[crate::agent::QueryRecord],
    predicates: &[&dyn FamilyPredicate],
) -> Result<bool, OracleError> {
    let mut member_codes: std::collections::HashMap<usize, crate::canon::CanonicalCode> =
        Default::default();
    let mut candidate_codes: std::collections::HashMap<usize, crate::canon::CanonicalCode> =
        Default::default();
    for record in records {
        let ok = match record.detail {
            QueryDetail::IsNthMember { i, j, answer } => {
                let member_code = match member_codes.entry(i) {
                    std::collections::hash_map::Entry::Occupied(e) => e.get().clone(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        let g = family.enumerate(i)?;
                        e.insert(crate::canon::canonical_code(&g)).clone()
                    }
                };
                let candidate_code = match candidate_codes.entry(j) {
                    std::collections::hash_map::Entry::Occupied(e) => e.get().clone(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        let g = stream_candidate(j, stream)?;
                        e.insert(crate::canon::canonical_code(&g)).clone()
                    }
                };
                (member_code == candidate_code) == answer
            }
            QueryDetail::DepthWitnessIs { i, v, j, answer } => {
                (family.witness(i, v)?.0 == j) == answer
            }
            QueryDetail::RangeWitnessIs { i, v, j, answer } => {
                (family.witness(i, v)?.1 == j) == answer
            }
            QueryDetail::Predicate { ref name, answer } => {
                match predicates.iter().find(|p| p.name() == name) {
                    Some(p) => p.holds(family)? == answer,
                    None => false,
                }
            }
            // Hook records belong to candidate runs, not oracle runs.
            _ => false,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

const SCAN_TRANSITION_BUDGET: usize = 100_000;

enum UniversalPhase {
    Scan,
    Tail(SequenceAgent),
    Done,
}

/// The oracle-driven universal explorer (registry name
/// `universal-oracle:<family>`). Structurally the dedicated explorer, with
/// every piece of family knowledge replaced by query loops: each candidate
/// member is fetched by [`find_ith_graph`], its witness depth by
/// [`find_depth_witness`]; after the first successful check the range
/// witness and the members it bounds are fetched the same way, and the run
/// ends with the same sequence replay the dedicated explorer would use.
pub struct UniversalAgent {
    oracle: Rc<YesNoOracle>,
    config: UxsConfig,
    phase: UniversalPhase,
    scan_i: usize,
    scan_v: usize,
    member: Option<Arc<PortGraph>>,
    check: Option<CheckRun>,
    check_started_at: usize,
    moves: usize,
    found: Option<(NodeId, usize)>,
    events: Vec<CheckEvent>,
    spinning: bool,
}

pub fn universal_exploration_agent(oracle: Rc<YesNoOracle>, config: UxsConfig) -> UniversalAgent {
    UniversalAgent {
        oracle,
        config,
        phase: UniversalPhase::Scan,
        scan_i: 1,
        scan_v: 0,
        member: None,
        check: None,
        check_started_at: 0,
        moves: 0,
        found: None,
        events: Vec::new(),
        spinning: false,
    }
}

impl UniversalAgent {
    pub fn found(&self) -> Option<(NodeId, usize)> {
        self.found
    }

    pub fn events(&self) -> &[CheckEvent] {
        &self.events
    }

    fn emit_move(&mut self, p: usize) -> AgentAction {
        self.moves += 1;
        AgentAction::Move(p)
    }

    /// Fetch the range witness and all members it bounds, then start the
    /// sized replay.
    fn start_tail(&mut self, i: usize, v: NodeId) -> Result<(), OracleError> {
        let m = find_range_witness(&self.oracle, i, v)?;
        let mut max_size = 0;
        for t in 1..=m {
            let member = find_ith_graph(&self.oracle, t)?;
            max_size = max_size.max(member.node_count());
        }
        let seq = sequence_for_bound(max_size, &self.config).map_err(|e| {
            OracleError::ResourceCap {
                detail: e.to_string(),
            }
        })?;
        self.phase = UniversalPhase::Tail(SequenceAgent::new(seq));
        Ok(())
    }
}

impl Agent for UniversalAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        if self.spinning {
            return self.emit_move(0);
        }
        for _ in 0..SCAN_TRANSITION_BUDGET {
            match &mut self.phase {
                UniversalPhase::Done => return AgentAction::Stop,
                UniversalPhase::Tail(seq) => {
                    return match seq.act(obs) {
                        AgentAction::Stop => {
                            self.phase = UniversalPhase::Done;
                            AgentAction::Stop
                        }
                        AgentAction::Move(p) => self.emit_move(p),
                    };
                }
                UniversalPhase::Scan => {
                    if self.check.is_none() {
                        if self
                            .member
                            .as_ref()
                            .is_some_and(|g| self.scan_v >= g.node_count())
                        {
                            self.scan_i += 1;
                            self.scan_v = 0;
                            self.member = None;
                        }
                        // The member and its witness depth are re-fetched by
                        // queries for every (v, i) pair, as the scan demands.
                        let member = match find_ith_graph(&self.oracle, self.scan_i) {
                            Ok(g) => g,
                            Err(_) => {
                                self.spinning = true;
                                return self.emit_move(0);
                            }
                        };
                        self.member = Some(Arc::clone(&member));
                        let v = self.scan_v;
                        let Ok(k) = find_depth_witness(&self.oracle, self.scan_i, v) else {
                            self.spinning = true;
                            return self.emit_move(0);
                        };
                        let target = unfold_view(&member, v, k).expect("member node is valid");
                        self.check = Some(CheckRun::new(&target));
                        self.check_started_at = self.moves;
                    }
                    match self.check.as_mut().unwrap().next(obs) {
                        SubStep::Move(p) => return self.emit_move(p),
                        SubStep::Done(success) => {
                            self.events.push(CheckEvent {
                                i: self.scan_i,
                                v: self.scan_v,
                                start_step: self.check_started_at,
                                end_step: self.moves,
                                success,
                            });
                            self.check = None;
                            if success {
                                let (v, i) = (self.scan_v, self.scan_i);
                                self.found = Some((v, i));
                                if self.start_tail(i, v).is_err() {
                                    self.spinning = true;
                                    return self.emit_move(0);
                                }
                            } else {
                                self.scan_v += 1;
                            }
                        }
                    }
                }
            }
        }
        self.spinning = true;
        self.emit_move(0)
    }
}
