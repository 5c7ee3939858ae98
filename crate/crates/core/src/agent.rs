//! Deterministic execution of reactive agents on port graphs.
//!
//! An agent observes, at each node, only the degree and the port by which it
//! entered (nothing at the start node), and reacts with a move through a port
//! or a stop. The runtime applies moves, records every step, and never trusts
//! the agent: an out-of-range move aborts the run with a fault status rather
//! than a panic.
//!
//! Agents may additionally be wired to query hooks (a family enumerator, a
//! membership test, or a yes/no oracle). Hook calls are answered
//! synchronously and cost no movement steps; they are logged with the number
//! of moves completed when they were issued, so that executions can be
//! compared and replayed query-for-query.

use std::cell::{Cell, RefCell};
use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;

use crate::graph::{NodeId, PortGraph};

/// What an agent perceives upon arriving at a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    /// Degree of the current node.
    pub degree: usize,
    /// Port by which the node was entered; `None` at the start node.
    pub entry_port: Option<usize>,
}

/// An agent's reaction to an observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentAction {
    Move(usize),
    Stop,
}

/// A deterministic reactive agent. The runtime calls [`Agent::act`] once per
/// decision; every call must yield a move or a stop.
pub trait Agent {
    fn act(&mut self, obs: &Observation) -> AgentAction;
}

/// One executed move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub exit_port: usize,
    pub entered: NodeId,
    pub entry_port: usize,
    pub degree: usize,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    /// The agent emitted [`AgentAction::Stop`].
    Stopped,
    /// The move budget ran out before the agent stopped.
    StepLimit,
    /// The agent emitted an invalid move; kept distinct so that a crash is
    /// never mistaken for a legitimate outcome.
    Faulted(String),
}

/// A logged hook or oracle interaction. `step` is the number of moves the
/// agent had completed when the query was issued.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRecord {
    pub step: usize,
    pub detail: QueryDetail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryDetail {
    /// "Is the i-th family member isomorphic to the j-th candidate graph?"
    IsNthMember { i: usize, j: usize, answer: bool },
    /// "Is the depth witness of (v, i) equal to j?"
    DepthWitnessIs { i: usize, v: NodeId, j: usize, answer: bool },
    /// "Is the range witness of (v, i) equal to j?"
    RangeWitnessIs { i: usize, v: NodeId, j: usize, answer: bool },
    /// Enumeration hook call: the i-th member was requested and a graph of
    /// the recorded size returned.
    Enumerate { i: usize, size: usize },
    /// Membership hook call on a graph of the recorded size.
    Member { size: usize, answer: bool },
    /// A plugged-in family predicate, addressed by name.
    Predicate { name: String, answer: bool },
}

/// Shared, clonable log that hooks write into while the runtime advances the
/// step counter. Single-run, single-threaded by design.
#[derive(Clone, Default)]
pub struct QueryLog {
    records: Rc<RefCell<Vec<QueryRecord>>>,
    step: Rc<Cell<usize>>,
}

impl QueryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, detail: QueryDetail) {
        self.records.borrow_mut().push(QueryRecord {
            step: self.step.get(),
            detail,
        });
    }

    pub fn snapshot(&self) -> Vec<QueryRecord> {
        self.records.borrow().clone()
    }

    fn set_step(&self, step: usize) {
        self.step.set(step);
    }
}

/// A recorded execution.
#[derive(Debug, Clone)]
pub struct Trace {
    pub start: NodeId,
    pub steps: Vec<Step>,
    pub status: RunStatus,
    pub queries: Vec<QueryRecord>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Node occupied after the last recorded step.
    pub fn final_node(&self) -> NodeId {
        self.steps.last().map_or(self.start, |s| s.entered)
    }

    /// Node occupied after exactly `k` steps.
    pub fn node_at(&self, k: usize) -> NodeId {
        if k == 0 {
            self.start
        } else {
            self.steps[k - 1].entered
        }
    }

    /// All nodes touched, including the start.
    pub fn visited(&self) -> HashSet<NodeId> {
        let mut set: HashSet<NodeId> = self.steps.iter().map(|s| s.entered).collect();
        set.insert(self.start);
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    InvalidStart { start: NodeId, size: usize },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::InvalidStart { start, size } => {
                write!(f, "start node {start} out of range for graph of size {size}")
            }
        }
    }
}

impl std::error::Error for RunError {}

/// Executes `agent` on `g` from `start` for at most `limit` moves.
pub fn run(
    agent: &mut dyn Agent,
    g: &PortGraph,
    start: NodeId,
    limit: usize,
) -> Result<Trace, RunError> {
    run_logged(agent, g, start, limit, &QueryLog::new())
}

/// [`run`] with an externally created query log; hooks wired to the same log
/// have their calls appear in the trace with correct step indices.
pub fn run_logged(
    agent: &mut dyn Agent,
    g: &PortGraph,
    start: NodeId,
    limit: usize,
    log: &QueryLog,
) -> Result<Trace, RunError> {
    if start >= g.node_count() {
        return Err(RunError::InvalidStart {
            start,
            size: g.node_count(),
        });
    }
    let mut current = start;
    let mut obs = Observation {
        degree: g.degree(start),
        entry_port: None,
    };
    let mut steps: Vec<Step> = Vec::new();
    let status = loop {
        if steps.len() >= limit {
            // One last decision is intentionally *not* offered: the budget
            // counts moves, and an agent that has not stopped within the
            // budget is over it.
            break RunStatus::StepLimit;
        }
        log.set_step(steps.len());
        match agent.act(&obs) {
            AgentAction::Stop => break RunStatus::Stopped,
            AgentAction::Move(p) => {
                if p >= g.degree(current) {
                    break RunStatus::Faulted(format!(
                        "move through port {p} at a node of degree {}",
                        g.degree(current)
                    ));
                }
                let (v, q) = g.step(current, p);
                steps.push(Step {
                    exit_port: p,
                    entered: v,
                    entry_port: q,
                    degree: g.degree(v),
                });
                current = v;
                obs = Observation {
                    degree: g.degree(v),
                    entry_port: Some(q),
                };
            }
        }
    };
    log.set_step(steps.len());
    Ok(Trace {
        start,
        steps,
        status,
        queries: log.snapshot(),
    })
}

/// Did the trace visit all of `g` and stop?
pub fn is_full_exploration(t: &Trace, g: &PortGraph) -> bool {
    t.status == RunStatus::Stopped && t.visited().len() == g.node_count()
}

/// Agent-observable equality of two executions over their first `k` moves:
/// exit ports, entry ports, and degrees coincide step by step (node handles
/// are invisible and deliberately not compared), and so do all queries issued
/// up to and including step `k`.
pub fn traces_prefix_equal(t1: &Trace, t2: &Trace, k: usize) -> bool {
    let k1 = k.min(t1.len());
    let k2 = k.min(t2.len());
    if k1 != k2 {
        return false;
    }
    for (a, b) in t1.steps[..k1].iter().zip(&t2.steps[..k2]) {
        if a.exit_port != b.exit_port || a.entry_port != b.entry_port || a.degree != b.degree {
            return false;
        }
    }
    let upto = |t: &Trace| -> Vec<QueryRecord> {
        t.queries.iter().filter(|q| q.step <= k).cloned().collect()
    };
    upto(t1) == upto(t2)
}
