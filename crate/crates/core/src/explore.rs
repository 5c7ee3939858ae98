//! Exploration agents.
//!
//! * [`basic_walk_tree_agent`]: explores any tree and stops at the start.
//! * [`CheckRun`]: the view-probing subroutine shared by the general
//!   explorers. It walks, in lexicographic order, every maximal
//!   non-backtracking path of a target view, returning to its start node
//!   after each path by reversing it, and reports whether the local view
//!   matches the target. The agent is back at its start node whichever way
//!   the check ends.
//! * [`ExploAgent`]: scans family members in order, checks each node's
//!   witness view against its surroundings, and once a check succeeds
//!   finishes with a sequence replay sized by the range witness.
//! * [`pendant_ring_agent`], [`studded_ring_sweep`], [`mixed_family_agent`]:
//!   the dedicated walkers for the concrete families, hardwired to their
//!   shapes.

use std::sync::Arc;

use crate::agent::{Agent, AgentAction, Observation};
use crate::family::Family;
use crate::graph::NodeId;
use crate::uxs::{sequence_for_bound, SequenceAgent, UxsConfig};
use crate::view::{unfold_view, TruncatedView};

// ---------------------------------------------------------------------------
// Tree walk
// ---------------------------------------------------------------------------

/// Depth-first tree explorer. It descends unexplored ports in increasing
/// order, backtracks through the entry port when a node is exhausted, and
/// stops once the start node has no ports left. On a tree every descent
/// reaches a fresh node, so the walk is an Euler tour: `2(n-1)` moves, ending
/// at the start. Behavior on cyclic graphs is unspecified (the walk never
/// terminates on its own; callers bound it with the run limit).
pub struct TreeWalkAgent {
    stack: Vec<Frame>,
    started: bool,
    descending: bool,
}

struct Frame {
    entry: Option<usize>,
    next_port: usize,
    degree: usize,
}

/// Fresh tree explorer (registry name `basic-walk-tree`).
pub fn basic_walk_tree_agent() -> TreeWalkAgent {
    TreeWalkAgent {
        stack: Vec::new(),
        started: false,
        descending: false,
    }
}

impl Agent for TreeWalkAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        if !self.started {
            self.started = true;
            self.stack.push(Frame {
                entry: None,
                next_port: 0,
                degree: obs.degree,
            });
        } else if self.descending {
            self.stack.push(Frame {
                entry: obs.entry_port,
                next_port: 0,
                degree: obs.degree,
            });
        }
        let frame = self.stack.last_mut().expect("stack never empties mid-run");
        while frame.next_port < frame.degree && Some(frame.next_port) == frame.entry {
            frame.next_port += 1;
        }
        if frame.next_port < frame.degree {
            let p = frame.next_port;
            frame.next_port += 1;
            self.descending = true;
            return AgentAction::Move(p);
        }
        // Node exhausted: climb, or stop if this is the start node.
        let frame = self.stack.pop().unwrap();
        match frame.entry {
            None => AgentAction::Stop,
            Some(q) => {
                self.descending = false;
                AgentAction::Move(q)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// View checking
// ---------------------------------------------------------------------------

/// Expected shape of one move along a probe path.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PathStep {
    exit: usize,
    entry: usize,
    degree: usize,
}

/// Outcome of feeding one observation to a subroutine.
pub enum SubStep {
    Move(usize),
    Done(bool),
}

/// Probes whether the view around the agent's current node matches a target
/// view. See the module docs for the traversal discipline. A root degree
/// mismatch fails without any move; any later mismatch (wrong entry port or
/// wrong degree, which covers reaching a leaf too early) unwinds the walked
/// prefix by the reversed entry ports and fails. Failure short-circuits: the
/// success answer could not change once one path mismatches, and the
/// position-restoration contract is kept either way.
pub struct CheckRun {
    root_degree: usize,
    paths: Vec<Vec<PathStep>>,
    state: CheckState,
    path_idx: usize,
    steps_done: usize,
    entries: Vec<usize>,
    fail_pending: bool,
}

enum CheckState {
    Init,
    Outbound,
    Unwinding,
}

impl CheckRun {
    /// Prepares a check against `target`; path order is lexicographic on
    /// exit-port sequences.
    pub fn new(target: &TruncatedView) -> Self {
        CheckRun {
            root_degree: target.root_degree(),
            paths: maximal_paths(target),
            state: CheckState::Init,
            path_idx: 0,
            steps_done: 0,
            entries: Vec::new(),
            fail_pending: false,
        }
    }

    /// Drives the check with the latest observation. Returns either the next
    /// move or the final verdict; after a verdict the agent stands exactly
    /// where the check began.
    pub fn next(&mut self, obs: &Observation) -> SubStep {
        match self.state {
            CheckState::Init => {
                if obs.degree != self.root_degree {
                    return SubStep::Done(false);
                }
                if self.paths.is_empty() {
                    return SubStep::Done(true);
                }
                self.state = CheckState::Outbound;
                SubStep::Move(self.paths[0][0].exit)
            }
            CheckState::Outbound => {
                let expected = &self.paths[self.path_idx][self.steps_done];
                let actual_entry = obs.entry_port.expect("outbound arrival has an entry port");
                self.entries.push(actual_entry);
                if actual_entry != expected.entry || obs.degree != expected.degree {
                    self.fail_pending = true;
                    self.state = CheckState::Unwinding;
                    return SubStep::Move(self.entries.pop().unwrap());
                }
                self.steps_done += 1;
                if self.steps_done == self.paths[self.path_idx].len() {
                    self.state = CheckState::Unwinding;
                    SubStep::Move(self.entries.pop().unwrap())
                } else {
                    SubStep::Move(self.paths[self.path_idx][self.steps_done].exit)
                }
            }
            CheckState::Unwinding => {
                if let Some(q) = self.entries.pop() {
                    return SubStep::Move(q);
                }
                // Back at the start node.
                if self.fail_pending {
                    return SubStep::Done(false);
                }
                self.path_idx += 1;
                if self.path_idx == self.paths.len() {
                    return SubStep::Done(true);
                }
                self.steps_done = 0;
                self.state = CheckState::Outbound;
                SubStep::Move(self.paths[self.path_idx][0].exit)
            }
        }
    }
}

/// All maximal non-backtracking paths of a view, in lexicographic order of
/// their exit-port sequences. A path ends at the view's depth bound or when
/// the only continuation would backtrack (degree-1 arrival).
fn maximal_paths(view: &TruncatedView) -> Vec<Vec<PathStep>> {
    let mut paths = Vec::new();
    let mut prefix = Vec::new();
    descend(view, view.root_index(), None, 0, &mut prefix, &mut paths);
    paths
}

fn descend(
    view: &TruncatedView,
    node: usize,
    entered_by: Option<usize>,
    depth: usize,
    prefix: &mut Vec<PathStep>,
    paths: &mut Vec<Vec<PathStep>>,
) {
    let mut extended = false;
    if depth < view.depth() {
        for (exit, (entry, child)) in view.children_of(node).into_iter().enumerate() {
            if Some(exit) == entered_by {
                continue;
            }
            extended = true;
            prefix.push(PathStep {
                exit,
                entry,
                degree: view.degree_of(child),
            });
            descend(view, child, Some(entry), depth + 1, prefix, paths);
            prefix.pop();
        }
    }
    if !extended && !prefix.is_empty() {
        paths.push(prefix.clone());
    }
}

// ---------------------------------------------------------------------------
// General family explorer
// ---------------------------------------------------------------------------

/// Boundaries of one check inside a scan, in agent move counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckEvent {
    pub i: usize,
    pub v: NodeId,
    pub start_step: usize,
    pub end_step: usize,
    pub success: bool,
}

/// Transitions one `act` call may burn scanning members whose checks fail
/// without moving; past this the agent degrades to spinning moves so that a
/// run on a host outside the family ends in the step limit instead of a
/// livelock.
const SCAN_TRANSITION_BUDGET: usize = 100_000;

enum ExploPhase {
    Scan,
    Tail(SequenceAgent),
    Done,
}

/// Witness-driven explorer dedicated to one family (registry name
/// `explo:<family>`). Wherever it starts in whichever member, the member
/// scan must reach a successful check — at latest at the true (member,
/// start) pair — and the range witness then bounds which members the host
/// can be, so replaying a sequence for their maximum size explores it.
pub struct ExploAgent {
    family: Arc<Family>,
    config: UxsConfig,
    phase: ExploPhase,
    scan_i: usize,
    scan_v: usize,
    member: Option<Arc<crate::graph::PortGraph>>,
    check: Option<CheckRun>,
    check_started_at: usize,
    moves: usize,
    found: Option<(NodeId, usize)>,
    events: Vec<CheckEvent>,
    spinning: bool,
}

/// Builds the explorer for `family`.
pub fn explo_agent(family: Arc<Family>, config: UxsConfig) -> ExploAgent {
    ExploAgent {
        family,
        config,
        phase: ExploPhase::Scan,
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

impl ExploAgent {
    /// The `(v, i)` pair whose check succeeded, once the scan is over.
    pub fn found(&self) -> Option<(NodeId, usize)> {
        self.found
    }

    /// Check boundaries, for position-restoration audits.
    pub fn events(&self) -> &[CheckEvent] {
        &self.events
    }

    fn start_tail(&mut self, m: usize) -> Result<(), ()> {
        let mut max_size = 0;
        for t in 1..=m {
            max_size = max_size.max(self.family.size(t).map_err(|_| ())?);
        }
        let seq = sequence_for_bound(max_size, &self.config).map_err(|_| ())?;
        self.phase = ExploPhase::Tail(SequenceAgent::new(seq));
        Ok(())
    }

    fn emit_move(&mut self, p: usize) -> AgentAction {
        self.moves += 1;
        AgentAction::Move(p)
    }
}

impl Agent for ExploAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        if self.spinning {
            return self.emit_move(0);
        }
        for _ in 0..SCAN_TRANSITION_BUDGET {
            match &mut self.phase {
                ExploPhase::Done => return AgentAction::Stop,
                ExploPhase::Tail(seq) => {
                    return match seq.act(obs) {
                        AgentAction::Stop => {
                            self.phase = ExploPhase::Done;
                            AgentAction::Stop
                        }
                        AgentAction::Move(p) => self.emit_move(p),
                    };
                }
                ExploPhase::Scan => {
                    if self.check.is_none() {
                        let member = match &self.member {
                            Some(g) if self.scan_v < g.node_count() => Arc::clone(g),
                            _ => {
                                if self.member.is_some() {
                                    self.scan_i += 1;
                                    self.scan_v = 0;
                                }
                                match self.family.enumerate(self.scan_i) {
                                    Ok(g) => {
                                        self.member = Some(Arc::clone(&g));
                                        g
                                    }
                                    Err(_) => {
                                        // Family exhausted below the host: the
                                        // precondition (host is a member) failed.
                                        self.spinning = true;
                                        return self.emit_move(0);
                                    }
                                }
                            }
                        };
                        let v = self.scan_v;
                        let Ok((k, _)) = self.family.witness(self.scan_i, v) else {
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
                                let Ok((_, m)) = self.family.witness(i, v) else {
                                    self.spinning = true;
                                    return self.emit_move(0);
                                };
                                if self.start_tail(m).is_err() {
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

// ---------------------------------------------------------------------------
// Dedicated walkers
// ---------------------------------------------------------------------------

enum RingPhase {
    Start,
    PendantReturn,
    LeaveDeg3,
    ClockwiseStopAtDeg3,
    CountDeg3 { seen: usize },
    StopAtPendant,
}

/// Dedicated explorer for rings with one pendant (registry name `a-f`).
///
/// From a degree-1 start: down to the ring, then clockwise until the
/// degree-3 node comes around. From a degree-3 start: dip into the pendant
/// and back, then clockwise around. From a degree-2 start: clockwise until
/// the second arrival at the degree-3 node, then into the pendant. Never
/// more than `2k + 2` moves on a ring of size `k`.
pub struct PendantRingAgent {
    phase: RingPhase,
}

pub fn pendant_ring_agent() -> PendantRingAgent {
    PendantRingAgent {
        phase: RingPhase::Start,
    }
}

impl Agent for PendantRingAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        match self.phase {
            RingPhase::Start => match obs.degree {
                1 => {
                    self.phase = RingPhase::LeaveDeg3;
                    AgentAction::Move(0)
                }
                3 => {
                    self.phase = RingPhase::PendantReturn;
                    AgentAction::Move(2)
                }
                _ => {
                    self.phase = RingPhase::CountDeg3 { seen: 0 };
                    AgentAction::Move(1)
                }
            },
            RingPhase::PendantReturn => {
                self.phase = RingPhase::LeaveDeg3;
                AgentAction::Move(0)
            }
            RingPhase::LeaveDeg3 => {
                self.phase = RingPhase::ClockwiseStopAtDeg3;
                AgentAction::Move(1)
            }
            RingPhase::ClockwiseStopAtDeg3 => {
                if obs.degree == 3 {
                    AgentAction::Stop
                } else {
                    AgentAction::Move(1)
                }
            }
            RingPhase::CountDeg3 { seen } => {
                if obs.degree == 3 {
                    if seen + 1 == 2 {
                        self.phase = RingPhase::StopAtPendant;
                        AgentAction::Move(2)
                    } else {
                        self.phase = RingPhase::CountDeg3 { seen: seen + 1 };
                        AgentAction::Move(1)
                    }
                } else {
                    AgentAction::Move(1)
                }
            }
            RingPhase::StopAtPendant => AgentAction::Stop,
        }
    }
}

/// Dedicated sweep of a studded ring, starting at any degree-3 ring node.
///
/// The walk runs clockwise, dips into the pendant of every attached node it
/// arrives at along the ring, and counts entries to the degree-4 node; the
/// third entry means a full loop is complete (arrival, pendant return, and
/// arrival again), at which point it takes port 3 into the second pendant
/// and stops there.
pub struct StuddedRingSweep {
    started: bool,
    deg4_entries: usize,
    stopping: bool,
}

pub fn studded_ring_sweep() -> StuddedRingSweep {
    StuddedRingSweep {
        started: false,
        deg4_entries: 0,
        stopping: false,
    }
}

impl Agent for StuddedRingSweep {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        if !self.started {
            self.started = true;
            return AgentAction::Move(1);
        }
        if self.stopping {
            return AgentAction::Stop;
        }
        match obs.degree {
            1 => AgentAction::Move(0),
            2 => AgentAction::Move(1),
            3 => match obs.entry_port {
                Some(0) => AgentAction::Move(2),
                _ => AgentAction::Move(1),
            },
            _ => {
                self.deg4_entries += 1;
                if self.deg4_entries == 3 {
                    self.stopping = true;
                    AgentAction::Move(3)
                } else {
                    match obs.entry_port {
                        Some(0) => AgentAction::Move(2),
                        _ => AgentAction::Move(1),
                    }
                }
            }
        }
    }
}

/// How far the clockwise probe of [`mixed_family_agent`] extends beyond the
/// nominal `r + 1` steps. A studded ring with parameter `j` reveals its
/// degree-4 node within `6j` clockwise steps from anywhere on the ring, so
/// the probe is reliable for members up to this parameter; tested prefixes
/// stay well below it.
pub const PROBE_RING_PARAMETER: usize = 16;

enum MixedPhase {
    Start,
    Probe { left: usize },
    SeekDeg3,
    Sweep(StuddedRingSweep),
    RingMode(PendantRingAgent),
}

/// Dedicated explorer for the mixed family with seam `r` (registry name
/// `a-fstar:r=<R>`): pendant rings at members `1..=r`, studded rings beyond.
///
/// A degree-1 start first hops onto the ring. The agent then probes
/// clockwise; if a degree-4 node shows up the host is a studded ring, so it
/// continues clockwise to the next degree-3 node and hands over to the
/// sweep. Otherwise the host is a pendant ring and the pendant-ring walker
/// finishes from wherever the probe ended.
pub struct MixedFamilyAgent {
    phase: MixedPhase,
    probe_len: usize,
    saw_deg4: bool,
}

pub fn mixed_family_agent(r: usize) -> MixedFamilyAgent {
    MixedFamilyAgent {
        phase: MixedPhase::Start,
        probe_len: (r + 1).max(6 * PROBE_RING_PARAMETER + 1),
        saw_deg4: false,
    }
}

impl Agent for MixedFamilyAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        loop {
            match &mut self.phase {
                MixedPhase::Start => {
                    self.saw_deg4 = obs.degree == 4;
                    if obs.degree == 1 {
                        self.phase = MixedPhase::Probe {
                            left: self.probe_len,
                        };
                        return AgentAction::Move(0);
                    }
                    self.phase = MixedPhase::Probe {
                        left: self.probe_len,
                    };
                    // fall through to the probe with the same observation
                }
                MixedPhase::Probe { left } => {
                    self.saw_deg4 |= obs.degree == 4;
                    if *left > 0 {
                        *left -= 1;
                        return AgentAction::Move(1);
                    }
                    if self.saw_deg4 {
                        self.phase = MixedPhase::SeekDeg3;
                    } else {
                        self.phase = MixedPhase::RingMode(pendant_ring_agent());
                    }
                }
                MixedPhase::SeekDeg3 => {
                    if obs.degree == 3 {
                        self.phase = MixedPhase::Sweep(studded_ring_sweep());
                    } else {
                        return AgentAction::Move(1);
                    }
                }
                MixedPhase::Sweep(sweep) => return sweep.act(obs),
                MixedPhase::RingMode(walker) => return walker.act(obs),
            }
        }
    }
}
