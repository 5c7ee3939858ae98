//! The executable adversary against "universal" explorers that read their
//! input family through an algorithmic subroutine.
//!
//! A candidate is any deterministic agent wired to exactly one hook: an
//! enumeration subroutine (index in, member graph out) or a membership
//! subroutine (graph in, yes/no out). The adversary runs the candidate on
//! the smallest pendant ring from its degree-3 node with the pendant-ring
//! family behind the hook (execution one), reads off the stop step `k` and
//! the hook reach `r` (largest index queried, or largest graph size queried
//! in membership mode), and sets `m = max(k, r) + 1`. It then rebuilds the
//! hook over the mixed family with seam `r` and reruns the candidate on the
//! studded ring with parameter `m`, started at the ring node antipodal to
//! the degree-4 node (execution two). Views from the two start nodes agree
//! beyond depth `k`, and the hooks agree on everything the candidate asked,
//! so the second execution replays the first move for move and query for
//! query, stops after `k` steps, and thereby fails to visit the `8m + 1 >
//! k + 1` nodes of the second host. No candidate survives; every assertion
//! is recomputed from the traces, never taken from the candidate.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::agent::{
    is_full_exploration, run_logged, Agent, AgentAction, Observation, QueryDetail, QueryLog,
    RunStatus, Trace,
};
use crate::canon::port_isomorphic;
use crate::family::{mixed_family, pendant_ring_family, Family};
use crate::graph::{pendant_ring, studded_ring, PortGraph};
use crate::uxs::{sequence_for_bound, SequenceAgent, UxsConfig};

/// How a candidate receives its input family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookMode {
    /// The candidate may ask for the i-th member.
    Enumeration,
    /// The candidate may ask whether a graph is a member.
    Decision,
}

/// Enumeration subroutine handle; calls are logged and the queried indices
/// recorded for the adversary.
#[derive(Clone)]
pub struct EnumerationHook {
    family: Arc<Family>,
    log: QueryLog,
    indices: Rc<RefCell<Vec<usize>>>,
}

impl EnumerationHook {
    pub fn enumerate(&self, i: usize) -> Option<Arc<PortGraph>> {
        let graph = self.family.enumerate(i).ok()?;
        self.indices.borrow_mut().push(i);
        self.log.record(QueryDetail::Enumerate {
            i,
            size: graph.node_count(),
        });
        Some(graph)
    }
}

/// Membership subroutine handle; calls are logged and the queried graph
/// sizes recorded.
#[derive(Clone)]
pub struct MembershipHook {
    family: Arc<Family>,
    log: QueryLog,
    sizes: Rc<RefCell<Vec<usize>>>,
}

impl MembershipHook {
    pub fn member(&self, g: &PortGraph) -> bool {
        // Sizes are non-decreasing, so the scan is bounded by |g|.
        let mut i = 1;
        let answer = loop {
            match self.family.size(i) {
                Ok(s) if s > g.node_count() => break false,
                Ok(s) => {
                    if s == g.node_count() {
                        if let Ok(member) = self.family.enumerate(i) {
                            if port_isomorphic(&member, g) {
                                break true;
                            }
                        }
                    }
                    i += 1;
                }
                Err(_) => break false,
            }
        };
        self.sizes.borrow_mut().push(g.node_count());
        self.log.record(QueryDetail::Member {
            size: g.node_count(),
            answer,
        });
        answer
    }
}

/// The hook a candidate is wired to.
#[derive(Clone)]
pub enum CandidateHook {
    Enumeration(EnumerationHook),
    Membership(MembershipHook),
}

impl CandidateHook {
    fn new(mode: HookMode, family: Arc<Family>, log: QueryLog) -> Self {
        match mode {
            HookMode::Enumeration => CandidateHook::Enumeration(EnumerationHook {
                family,
                log,
                indices: Rc::default(),
            }),
            HookMode::Decision => CandidateHook::Membership(MembershipHook {
                family,
                log,
                sizes: Rc::default(),
            }),
        }
    }

    /// The adversary parameter `r`: largest queried index, or largest
    /// queried graph size in membership mode; 0 if the candidate never
    /// queried.
    fn reach(&self) -> usize {
        match self {
            CandidateHook::Enumeration(h) => h.indices.borrow().iter().copied().max().unwrap_or(0),
            CandidateHook::Membership(h) => h.sizes.borrow().iter().copied().max().unwrap_or(0),
        }
    }
}

/// A candidate universal explorer: a deterministic agent builder plus the
/// hook mode it expects. `build` must return a fresh agent; determinism
/// given identical observations and hook answers is the one behavioral
/// requirement.
pub trait Candidate {
    fn mode(&self) -> HookMode;
    fn name(&self) -> String;
    fn build(&self, hook: CandidateHook) -> Box<dyn Agent>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The second execution stopped early and left nodes unvisited.
    Refuted,
    /// Inconclusive: a cap was hit (the candidate never stopped in execution
    /// one, or the required second host exceeds the build limit).
    SurvivedCap,
    /// The candidate crashed (invalid move or broken subprocess protocol).
    Faulted(String),
}

#[derive(Debug, Clone)]
pub struct RefutationReport {
    pub candidate: String,
    pub mode: HookMode,
    pub k: usize,
    pub r: usize,
    pub m: usize,
    pub second_host_size: usize,
    pub visited_in_second: usize,
    pub verdict: Verdict,
    pub e1: Trace,
    pub e2: Trace,
}

#[derive(Debug)]
pub enum RefuteError {
    /// A trace assertion failed; this would contradict view determinism and
    /// is never tolerated as a verdict.
    Internal(String),
}

impl fmt::Display for RefuteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefuteError::Internal(why) => write!(f, "internal refuter error: {why}"),
        }
    }
}

impl std::error::Error for RefuteError {}

/// Caps for the adversary itself.
#[derive(Debug, Clone)]
pub struct RefuterConfig {
    /// Move budget for execution one.
    pub e1_limit: usize,
    /// Largest studded-ring parameter the adversary will build.
    pub max_ring_parameter: usize,
}

impl Default for RefuterConfig {
    fn default() -> Self {
        RefuterConfig {
            e1_limit: 200_000,
            max_ring_parameter: 50_000,
        }
    }
}

/// Outcome of execution one.
#[derive(Debug, Clone)]
pub enum E1Outcome {
    Stopped { k: usize, r: usize, trace: Trace },
    SurvivedCap { trace: Trace },
    Faulted { why: String, trace: Trace },
}

/// Runs the candidate on the smallest pendant ring from its degree-3 node,
/// with the pendant-ring family behind the hook.
pub fn run_e1(candidate: &dyn Candidate, config: &RefuterConfig) -> E1Outcome {
    let host = pendant_ring(3).unwrap();
    let start = 0; // the degree-3 node, by construction
    let log = QueryLog::new();
    let hook = CandidateHook::new(candidate.mode(), Arc::new(pendant_ring_family()), log.clone());
    let mut agent = candidate.build(hook.clone());
    let trace = run_logged(&mut *agent, &host, start, config.e1_limit, &log).unwrap();
    match &trace.status {
        RunStatus::Stopped => E1Outcome::Stopped {
            k: trace.len(),
            r: hook.reach(),
            trace,
        },
        RunStatus::StepLimit => E1Outcome::SurvivedCap { trace },
        RunStatus::Faulted(why) => E1Outcome::Faulted {
            why: why.clone(),
            trace,
        },
    }
}

/// Runs the candidate on the studded ring with parameter `m = max(k, r) + 1`
/// from the node antipodal to its degree-4 node, with the mixed family with
/// seam `r` behind the hook, and checks the three refutation assertions.
pub fn run_e2(
    candidate: &dyn Candidate,
    k: usize,
    r: usize,
    e1: &Trace,
    config: &RefuterConfig,
) -> Result<(usize, Trace, Verdict), RefuteError> {
    let m = k.max(r) + 1;
    if m > config.max_ring_parameter {
        let placeholder = Trace {
            start: 0,
            steps: Vec::new(),
            status: RunStatus::StepLimit,
            queries: Vec::new(),
        };
        return Ok((m, placeholder, Verdict::SurvivedCap));
    }
    let host = studded_ring(m).unwrap();
    let start = 3 * m; // antipodal to the degree-4 node at ring index 0
    let log = QueryLog::new();
    let hook = CandidateHook::new(candidate.mode(), Arc::new(mixed_family(r)), log.clone());
    let mut agent = candidate.build(hook);
    let trace = run_logged(&mut *agent, &host, start, k + 2, &log).unwrap();

    if let RunStatus::Faulted(why) = &trace.status {
        let why = why.clone();
        return Ok((m, trace, Verdict::Faulted(why)));
    }
    // Assertion: the first k steps, including every query, replay execution
    // one exactly. Both hooks agree on everything within reach r, and the
    // start views agree beyond depth k, so a mismatch here can only mean a
    // broken runtime.
    if !crate::agent::traces_prefix_equal(e1, &trace, k) {
        return Err(RefuteError::Internal(
            "executions diverged within the replayed prefix".into(),
        ));
    }
    if trace.status != RunStatus::Stopped || trace.len() != k {
        return Err(RefuteError::Internal(format!(
            "candidate did not stop at step {k} in the second execution (status {:?}, len {})",
            trace.status,
            trace.len()
        )));
    }
    let visited = trace.visited().len();
    if visited >= host.node_count() || is_full_exploration(&trace, &host) {
        return Err(RefuteError::Internal(
            "second host unexpectedly explored; the construction guarantees 8m+1 > k+1".into(),
        ));
    }
    Ok((m, trace, Verdict::Refuted))
}

/// Full adversary: execution one, then execution two.
pub fn refute(
    candidate: &dyn Candidate,
    config: &RefuterConfig,
) -> Result<RefutationReport, RefuteError> {
    match run_e1(candidate, config) {
        E1Outcome::Faulted { why, trace } => Ok(RefutationReport {
            candidate: candidate.name(),
            mode: candidate.mode(),
            k: trace.len(),
            r: 0,
            m: 0,
            second_host_size: 0,
            visited_in_second: 0,
            verdict: Verdict::Faulted(why),
            e2: trace.clone(),
            e1: trace,
        }),
        E1Outcome::SurvivedCap { trace } => Ok(RefutationReport {
            candidate: candidate.name(),
            mode: candidate.mode(),
            k: trace.len(),
            r: 0,
            m: 0,
            second_host_size: 0,
            visited_in_second: 0,
            verdict: Verdict::SurvivedCap,
            e2: trace.clone(),
            e1: trace,
        }),
        E1Outcome::Stopped { k, r, trace } => {
            let (m, e2, verdict) = run_e2(candidate, k, r, &trace, config)?;
            Ok(RefutationReport {
                candidate: candidate.name(),
                mode: candidate.mode(),
                k,
                r,
                m,
                second_host_size: if m <= config.max_ring_parameter {
                    8 * m + 1
                } else {
                    0
                },
                visited_in_second: e2.visited().len(),
                verdict,
                e1: trace,
                e2,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Built-in candidates
// ---------------------------------------------------------------------------

/// Strawman: asks for members 1..=B, reads off the maximum size M (4 when it
/// never asks), and replays a verified sequence for `min(M, verified cap)`.
/// Correct on any finite prefix it happens to cover; universal it is not.
pub struct NaiveCandidate {
    pub budget: usize,
    pub uxs: UxsConfig,
}

impl NaiveCandidate {
    pub fn new(budget: usize) -> Self {
        NaiveCandidate {
            budget,
            uxs: UxsConfig::default(),
        }
    }
}

struct NaiveAgent {
    hook: CandidateHook,
    budget: usize,
    uxs: UxsConfig,
    tail: Option<SequenceAgent>,
}

impl Agent for NaiveAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        if self.tail.is_none() {
            let CandidateHook::Enumeration(hook) = &self.hook else {
                return AgentAction::Stop;
            };
            let mut max_size = 0;
            for i in 1..=self.budget {
                match hook.enumerate(i) {
                    Some(g) => max_size = max_size.max(g.node_count()),
                    None => break,
                }
            }
            if max_size == 0 {
                max_size = 4;
            }
            let bound = max_size.min(self.uxs.verified_cap);
            let Ok(seq) = sequence_for_bound(bound, &self.uxs) else {
                return AgentAction::Stop;
            };
            self.tail = Some(SequenceAgent::new(seq));
        }
        self.tail.as_mut().unwrap().act(obs)
    }
}

impl Candidate for NaiveCandidate {
    fn mode(&self) -> HookMode {
        HookMode::Enumeration
    }
    fn name(&self) -> String {
        format!("naive:B={}", self.budget)
    }
    fn build(&self, hook: CandidateHook) -> Box<dyn Agent> {
        Box::new(NaiveAgent {
            hook,
            budget: self.budget,
            uxs: self.uxs.clone(),
            tail: None,
        })
    }
}

/// Decision-mode strawman: probes membership of the pendant rings with ring
/// sizes `3..=probe`, then replays a sequence sized by the largest member
/// confirmed.
pub struct MembershipProbeCandidate {
    pub probe: usize,
    pub uxs: UxsConfig,
}

impl MembershipProbeCandidate {
    pub fn new(probe: usize) -> Self {
        MembershipProbeCandidate {
            probe,
            uxs: UxsConfig::default(),
        }
    }
}

struct MembershipProbeAgent {
    hook: CandidateHook,
    probe: usize,
    uxs: UxsConfig,
    tail: Option<SequenceAgent>,
}

impl Agent for MembershipProbeAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        if self.tail.is_none() {
            let CandidateHook::Membership(hook) = &self.hook else {
                return AgentAction::Stop;
            };
            let mut max_size = 4;
            for ring_size in 3..=self.probe {
                let g = pendant_ring(ring_size).unwrap();
                if hook.member(&g) {
                    max_size = max_size.max(g.node_count());
                }
            }
            let Ok(seq) = sequence_for_bound(max_size, &self.uxs) else {
                return AgentAction::Stop;
            };
            self.tail = Some(SequenceAgent::new(seq));
        }
        self.tail.as_mut().unwrap().act(obs)
    }
}

impl Candidate for MembershipProbeCandidate {
    fn mode(&self) -> HookMode {
        HookMode::Decision
    }
    fn name(&self) -> String {
        format!("membership:K={}", self.probe)
    }
    fn build(&self, hook: CandidateHook) -> Box<dyn Agent> {
        Box::new(MembershipProbeAgent {
            hook,
            probe: self.probe,
            uxs: self.uxs.clone(),
            tail: None,
        })
    }
}

/// The dedicated pendant-ring explorer presented as if it were universal
/// (it ignores its hook). Correct on its own family, defeated on the mixed
/// one: dedication is not universality.
pub struct DedicatedAsCandidate {
    pub uxs: UxsConfig,
}

impl DedicatedAsCandidate {
    pub fn new() -> Self {
        DedicatedAsCandidate {
            uxs: UxsConfig::default(),
        }
    }
}

impl Default for DedicatedAsCandidate {
    fn default() -> Self {
        Self::new()
    }
}

impl Candidate for DedicatedAsCandidate {
    fn mode(&self) -> HookMode {
        HookMode::Enumeration
    }
    fn name(&self) -> String {
        "explo-c".into()
    }
    fn build(&self, _hook: CandidateHook) -> Box<dyn Agent> {
        Box::new(crate::explore::explo_agent(
            Arc::new(pendant_ring_family()),
            self.uxs.clone(),
        ))
    }
}

// ---------------------------------------------------------------------------
// External candidates over a line protocol
// ---------------------------------------------------------------------------

/// A candidate running as a subprocess, speaking one record per line.
///
/// Runtime to candidate: `obs <degree> <entryPort|->`, `graph <json>`,
/// `no-graph`, `member-answer <0|1>`. Candidate to runtime: `move <port>`,
/// `stop`, `enum <i>`, `member <json>`. Every observation line must
/// eventually be answered by a move or a stop, with any number of hook calls
/// in between. A protocol violation or dead pipe makes the agent emit an
/// out-of-range move, which the runtime records as a fault.
pub struct SubprocessCandidate {
    pub command: Vec<String>,
    pub hook_mode: HookMode,
}

struct SubprocessAgent {
    child: std::process::Child,
    stdin: std::io::BufWriter<std::process::ChildStdin>,
    stdout: std::io::BufReader<std::process::ChildStdout>,
    hook: CandidateHook,
    poisoned: bool,
}

const PROTOCOL_FAULT_MOVE: usize = usize::MAX;

impl SubprocessAgent {
    fn spawn(command: &[String], hook: CandidateHook) -> std::io::Result<Self> {
        let mut child = std::process::Command::new(&command[0])
            .args(&command[1..])
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .spawn()?;
        let stdin = std::io::BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = std::io::BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(SubprocessAgent {
            child,
            stdin,
            stdout,
            hook,
            poisoned: false,
        })
    }

    fn send(&mut self, line: &str) -> std::io::Result<()> {
        use std::io::Write;
        writeln!(self.stdin, "{line}")?;
        self.stdin.flush()
    }

    fn receive(&mut self) -> std::io::Result<String> {
        use std::io::BufRead;
        let mut line = String::new();
        if self.stdout.read_line(&mut line)? == 0 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::UnexpectedEof,
                "candidate closed its output",
            ));
        }
        Ok(line.trim_end().to_string())
    }

    fn exchange(&mut self, obs: &Observation) -> std::io::Result<AgentAction> {
        let entry = obs
            .entry_port
            .map_or_else(|| "-".to_string(), |p| p.to_string());
        self.send(&format!("obs {} {entry}", obs.degree))?;
        loop {
            let line = self.receive()?;
            let bad = || std::io::Error::new(std::io::ErrorKind::InvalidData, line.clone());
            let mut words = line.split_whitespace();
            match words.next() {
                Some("move") => {
                    let p = words.next().and_then(|w| w.parse().ok()).ok_or_else(bad)?;
                    return Ok(AgentAction::Move(p));
                }
                Some("stop") => return Ok(AgentAction::Stop),
                Some("enum") => {
                    let i: usize = words.next().and_then(|w| w.parse().ok()).ok_or_else(bad)?;
                    let CandidateHook::Enumeration(hook) = &self.hook else {
                        return Err(bad());
                    };
                    match hook.enumerate(i) {
                        Some(g) => {
                            let json = crate::io::graph_to_json_line(&g);
                            self.send(&format!("graph {json}"))?;
                        }
                        None => self.send("no-graph")?,
                    }
                }
                Some("member") => {
                    let json: String = words.collect::<Vec<_>>().join(" ");
                    let g = crate::io::graph_from_json(&json).map_err(|_| bad())?;
                    let CandidateHook::Membership(hook) = &self.hook else {
                        return Err(bad());
                    };
                    let answer = hook.member(&g);
                    self.send(&format!("member-answer {}", u8::from(answer)))?;
                }
                _ => return Err(bad()),
            }
        }
    }
}

impl Agent for SubprocessAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        if self.poisoned {
            return AgentAction::Move(PROTOCOL_FAULT_MOVE);
        }
        match self.exchange(obs) {
            Ok(action) => action,
            Err(_) => {
                self.poisoned = true;
                AgentAction::Move(PROTOCOL_FAULT_MOVE)
            }
        }
    }
}

impl Drop for SubprocessAgent {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Candidate for SubprocessCandidate {
    fn mode(&self) -> HookMode {
        self.hook_mode
    }
    fn name(&self) -> String {
        format!("cmd:{}", self.command.join(" "))
    }
    fn build(&self, hook: CandidateHook) -> Box<dyn Agent> {
        match SubprocessAgent::spawn(&self.command, hook) {
            Ok(agent) => Box::new(agent),
            Err(_) => {
                // Spawning failed: an agent that immediately faults.
                struct Broken;
                impl Agent for Broken {
                    fn act(&mut self, _obs: &Observation) -> AgentAction {
                        AgentAction::Move(PROTOCOL_FAULT_MOVE)
                    }
                }
                Box::new(Broken)
            }
        }
    }
}

/// Resolves candidate registry names: `naive:B=<B>`, `membership:K=<K>`,
/// `explo-c`.
pub fn candidate_by_name(name: &str) -> Option<Box<dyn Candidate>> {
    if let Some(b) = name.strip_prefix("naive:B=") {
        return Some(Box::new(NaiveCandidate::new(b.parse().ok()?)));
    }
    if let Some(k) = name.strip_prefix("membership:K=") {
        return Some(Box::new(MembershipProbeCandidate::new(k.parse().ok()?)));
    }
    if name == "explo-c" {
        return Some(Box::new(DedicatedAsCandidate::new()));
    }
    None
}
