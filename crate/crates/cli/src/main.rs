//! Batch front end: graph generation, view inspection, agent runs,
//! exploration-sequence management, and the refuter.
//!
//! Exit codes are scriptable: 0 means the expected outcome occurred
//! (generated, explored, verified, refuted), 2 means a cap made the result
//! inconclusive (step limit, unverified sequence, survived adversary cap),
//! and 1 means an error.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::rc::Rc;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use explore_core::agent::{
    is_full_exploration, run_logged, Agent, AgentAction, Observation, QueryLog, RunStatus,
};
use explore_core::explore::{
    basic_walk_tree_agent, explo_agent, mixed_family_agent, pendant_ring_agent,
};
use explore_core::family::family_by_name;
use explore_core::io::{graph_from_json, graph_to_dot, graph_to_json, trace_to_lines};
use explore_core::oracle::{universal_exploration_agent, StreamConfig, YesNoOracle};
use explore_core::refuter::{
    candidate_by_name, refute, Candidate, HookMode, RefuterConfig, SubprocessCandidate, Verdict,
};
use explore_core::uxs::{
    read_uxs_file, search_uxs, sequence_replay_agent, verify_uxs, write_uxs_file, UxsConfig,
};

// Keep the CLI thin: every behavior here is a straight wrapper over the
// library so that scripted runs and library users see the same results.
use explore_core::view::{node_views_equal, unfold_view};

#[derive(Parser)]
#[command(name = "explore", about = "Anonymous port-numbered graph exploration toolkit")]
struct Cli {
    /// Directory for sequence caches and default report locations.
    #[arg(long, global = true, default_value = ".explore-cache")]
    cache_dir: PathBuf,
    /// Default move budget for agent runs.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    limit: usize,
    /// Reserved; every run is already deterministic.
    #[arg(long, global = true, hide = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the i-th member of a family.
    Gen(GenArgs),
    /// Print the depth-k view from a node.
    View(ViewArgs),
    /// Compare depth-k views of two nodes.
    ViewEq(ViewEqArgs),
    /// Run a registered agent on a graph file.
    Run(RunArgs),
    /// Run the general family explorer on a family member.
    Explo(ExploArgs),
    /// Exploration sequences: search and verify.
    #[command(subcommand)]
    Uxs(UxsCommand),
    /// Run the adversary against a candidate universal explorer.
    Refute(RefuteArgs),
    /// Serve a built-in candidate over the line protocol on stdin/stdout.
    #[command(hide = true)]
    CandidateStdio(CandidateStdioArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    i: usize,
    #[arg(long, value_enum, default_value_t = GenFormat::Json)]
    format: GenFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct ViewArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    node: usize,
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ViewEqArgs {
    #[arg(long)]
    graph_a: PathBuf,
    #[arg(long)]
    node_a: usize,
    #[arg(long)]
    graph_b: PathBuf,
    #[arg(long)]
    node_b: usize,
    /// Depth for both sides.
    #[arg(long)]
    k: Option<usize>,
    /// Per-side depths; unequal values are a depth-mismatch error.
    #[arg(long)]
    k_a: Option<usize>,
    #[arg(long)]
    k_b: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    start: usize,
    #[arg(long)]
    agent: String,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ExploArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    host_i: usize,
    #[arg(long)]
    start: Option<usize>,
    #[arg(long)]
    all_starts: bool,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Subcommand)]
enum UxsCommand {
    Search(UxsSearchArgs),
    Verify(UxsVerifyArgs),
}

#[derive(Args)]
struct UxsSearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UxsVerifyArgs {
    #[arg(long)]
    n: usize,
    /// Defaults to the sequence the search would have cached.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct RefuteArgs {
    /// Registry name (`naive:B=<B>`, `membership:K=<K>`, `explo-c`) or
    /// `cmd:<program and args>` for an external candidate.
    #[arg(long)]
    candidate: String,
    /// Must match the candidate's hook mode when given.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Move budget for the first execution.
    #[arg(long, default_value_t = 200_000)]
    cap: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ModeArg {
    Enum,
    Decision,
}

#[derive(Args)]
struct CandidateStdioArgs {
    name: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::View(args) => cmd_view(args),
        Command::ViewEq(args) => cmd_view_eq(args),
        Command::Run(args) => cmd_run(cli, args),
        Command::Explo(args) => cmd_explo(cli, args),
        Command::Uxs(UxsCommand::Search(args)) => cmd_uxs_search(cli, args),
        Command::Uxs(UxsCommand::Verify(args)) => cmd_uxs_verify(cli, args),
        Command::Refute(args) => cmd_refute(cli, args),
        Command::CandidateStdio(args) => cmd_candidate_stdio(args),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| e.to_string()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<explore_core::PortGraph, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    graph_from_json(&text).map_err(|e| e.to_string())
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode, String> {
    let family = family_by_name(&args.family).map_err(|e| e.to_string())?;
    let g = family.enumerate(args.i).map_err(|e| e.to_string())?;
    let content = match args.format {
        GenFormat::Json => graph_to_json(&g),
        GenFormat::Dot => graph_to_dot(&g),
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_view(args: &ViewArgs) -> Result<ExitCode, String> {
    let g = load_graph(&args.graph)?;
    let view = unfold_view(&g, args.node, args.k).map_err(|e| e.to_string())?;
    println!("{}", view.render());
    Ok(ExitCode::SUCCESS)
}

fn cmd_view_eq(args: &ViewEqArgs) -> Result<ExitCode, String> {
    let ka = args.k_a.or(args.k).ok_or("missing --k or --k-a")?;
    let kb = args.k_b.or(args.k).ok_or("missing --k or --k-b")?;
    let a = load_graph(&args.graph_a)?;
    let b = load_graph(&args.graph_b)?;
    let va = unfold_view(&a, args.node_a, ka).map_err(|e| e.to_string())?;
    let vb = unfold_view(&b, args.node_b, kb).map_err(|e| e.to_string())?;
    let equal = explore_core::view::views_equal(&va, &vb).map_err(|e| e.to_string())?;
    debug_assert_eq!(equal, node_views_equal(&a, args.node_a, &b, args.node_b, ka));
    println!("{}", if equal { "yes" } else { "no" });
    Ok(ExitCode::SUCCESS)
}

/// Resolves agent registry names: `basic-walk-tree`, `a-f`, `a-fstar:r=<R>`,
/// `explo:<family>`, `universal-oracle:<family>`, `uxs:N=<N>`.
fn agent_by_name(name: &str, log: &QueryLog) -> Result<Box<dyn Agent>, String> {
    if name == "basic-walk-tree" {
        return Ok(Box::new(basic_walk_tree_agent()));
    }
    if name == "a-f" {
        return Ok(Box::new(pendant_ring_agent()));
    }
    if let Some(r) = name.strip_prefix("a-fstar:r=") {
        let r = r.parse().map_err(|_| format!("bad parameter in `{name}`"))?;
        return Ok(Box::new(mixed_family_agent(r)));
    }
    if let Some(fam) = name.strip_prefix("explo:") {
        let family = Arc::new(family_by_name(fam).map_err(|e| e.to_string())?);
        return Ok(Box::new(explo_agent(family, UxsConfig::default())));
    }
    if let Some(fam) = name.strip_prefix("universal-oracle:") {
        let family = Arc::new(family_by_name(fam).map_err(|e| e.to_string())?);
        let oracle = Rc::new(YesNoOracle::new(family, StreamConfig::default(), log.clone()));
        return Ok(Box::new(universal_exploration_agent(
            oracle,
            UxsConfig::default(),
        )));
    }
    if let Some(n) = name.strip_prefix("uxs:N=") {
        let n = n.parse().map_err(|_| format!("bad parameter in `{name}`"))?;
        let agent =
            sequence_replay_agent(n, &UxsConfig::default()).map_err(|e| e.to_string())?;
        return Ok(Box::new(agent));
    }
    Err(format!("unknown agent `{name}`"))
}

fn cmd_run(cli: &Cli, args: &RunArgs) -> Result<ExitCode, String> {
    let g = load_graph(&args.graph)?;
    let log = QueryLog::new();
    let mut agent = agent_by_name(&args.agent, &log)?;
    let limit = args.limit.unwrap_or(cli.limit);
    let trace =
        run_logged(&mut *agent, &g, args.start, limit, &log).map_err(|e| e.to_string())?;
    if let Some(path) = &args.trace {
        std::fs::write(path, trace_to_lines(&trace)).map_err(|e| e.to_string())?;
    }
    let explored = is_full_exploration(&trace, &g);
    println!(
        "status={:?} steps={} visited={}/{} explored={}",
        trace.status,
        trace.len(),
        trace.visited().len(),
        g.node_count(),
        explored
    );
    Ok(match (&trace.status, explored) {
        (_, true) => ExitCode::SUCCESS,
        (RunStatus::Faulted(_), _) => ExitCode::from(1),
        _ => ExitCode::from(2),
    })
}

fn cmd_explo(cli: &Cli, args: &ExploArgs) -> Result<ExitCode, String> {
    let family = Arc::new(family_by_name(&args.family).map_err(|e| e.to_string())?);
    // Witnesses survive across invocations as a text table in the cache.
    let table_path = cli
        .cache_dir
        .join(format!("witnesses-{}.txt", args.family.replace([':', '='], "-")));
    if let Ok(text) = std::fs::read_to_string(&table_path) {
        explore_core::family::load_witness_table(&family, &text);
    }
    let host = family.enumerate(args.host_i).map_err(|e| e.to_string())?;
    let starts: Vec<usize> = if args.all_starts {
        host.nodes().collect()
    } else {
        vec![args.start.ok_or("need --start or --all-starts")?]
    };
    let limit = args.limit.unwrap_or(cli.limit);
    let mut all_explored = true;
    for start in starts {
        let mut agent = explo_agent(Arc::clone(&family), UxsConfig::default());
        let trace = run_logged(&mut agent, &host, start, limit, &QueryLog::new())
            .map_err(|e| e.to_string())?;
        let explored = is_full_exploration(&trace, &host);
        all_explored &= explored;
        println!(
            "start={start} status={:?} steps={} explored={explored}",
            trace.status,
            trace.len()
        );
    }
    let table = explore_core::family::witness_table_lines(&family);
    if !table.is_empty() {
        std::fs::create_dir_all(&cli.cache_dir).map_err(|e| e.to_string())?;
        std::fs::write(&table_path, table).map_err(|e| e.to_string())?;
    }
    Ok(if all_explored {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn default_uxs_path(cli: &Cli, n: usize) -> PathBuf {
    cli.cache_dir.join(format!("uxs-{n}.txt"))
}

fn cmd_uxs_search(cli: &Cli, args: &UxsSearchArgs) -> Result<ExitCode, String> {
    match search_uxs(args.n, args.budget) {
        Ok(uxs) => {
            let path = args
                .out
                .clone()
                .unwrap_or_else(|| default_uxs_path(cli, args.n));
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            }
            write_uxs_file(&path, &uxs).map_err(|e| e.to_string())?;
            println!(
                "bound={} offsets={} file={}",
                uxs.bound,
                uxs.offsets.len(),
                path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(explore_core::uxs::UxsError::SearchBudget { bound, budget }) => {
            eprintln!("search for bound {bound} exhausted its budget of {budget}");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_uxs_verify(cli: &Cli, args: &UxsVerifyArgs) -> Result<ExitCode, String> {
    let path = args
        .file
        .clone()
        .unwrap_or_else(|| default_uxs_path(cli, args.n));
    let uxs = read_uxs_file(&path).map_err(|e| e.to_string())?;
    let verified = verify_uxs(&uxs.offsets, args.n).map_err(|e| e.to_string())?;
    println!("bound={} offsets={} verified={verified}", args.n, uxs.offsets.len());
    Ok(if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_refute(cli: &Cli, args: &RefuteArgs) -> Result<ExitCode, String> {
    let candidate: Box<dyn Candidate> = if let Some(rest) = args.candidate.strip_prefix("cmd:") {
        let command: Vec<String> = rest.split_whitespace().map(String::from).collect();
        if command.is_empty() {
            return Err("empty external candidate command".into());
        }
        let mode = match args.mode {
            Some(ModeArg::Enum) => HookMode::Enumeration,
            Some(ModeArg::Decision) => HookMode::Decision,
            None => return Err("external candidates need --mode".into()),
        };
        Box::new(SubprocessCandidate {
            command,
            hook_mode: mode,
        })
    } else {
        let candidate = candidate_by_name(&args.candidate)
            .ok_or_else(|| format!("unknown candidate `{}`", args.candidate))?;
        if let Some(mode) = args.mode {
            let wanted = match mode {
                ModeArg::Enum => HookMode::Enumeration,
                ModeArg::Decision => HookMode::Decision,
            };
            if candidate.mode() != wanted {
                return Err(format!(
                    "candidate `{}` runs in {:?} mode",
                    args.candidate,
                    candidate.mode()
                ));
            }
        }
        candidate
    };

    let config = RefuterConfig {
        e1_limit: args.cap,
        ..RefuterConfig::default()
    };
    let report = refute(&*candidate, &config).map_err(|e| e.to_string())?;

    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| cli.cache_dir.join("refutation.json"));
    if let Some(dir) = report_path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    }
    let e1_path = report_path.with_extension("e1.trace");
    let e2_path = report_path.with_extension("e2.trace");
    std::fs::write(&e1_path, trace_to_lines(&report.e1)).map_err(|e| e.to_string())?;
    std::fs::write(&e2_path, trace_to_lines(&report.e2)).map_err(|e| e.to_string())?;
    let verdict = match &report.verdict {
        Verdict::Refuted => "refuted".to_string(),
        Verdict::SurvivedCap => "survived-cap".to_string(),
        Verdict::Faulted(why) => format!("faulted: {why}"),
    };
    let json = serde_json::json!({
        "candidate": report.candidate,
        "mode": format!("{:?}", report.mode),
        "k": report.k,
        "r": report.r,
        "m": report.m,
        "second_host_size": report.second_host_size,
        "visited_in_second": report.visited_in_second,
        "verdict": verdict,
        "e1_trace": e1_path.display().to_string(),
        "e2_trace": e2_path.display().to_string(),
    });
    std::fs::write(
        &report_path,
        serde_json::to_string_pretty(&json).expect("report serialization"),
    )
    .map_err(|e| e.to_string())?;
    println!(
        "candidate={} verdict={verdict} k={} r={} m={} report={}",
        report.candidate,
        report.k,
        report.r,
        report.m,
        report_path.display()
    );
    Ok(match report.verdict {
        Verdict::Refuted => ExitCode::SUCCESS,
        Verdict::SurvivedCap => ExitCode::from(2),
        Verdict::Faulted(_) => ExitCode::from(1),
    })
}

// ---------------------------------------------------------------------------
// Built-in candidates over stdin/stdout, for exercising the line protocol
// ---------------------------------------------------------------------------

struct StdioPipe {
    input: std::io::Lines<std::io::BufReader<std::io::Stdin>>,
}

impl StdioPipe {
    fn new() -> Self {
        StdioPipe {
            input: std::io::BufReader::new(std::io::stdin()).lines(),
        }
    }

    fn say(&mut self, line: &str) -> Result<(), String> {
        let mut out = std::io::stdout().lock();
        writeln!(out, "{line}").and_then(|()| out.flush()).map_err(|e| e.to_string())
    }

    fn hear(&mut self) -> Result<Option<String>, String> {
        match self.input.next() {
            None => Ok(None),
            Some(line) => line.map(Some).map_err(|e| e.to_string()),
        }
    }

    /// Asks for the i-th member; returns its size, or None past the cap.
    fn enumerate_size(&mut self, i: usize) -> Result<Option<usize>, String> {
        self.say(&format!("enum {i}"))?;
        let line = self.hear()?.ok_or("runtime hung up mid-query")?;
        if line == "no-graph" {
            return Ok(None);
        }
        let json = line.strip_prefix("graph ").ok_or("expected a graph answer")?;
        let g = graph_from_json(json).map_err(|e| e.to_string())?;
        Ok(Some(g.node_count()))
    }

    fn member(&mut self, g: &explore_core::PortGraph) -> Result<bool, String> {
        self.say(&format!("member {}", explore_core::io::graph_to_json_line(g)))?;
        let line = self.hear()?.ok_or("runtime hung up mid-query")?;
        match line.as_str() {
            "member-answer 1" => Ok(true),
            "member-answer 0" => Ok(false),
            _ => Err("expected a membership answer".into()),
        }
    }
}

fn parse_obs(line: &str) -> Result<Observation, String> {
    let mut words = line.split_whitespace();
    if words.next() != Some("obs") {
        return Err(format!("expected an observation, got `{line}`"));
    }
    let degree = words
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or("malformed observation")?;
    let entry_port = match words.next() {
        Some("-") => None,
        Some(w) => Some(w.parse().map_err(|_| "malformed entry port")?),
        None => return Err("malformed observation".into()),
    };
    Ok(Observation { degree, entry_port })
}

/// Speaks the candidate side of the line protocol for a built-in strawman.
fn cmd_candidate_stdio(args: &CandidateStdioArgs) -> Result<ExitCode, String> {
    let uxs = UxsConfig::default();
    let mut pipe = StdioPipe::new();
    let mut tail: Option<explore_core::uxs::SequenceAgent> = None;

    while let Some(line) = pipe.hear()? {
        let obs = parse_obs(&line)?;
        if tail.is_none() {
            let bound = if let Some(b) = args.name.strip_prefix("naive:B=") {
                let budget: usize = b.parse().map_err(|_| "bad budget")?;
                let mut max_size = 0;
                for i in 1..=budget {
                    match pipe.enumerate_size(i)? {
                        Some(size) => max_size = max_size.max(size),
                        None => break,
                    }
                }
                if max_size == 0 {
                    max_size = 4;
                }
                max_size.min(uxs.verified_cap)
            } else if let Some(k) = args.name.strip_prefix("membership:K=") {
                let probe: usize = k.parse().map_err(|_| "bad probe bound")?;
                let mut max_size = 4;
                for ring_size in 3..=probe {
                    let g = explore_core::pendant_ring(ring_size).unwrap();
                    if pipe.member(&g)? {
                        max_size = max_size.max(g.node_count());
                    }
                }
                max_size
            } else {
                return Err(format!("unknown stdio candidate `{}`", args.name));
            };
            let seq = explore_core::uxs::sequence_for_bound(bound, &uxs)
                .map_err(|e| e.to_string())?;
            tail = Some(explore_core::uxs::SequenceAgent::new(seq));
        }
        match tail.as_mut().unwrap().act(&obs) {
            AgentAction::Move(p) => pipe.say(&format!("move {p}"))?,
            AgentAction::Stop => {
                pipe.say("stop")?;
                return Ok(ExitCode::SUCCESS);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
