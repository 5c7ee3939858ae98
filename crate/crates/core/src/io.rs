//! File formats: graph documents, DOT export, trace streams.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agent::{QueryDetail, RunStatus, Trace};
use crate::graph::{PortGraph, Violation};

/// The on-disk graph document: node count plus per-node port lists of
/// `[neighbor, reversePort]` pairs.
#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    adj: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug)]
pub enum GraphIoError {
    Json(serde_json::Error),
    NodeCountMismatch { declared: usize, actual: usize },
    Invalid(Violation),
}

impl fmt::Display for GraphIoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphIoError::Json(e) => write!(f, "malformed graph document: {e}"),
            GraphIoError::NodeCountMismatch { declared, actual } => {
                write!(f, "declared {declared} nodes but adjacency lists {actual}")
            }
            GraphIoError::Invalid(v) => write!(f, "invalid graph: {v}"),
        }
    }
}

impl std::error::Error for GraphIoError {}

pub fn graph_to_json(g: &PortGraph) -> String {
    let file = GraphFile {
        n: g.node_count(),
        adj: g.adjacency().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("graph serialization cannot fail")
}

/// Single-line rendering, for line-oriented protocols.
pub fn graph_to_json_line(g: &PortGraph) -> String {
    let file = GraphFile {
        n: g.node_count(),
        adj: g.adjacency().to_vec(),
    };
    serde_json::to_string(&file).expect("graph serialization cannot fail")
}

pub fn graph_from_json(text: &str) -> Result<PortGraph, GraphIoError> {
    let file: GraphFile = serde_json::from_str(text).map_err(GraphIoError::Json)?;
    if file.n != file.adj.len() {
        return Err(GraphIoError::NodeCountMismatch {
            declared: file.n,
            actual: file.adj.len(),
        });
    }
    PortGraph::new(file.adj).map_err(GraphIoError::Invalid)
}

/// DOT rendering with port numbers as edge-end labels.
pub fn graph_to_dot(g: &PortGraph) -> String {
    let mut out = String::from("graph g {\n  node [shape=circle];\n");
    for u in g.nodes() {
        for p in 0..g.degree(u) {
            let (v, q) = g.step(u, p);
            if u < v {
                out.push_str(&format!(
                    "  {u} -- {v} [taillabel=\"{p}\", headlabel=\"{q}\"];\n"
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn detail_line(d: &QueryDetail) -> String {
    match d {
        QueryDetail::IsNthMember { i, j, answer } => {
            format!("is-nth-member i={i} j={j} answer={answer}")
        }
        QueryDetail::DepthWitnessIs { i, v, j, answer } => {
            format!("depth-witness-is i={i} v={v} j={j} answer={answer}")
        }
        QueryDetail::RangeWitnessIs { i, v, j, answer } => {
            format!("range-witness-is i={i} v={v} j={j} answer={answer}")
        }
        QueryDetail::Enumerate { i, size } => format!("enumerate i={i} size={size}"),
        QueryDetail::Member { size, answer } => format!("member size={size} answer={answer}"),
        QueryDetail::Predicate { name, answer } => format!("predicate {name} answer={answer}"),
    }
}

/// Line-delimited trace: a header, one record per step with any queries
/// issued at that step interleaved before it, and a final status line.
pub fn trace_to_lines(t: &Trace) -> String {
    let mut out = format!("start {}\n", t.start);
    let mut qi = 0;
    for (idx, step) in t.steps.iter().enumerate() {
        while qi < t.queries.len() && t.queries[qi].step <= idx {
            out.push_str(&format!(
                "query {} {}\n",
                t.queries[qi].step,
                detail_line(&t.queries[qi].detail)
            ));
            qi += 1;
        }
        out.push_str(&format!(
            "{} {} {} {}\n",
            idx, step.exit_port, step.entry_port, step.degree
        ));
    }
    for q in &t.queries[qi..] {
        out.push_str(&format!("query {} {}\n", q.step, detail_line(&q.detail)));
    }
    let status = match &t.status {
        RunStatus::Stopped => "stopped".to_string(),
        RunStatus::StepLimit => "step-limit".to_string(),
        RunStatus::Faulted(why) => format!("faulted {why}"),
    };
    out.push_str(&format!("status {status}\n"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pendant_ring, single_edge};

    #[test]
    fn graph_documents_round_trip() {
        let g = pendant_ring(4).unwrap();
        let text = graph_to_json(&g);
        let back = graph_from_json(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        assert!(graph_from_json("{").is_err());
        // Valid JSON, broken symmetry.
        let bad = r#"{"n": 2, "adj": [[[1, 0]], [[0, 1]]]}"#;
        assert!(matches!(
            graph_from_json(bad),
            Err(GraphIoError::Invalid(_))
        ));
        let mismatched = r#"{"n": 3, "adj": [[[1, 0]], [[0, 0]]]}"#;
        assert!(matches!(
            graph_from_json(mismatched),
            Err(GraphIoError::NodeCountMismatch { .. })
        ));
    }

    #[test]
    fn dot_lists_each_edge_once_with_port_labels() {
        let dot = graph_to_dot(&single_edge());
        assert!(dot.contains("0 -- 1 [taillabel=\"0\", headlabel=\"0\"];"));
        assert_eq!(dot.matches(" -- ").count(), 1);
    }
}
