#![forbid(unsafe_code)]

//! Exploration of anonymous port-numbered graphs by a single mobile agent.
//!
//! The crate models connected graphs whose nodes are unlabeled while every
//! node of degree `d` numbers its incident edge ends `0..d-1`. A
//! deterministic agent walks such a graph observing only entry ports and
//! degrees, and must visit every node and stop. On top of the graph model the
//! crate provides:
//!
//! * truncated views (universal-cover truncations) and two independent ways
//!   of comparing them ([`view`]);
//! * a deterministic agent runtime with full trace recording ([`agent`]);
//! * graph families with separation witnesses, and a witness search
//!   ([`family`]);
//! * exploration algorithms, from the basic tree walk to family-dedicated
//!   walkers and a witness-driven general explorer ([`explore`]);
//! * universal exploration sequences: search, exhaustive verification, and
//!   replay ([`uxs`]);
//! * a yes/no-oracle protocol that lets one agent explore any family with
//!   verified witnesses ([`oracle`]);
//! * an executable adversary that defeats every candidate "universal"
//!   explorer that reads its input family through an enumeration or
//!   membership subroutine ([`refuter`]).

pub mod agent;
pub mod canon;
pub mod enumerate;
pub mod explore;
pub mod family;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod refuter;
pub mod uxs;
pub mod view;

pub use canon::{canonical_code, port_isomorphic, CanonicalCode};
pub use graph::{pendant_ring, ring, single_edge, studded_ring, validate, NodeId, PortGraph};
