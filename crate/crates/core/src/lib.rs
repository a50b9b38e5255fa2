//! Multi-round influence maximization and self-activation influence
//! maximization.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: graphs, live-edge sampling, reverse-reachable sampling,
//! greedy and IMM-style solvers, and exact enumeration oracles. File
//! formats, reports and the command line live in the `mrim` crate.
//!
//! Module map:
//!
//! * [`graph`]: immutable weighted digraph, live-edge graphs, reachability.
//! * [`mrt`]: the multi-round triggering model and its Monte Carlo spread.
//! * [`greedy`]: DoubleGreedy (within-round) and GlobalGreedy (cross-round).
//! * [`ris`]: RR sets, RR sequences, coverage stores, node selection and
//!   the IMM sample-size machinery.
//! * [`adaptive`]: feedback, policies, AdaGreedy and AdaIMM.
//! * [`saic`]: the self-activation IC model, P-RR sets and the
//!   IMM-BIM / IMM-BPIM / IMM-PIM solvers.
//! * [`oracle`]: exact enumeration and exhaustive optimizers for tests.
#![no_std]

extern crate alloc;

pub mod adaptive;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod mrt;
pub mod nodeset;
pub mod oracle;
pub mod ris;
pub mod rng;
pub mod saic;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, GraphBuilder, LiveEdgeGraph, NodeId};
pub use mrt::{RoundNodePair, SeedSchedule, SpreadEstimate};
pub use nodeset::NodeSet;
pub use rng::StreamRng;
