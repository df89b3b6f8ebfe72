//! Conflict graphs for multi-radio multi-channel wireless mesh networks.
//!
//! The pipeline runs topology → radio graph → conflict graph → channel
//! assignment → conflict-aware scheduling:
//!
//! * [`topology`]: node-level mesh model and grid generator.
//! * [`interference`]: the protocol-model link-conflict predicate.
//! * [`mmcg`]: radio-graph expansion, the classical and the
//!   co-location-aware (enhanced) conflict-graph builders, and
//!   interference-degree metrics.
//! * [`ca`]: BFS, maximal-independent-set, centralized and clique-based
//!   channel assignment.
//! * [`evalsim`]: routing, max-min fair TDMA scheduling over conflict
//!   cliques, the grid flow suites and rank correlation.
//! * [`experiment`]: seeded, parallel experiment runs shared by the CLI and
//!   the acceptance tests.

pub mod assignment;
pub mod ca;
pub mod error;
pub mod evalsim;
pub mod experiment;
pub mod interference;
pub mod mmcg;
pub mod par;
pub mod scenarios;
pub mod seeding;
pub mod topology;

pub use assignment::{Channel, ChannelAssignment};
pub use error::{CaError, EvalError, MmcgError, TopologyError};
pub use interference::{links_conflict_protocol, ConflictModel, ProtocolModel, ProtocolModelParams};
pub use mmcg::{
    build_cmmcg, build_emmcg, expand, interference_degree, total_interference_degree, ConflictGraph,
    RadioGraph, Variant,
};
pub use topology::{build_grid, NodeId, RadioId, RadioLink, WmnGraph};
