use thiserror::Error;

use crate::topology::{NodeId, RadioId, RadioLink};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("topology is disconnected: node {unreachable} is unreachable from node 0")]
    DisconnectedTopology { unreachable: NodeId },
    #[error("edge {a}-{b} spans {distance:.3} m, beyond the {range} m transmission range")]
    RangeViolation {
        a: NodeId,
        b: NodeId,
        distance: f64,
        range: f64,
    },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("node {0} has no radios")]
    NoRadios(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown radio {0}")]
    UnknownRadio(RadioId),
    #[error("radios {0} and {1} are on the same node")]
    SameNodeLink(RadioId, RadioId),
    #[error("node ids must be dense (0..n)")]
    NonDenseIds,
    #[error("grid spacing {spacing} m exceeds the {tx_range} m transmission range")]
    SpacingExceedsRange { spacing: f64, tx_range: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MmcgError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("no channel recorded for radio {0}")]
    UnassignedRadio(RadioId),
    #[error("channel {channel} of radio {radio} is not in the channel set")]
    ChannelOutOfSet { radio: RadioId, channel: u16 },
    #[error("unknown conflict-graph vertex {0}")]
    UnknownVertex(usize),
    #[error("assignment does not match the topology: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CaError {
    #[error(transparent)]
    Mmcg(#[from] MmcgError),
    #[error("BFS channel assignment needs a gateway node")]
    GatewayMissing,
    #[error("gateway {0} is not in the topology")]
    UnknownGateway(NodeId),
    #[error("channel set must not be empty")]
    NoChannels,
    #[error("duplicate channel {0} in the channel set")]
    DuplicateChannel(u16),
    #[error("conflict graph was built under a non-default assignment")]
    NotDefaultContext,
}

impl From<TopologyError> for CaError {
    fn from(e: TopologyError) -> Self {
        CaError::Mmcg(e.into())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Mmcg(#[from] MmcgError),
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error("no route from {src} to {dst} over operational links")]
    NoRoute { src: NodeId, dst: NodeId },
    #[error("flow source and destination are both {0}")]
    DegenerateFlow(NodeId),
    #[error("routed link {0} is not a vertex of the conflict graph")]
    LinkNotInConflictGraph(RadioLink),
    #[error("clique enumeration exceeded its budget of {budget} maximal cliques")]
    CliqueBudgetExceeded { budget: usize },
    #[error("unknown test case: class {class}, case {case}")]
    UnknownCase { class: u8, case: String },
    #[error("grid {rows}x{cols} is too small for this flow suite")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("correlation needs at least 3 records, got {0}")]
    InsufficientData(usize),
    #[error("physical rate must be positive, got {0}")]
    InvalidRate(f64),
}

impl From<TopologyError> for EvalError {
    fn from(e: TopologyError) -> Self {
        EvalError::Mmcg(e.into())
    }
}
