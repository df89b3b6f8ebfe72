//! Small fixed topologies used in golden tests and demos.
//!
//! Node letters map to ids in order: A = 0, B = 1, C = 2, D = 3.

use crate::assignment::{Channel, ChannelAssignment};
use crate::topology::{NodeId, Node, RadioId, WmnGraph};

/// Channels 1, 2 and 3.
pub fn three_channels() -> Vec<Channel> {
    vec![Channel(1), Channel(2), Channel(3)]
}

/// Four-node diamond A, B, C, D with 2, 1, 1 and 2 radios and edges A-B,
/// A-C, B-D, C-D. The opposite corners B-C and A-D are 400 m apart; every
/// edge is 282.8 m.
pub fn diamond() -> WmnGraph {
    let nodes = vec![
        node(0, 0.0, 200.0, 2),
        node(1, 200.0, 0.0, 1),
        node(2, 200.0, 400.0, 1),
        node(3, 400.0, 200.0, 2),
    ];
    let edges = vec![(0, 1), (0, 2), (1, 3), (2, 3)]
        .into_iter()
        .map(|(i, j)| (NodeId(i), NodeId(j)))
        .collect();
    WmnGraph::with_edges(nodes, 300.0, edges).expect("static topology")
}

/// The three chain layouts A-B-C (200 m spacing, 250 m range).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainLayout {
    /// Single radio at B, everything on one channel.
    SingleRadioCommonChannel,
    /// Two radios everywhere, both links on one channel.
    MultiRadioCommonChannel,
    /// Two radios everywhere, the two links on different channels.
    MultiRadioDifferentChannel,
}

impl ChainLayout {
    pub const ALL: [ChainLayout; 3] = [
        ChainLayout::SingleRadioCommonChannel,
        ChainLayout::MultiRadioCommonChannel,
        ChainLayout::MultiRadioDifferentChannel,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ChainLayout::SingleRadioCommonChannel => "SRCC",
            ChainLayout::MultiRadioCommonChannel => "MRCC",
            ChainLayout::MultiRadioDifferentChannel => "MRDC",
        }
    }
}

/// Builds a chain layout and its assignment. In every layout the A-B hop
/// uses radio A.1 and the B-C hop uses radio C.0; the remaining radios on A
/// and C sit on channels no B radio uses, so they form no links.
pub fn chain(layout: ChainLayout) -> (WmnGraph, ChannelAssignment) {
    let b_radios = match layout {
        ChainLayout::SingleRadioCommonChannel => 1,
        _ => 2,
    };
    let nodes = vec![node(0, 0.0, 0.0, 2), node(1, 200.0, 0.0, b_radios), node(2, 400.0, 0.0, 2)];
    let g = WmnGraph::from_range(nodes, 250.0).expect("static topology");
    // (A.0, A.1, B.0, B.1, C.0, C.1)
    let plan: [u16; 6] = match layout {
        ChainLayout::SingleRadioCommonChannel => [2, 1, 1, 0, 1, 2],
        ChainLayout::MultiRadioCommonChannel => [2, 1, 1, 1, 1, 2],
        ChainLayout::MultiRadioDifferentChannel => [3, 1, 1, 2, 2, 3],
    };
    let radios = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)];
    let entries = radios
        .iter()
        .zip(plan)
        .filter(|&(&(n, i), _)| g.has_radio(RadioId::new(n, i)))
        .map(|(&(n, i), c)| (RadioId::new(n, i), Channel(c)));
    let ca = ChannelAssignment::from_entries(&g, three_channels(), entries)
        .expect("static assignment")
        .with_provenance(layout.short_name(), None);
    (g, ca)
}

fn node(id: u32, x: f64, y: f64, radios: u16) -> Node {
    Node {
        id: NodeId(id),
        x,
        y,
        radios,
    }
}
