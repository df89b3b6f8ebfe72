//! Node-level mesh topology: nodes with coordinates and radio counts,
//! range-limited links, and the grid generator.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TopologyError;

/// Index of a mesh node. Node ids are dense: `0..node_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One radio interface: the owning node plus a local index on that node.
///
/// Ordering is lexicographic on `(node, index)`, which is the canonical order
/// used everywhere a deterministic iteration order matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RadioId {
    pub node: NodeId,
    pub index: u16,
}

impl RadioId {
    pub fn new(node: u32, index: u16) -> Self {
        Self { node: NodeId(node), index }
    }
}

impl fmt::Display for RadioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.index)
    }
}

/// An unordered link between two radios on distinct nodes, stored with
/// `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RadioLink {
    a: RadioId,
    b: RadioId,
}

impl RadioLink {
    pub fn new(x: RadioId, y: RadioId) -> Result<Self, TopologyError> {
        if x.node == y.node {
            return Err(TopologyError::SameNodeLink(x, y));
        }
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Ok(Self { a, b })
    }

    #[inline]
    pub fn a(&self) -> RadioId {
        self.a
    }

    #[inline]
    pub fn b(&self) -> RadioId {
        self.b
    }

    #[inline]
    pub fn nodes(&self) -> [NodeId; 2] {
        [self.a.node, self.b.node]
    }

    #[inline]
    pub fn radios(&self) -> [RadioId; 2] {
        [self.a, self.b]
    }

    pub fn shares_radio(&self, other: &RadioLink) -> bool {
        self.radios().iter().any(|r| other.radios().contains(r))
    }

    pub fn shares_node(&self, other: &RadioLink) -> bool {
        self.nodes().iter().any(|n| other.nodes().contains(n))
    }
}

impl fmt::Display for RadioLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    pub radios: u16,
}

impl Node {
    pub fn distance(&self, other: &Node) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A mesh topology `G = (V, E)`.
///
/// Construction does not check the topology invariants; call
/// [`WmnGraph::validate`] (every pipeline entry point does).
#[derive(Debug, Clone, PartialEq)]
pub struct WmnGraph {
    nodes: Vec<Node>,
    tx_range: f64,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
}

impl WmnGraph {
    /// Builds a topology from nodes and an explicit edge list. Edges are
    /// normalized to `(low, high)` and sorted, but duplicates and self-loops
    /// are kept so that `validate` can report them.
    pub fn with_edges(
        mut nodes: Vec<Node>,
        tx_range: f64,
        edges: Vec<(NodeId, NodeId)>,
    ) -> Result<Self, TopologyError> {
        nodes.sort_by_key(|n| n.id);
        for (i, n) in nodes.iter().enumerate() {
            if n.id.index() != i {
                return Err(TopologyError::NonDenseIds);
            }
        }
        let count = nodes.len();
        let mut normalized = Vec::with_capacity(edges.len());
        for (i, j) in edges {
            for n in [i, j] {
                if n.index() >= count {
                    return Err(TopologyError::UnknownNode(n));
                }
            }
            normalized.push(if i <= j { (i, j) } else { (j, i) });
        }
        normalized.sort_unstable();
        let mut adjacency = vec![Vec::new(); count];
        for &(i, j) in &normalized {
            if i != j {
                adjacency[i.index()].push(j);
                adjacency[j.index()].push(i);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            nodes,
            tx_range,
            edges: normalized,
            adjacency,
        })
    }

    /// Builds a topology whose edges are every node pair within `tx_range`.
    pub fn from_range(nodes: Vec<Node>, tx_range: f64) -> Result<Self, TopologyError> {
        let mut edges = Vec::new();
        for (i, u) in nodes.iter().enumerate() {
            for v in &nodes[i + 1..] {
                if u.distance(v) <= tx_range {
                    edges.push((u.id, v.id));
                }
            }
        }
        Self::with_edges(nodes, tx_range, edges)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, TopologyError> {
        self.nodes.get(id.index()).ok_or(TopologyError::UnknownNode(id))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tx_range(&self) -> f64 {
        self.tx_range
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Sorted neighbor list of `id`.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    pub fn radio_count(&self, id: NodeId) -> u16 {
        self.nodes[id.index()].radios
    }

    pub fn total_radios(&self) -> usize {
        self.nodes.iter().map(|n| n.radios as usize).sum()
    }

    pub fn has_radio(&self, r: RadioId) -> bool {
        self.nodes
            .get(r.node.index())
            .is_some_and(|n| r.index < n.radios)
    }

    pub fn check_radio(&self, r: RadioId) -> Result<(), TopologyError> {
        if self.has_radio(r) {
            Ok(())
        } else {
            Err(TopologyError::UnknownRadio(r))
        }
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.nodes[a.index()].distance(&self.nodes[b.index()])
    }

    /// Euclidean length of a radio link (the distance between its nodes).
    pub fn link_length(&self, l: &RadioLink) -> f64 {
        self.distance(l.a().node, l.b().node)
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j)| self.distance(i, j))
            .fold(0.0, f64::max)
    }

    /// Checks every topology invariant: positive range, at least one radio
    /// per node, no self-loops or duplicate edges, every edge within range,
    /// and connectivity.
    pub fn validate(&self) -> Result<(), TopologyError> {
        if !(self.tx_range > 0.0 && self.tx_range.is_finite()) {
            return Err(TopologyError::InvalidParameter(format!(
                "tx_range must be positive, got {}",
                self.tx_range
            )));
        }
        if self.nodes.is_empty() {
            return Err(TopologyError::InvalidParameter("topology has no nodes".into()));
        }
        for n in &self.nodes {
            if n.radios == 0 {
                return Err(TopologyError::NoRadios(n.id));
            }
            if !(n.x.is_finite() && n.y.is_finite()) {
                return Err(TopologyError::InvalidParameter(format!(
                    "node {} has non-finite coordinates",
                    n.id
                )));
            }
        }
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            if i == j {
                return Err(TopologyError::SelfLoop(i));
            }
            if k > 0 && self.edges[k - 1] == (i, j) {
                return Err(TopologyError::DuplicateEdge(i, j));
            }
            let d = self.distance(i, j);
            if d > self.tx_range {
                return Err(TopologyError::RangeViolation {
                    a: i,
                    b: j,
                    distance: d,
                    range: self.tx_range,
                });
            }
        }
        let reached = self.reachable_from(NodeId(0), |_, _| true);
        if let Some(missing) = reached.iter().position(|r| !r) {
            return Err(TopologyError::DisconnectedTopology {
                unreachable: NodeId(missing as u32),
            });
        }
        Ok(())
    }

    /// BFS reachability over the edges accepted by `allow`.
    pub fn reachable_from<F>(&self, start: NodeId, allow: F) -> Vec<bool>
    where
        F: Fn(NodeId, NodeId) -> bool,
    {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::new();
        seen[start.index()] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v.index()] && allow(u, v) {
                    seen[v.index()] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Hop distance from `start` to every node (`None` when unreachable).
    pub fn hop_distances(&self, start: NodeId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.nodes.len()];
        let mut queue = VecDeque::new();
        dist[start.index()] = Some(0);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap_or(0);
            for &v in self.neighbors(u) {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Generates a `rows x cols` lattice. Node `r * cols + c` sits at
/// `(c * spacing, r * spacing)`; edges join every pair within `tx_range`.
pub fn build_grid(
    rows: usize,
    cols: usize,
    spacing: f64,
    radios_per_node: u16,
    tx_range: f64,
) -> Result<WmnGraph, TopologyError> {
    if rows == 0 || cols == 0 {
        return Err(TopologyError::InvalidParameter(format!(
            "grid dimensions must be positive, got {rows}x{cols}"
        )));
    }
    if radios_per_node == 0 {
        return Err(TopologyError::InvalidParameter("radios_per_node must be >= 1".into()));
    }
    if !(spacing > 0.0 && spacing.is_finite()) || !(tx_range > 0.0 && tx_range.is_finite()) {
        return Err(TopologyError::InvalidParameter(format!(
            "spacing and tx_range must be positive, got {spacing} and {tx_range}"
        )));
    }
    if spacing > tx_range {
        return Err(TopologyError::SpacingExceedsRange { spacing, tx_range });
    }
    if rows.saturating_mul(cols) > u32::MAX as usize {
        return Err(TopologyError::InvalidParameter("grid too large".into()));
    }
    let nodes: Vec<Node> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| Node {
            id: NodeId((r * cols + c) as u32),
            x: c as f64 * spacing,
            y: r as f64 * spacing,
            radios: radios_per_node,
        })
        .collect();

    // Only lattice offsets within range can connect; scan those instead of
    // all node pairs so large grids stay linear.
    let reach = (tx_range / spacing).floor() as i64;
    let mut edges = Vec::new();
    for r in 0..rows as i64 {
        for c in 0..cols as i64 {
            let u = NodeId((r * cols as i64 + c) as u32);
            for dr in 0..=reach {
                for dc in -reach..=reach {
                    if dr == 0 && dc <= 0 {
                        continue;
                    }
                    let (r2, c2) = (r + dr, c + dc);
                    if r2 >= rows as i64 || c2 < 0 || c2 >= cols as i64 {
                        continue;
                    }
                    let d = ((dr * dr + dc * dc) as f64).sqrt() * spacing;
                    if d <= tx_range {
                        edges.push((u, NodeId((r2 * cols as i64 + c2) as u32)));
                    }
                }
            }
        }
    }
    WmnGraph::with_edges(nodes, tx_range, edges)
}

/// JSON topology file layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyFile {
    pub tx_range_m: f64,
    pub nodes: Vec<TopologyFileNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[u32; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyFileNode {
    pub id: u32,
    pub x_m: f64,
    pub y_m: f64,
    pub radios: u16,
}

impl TopologyFile {
    pub fn from_graph(g: &WmnGraph) -> Self {
        Self {
            tx_range_m: g.tx_range,
            nodes: g
                .nodes
                .iter()
                .map(|n| TopologyFileNode {
                    id: n.id.0,
                    x_m: n.x,
                    y_m: n.y,
                    radios: n.radios,
                })
                .collect(),
            edges: Some(g.edges.iter().map(|&(i, j)| [i.0, j.0]).collect()),
        }
    }

    /// Converts to a graph. Edges are derived from range when absent. The
    /// result is not validated.
    pub fn into_graph(self) -> Result<WmnGraph, TopologyError> {
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| Node {
                id: NodeId(n.id),
                x: n.x_m,
                y: n.y_m,
                radios: n.radios,
            })
            .collect();
        match self.edges {
            Some(edges) => WmnGraph::with_edges(
                nodes,
                self.tx_range_m,
                edges.into_iter().map(|[i, j]| (NodeId(i), NodeId(j))).collect(),
            ),
            None => WmnGraph::from_range(nodes, self.tx_range_m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(dist: f64, with_edge: bool) -> WmnGraph {
        let nodes = vec![
            Node { id: NodeId(0), x: 0.0, y: 0.0, radios: 1 },
            Node { id: NodeId(1), x: dist, y: 0.0, radios: 1 },
        ];
        let edges = if with_edge { vec![(NodeId(0), NodeId(1))] } else { vec![] };
        WmnGraph::with_edges(nodes, 250.0, edges).unwrap()
    }

    #[test]
    fn single_node_grid() {
        let g = build_grid(1, 1, 200.0, 2, 250.0).unwrap();
        assert_eq!(g.node_count(), 1);
        assert!(g.edges().is_empty());
        g.validate().unwrap();
    }

    #[test]
    fn five_by_five_matches_pair_enumeration() {
        let g = build_grid(5, 5, 200.0, 2, 250.0).unwrap();
        // brute force over all 300 node pairs
        let nodes = g.nodes();
        let mut count = 0;
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if nodes[i].distance(&nodes[j]) <= 250.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 40);
        assert_eq!(g.edges().len(), 40);
        assert_eq!(g.total_radios(), 50);
    }

    #[test]
    fn three_node_chain() {
        let g = build_grid(1, 3, 200.0, 2, 250.0).unwrap();
        assert_eq!(g.edges(), &[(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]);
    }

    #[test]
    fn generator_matches_range_derivation() {
        for (rows, cols, spacing, range) in [(4, 6, 100.0, 150.0), (3, 3, 100.0, 250.0), (2, 7, 50.0, 50.0)] {
            let g = build_grid(rows, cols, spacing, 1, range).unwrap();
            let h = WmnGraph::from_range(g.nodes().to_vec(), range).unwrap();
            assert_eq!(g.edges(), h.edges());
        }
    }

    #[test]
    fn rejects_spacing_beyond_range() {
        assert!(matches!(
            build_grid(2, 2, 300.0, 1, 250.0),
            Err(TopologyError::SpacingExceedsRange { .. })
        ));
    }

    #[test]
    fn range_violation() {
        assert!(matches!(pair(300.0, true).validate(), Err(TopologyError::RangeViolation { .. })));
    }

    #[test]
    fn disconnected() {
        assert!(matches!(
            pair(300.0, false).validate(),
            Err(TopologyError::DisconnectedTopology { .. })
        ));
    }

    #[test]
    fn duplicate_edge() {
        let nodes = vec![
            Node { id: NodeId(0), x: 0.0, y: 0.0, radios: 1 },
            Node { id: NodeId(1), x: 10.0, y: 0.0, radios: 1 },
        ];
        let g = WmnGraph::with_edges(nodes, 250.0, vec![(NodeId(0), NodeId(1)), (NodeId(1), NodeId(0))])
            .unwrap();
        assert!(matches!(g.validate(), Err(TopologyError::DuplicateEdge(..))));
    }

    #[test]
    fn radio_link_is_canonical() {
        let x = RadioId::new(3, 0);
        let y = RadioId::new(1, 1);
        let l = RadioLink::new(x, y).unwrap();
        assert_eq!(l.a(), y);
        assert_eq!(l, RadioLink::new(y, x).unwrap());
        assert!(RadioLink::new(x, RadioId::new(3, 1)).is_err());
    }

    #[test]
    fn topology_file_derives_edges() {
        let json = r#"{"tx_range_m": 250.0, "nodes": [
            {"id": 1, "x_m": 200.0, "y_m": 0.0, "radios": 1},
            {"id": 0, "x_m": 0.0, "y_m": 0.0, "radios": 2},
            {"id": 2, "x_m": 400.0, "y_m": 0.0, "radios": 1}]}"#;
        let file: TopologyFile = serde_json::from_str(json).unwrap();
        let g = file.into_graph().unwrap();
        g.validate().unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.radio_count(NodeId(0)), 2);
        let back = TopologyFile::from_graph(&g).into_graph().unwrap();
        assert_eq!(back, g);
    }
}
