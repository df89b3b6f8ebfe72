//! Multi-radio multi-channel conflict graphs.
//!
//! [`RadioGraph`] splits every mesh node into its radios and joins every
//! radio pair across each mesh edge. [`build_cmmcg`] turns the radio links
//! into conflict-graph vertices and connects pairs that the interference
//! model flags on a common channel. [`build_emmcg`] additionally connects
//! same-channel links that start or end at the same mesh node, which is the
//! interference between co-located radios that the classical graph misses.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assignment::{Channel, ChannelAssignment};
use crate::error::MmcgError;
use crate::interference::ConflictModel;
use crate::par;
use crate::topology::{NodeId, RadioId, RadioLink, WmnGraph};

/// Which builder produced a conflict graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Classical,
    Enhanced,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Classical, Variant::Enhanced];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Classical => "classical",
            Variant::Enhanced => "enhanced",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" | "c" | "c-mmcg" => Ok(Variant::Classical),
            "enhanced" | "e" | "e-mmcg" => Ok(Variant::Enhanced),
            other => Err(format!("unknown variant {other:?} (expected classical or enhanced)")),
        }
    }
}

/// The intermediate radio-level graph: one vertex per radio, one link per
/// radio pair across every mesh edge.
#[derive(Debug, Clone)]
pub struct RadioGraph {
    topology: Arc<WmnGraph>,
    radios: Vec<RadioId>,
    links: Vec<RadioLink>,
    node_links: Vec<Vec<u32>>,
    radio_links: Vec<Vec<Vec<u32>>>,
}

/// Expands a validated topology into its radio graph. Links come out in
/// canonical order.
pub fn expand(g: &WmnGraph) -> Result<RadioGraph, MmcgError> {
    RadioGraph::new(Arc::new(g.clone()))
}

impl RadioGraph {
    pub fn new(topology: Arc<WmnGraph>) -> Result<Self, MmcgError> {
        topology.validate()?;
        let g = topology.as_ref();
        let radios: Vec<RadioId> = g
            .nodes()
            .iter()
            .flat_map(|n| (0..n.radios).map(move |i| RadioId { node: n.id, index: i }))
            .collect();
        let mut links = Vec::new();
        for &(i, j) in g.edges() {
            for x in 0..g.radio_count(i) {
                for y in 0..g.radio_count(j) {
                    links.push(RadioLink::new(
                        RadioId { node: i, index: x },
                        RadioId { node: j, index: y },
                    )?);
                }
            }
        }
        links.sort_unstable();
        let mut node_links = vec![Vec::new(); g.node_count()];
        let mut radio_links: Vec<Vec<Vec<u32>>> = g
            .nodes()
            .iter()
            .map(|n| vec![Vec::new(); n.radios as usize])
            .collect();
        for (k, l) in links.iter().enumerate() {
            for r in l.radios() {
                node_links[r.node.index()].push(k as u32);
                radio_links[r.node.index()][r.index as usize].push(k as u32);
            }
        }
        Ok(Self {
            topology,
            radios,
            links,
            node_links,
            radio_links,
        })
    }

    pub fn topology(&self) -> &WmnGraph {
        &self.topology
    }

    pub fn topology_arc(&self) -> Arc<WmnGraph> {
        Arc::clone(&self.topology)
    }

    pub fn radios(&self) -> &[RadioId] {
        &self.radios
    }

    pub fn links(&self) -> &[RadioLink] {
        &self.links
    }

    pub fn link_index(&self, l: &RadioLink) -> Option<usize> {
        self.links.binary_search(l).ok()
    }

    /// Indices of links with an endpoint on node `n`.
    pub fn links_at_node(&self, n: NodeId) -> &[u32] {
        &self.node_links[n.index()]
    }

    /// Indices of links using radio `r`.
    pub fn links_at_radio(&self, r: RadioId) -> &[u32] {
        &self.radio_links[r.node.index()][r.index as usize]
    }

    /// Links between two specific nodes, in canonical order.
    pub fn links_between(&self, u: NodeId, v: NodeId) -> impl Iterator<Item = u32> + '_ {
        self.node_links[u.index()].iter().copied().filter(move |&k| {
            let [a, b] = self.links[k as usize].nodes();
            (a == u && b == v) || (a == v && b == u)
        })
    }
}

/// A conflict graph over radio links.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    variant: Variant,
    vertices: Vec<RadioLink>,
    vertex_channels: Vec<Channel>,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
    context: ChannelAssignment,
}

impl ConflictGraph {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn vertices(&self) -> &[RadioLink] {
        &self.vertices
    }

    pub fn vertex_channel(&self, v: usize) -> Channel {
        self.vertex_channels[v]
    }

    /// Sorted `(i, j)` pairs with `i < j`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn context(&self) -> &ChannelAssignment {
        &self.context
    }

    pub fn vertex_index(&self, l: &RadioLink) -> Option<usize> {
        self.vertices.binary_search(l).ok()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency
            .get(i)
            .is_some_and(|n| n.binary_search(&(j as u32)).is_ok())
    }

    /// Edges as pairs of radio links, each pair ordered.
    pub fn link_pairs(&self) -> Vec<(RadioLink, RadioLink)> {
        self.edges
            .iter()
            .map(|&(i, j)| (self.vertices[i as usize], self.vertices[j as usize]))
            .collect()
    }

    /// TID of the assignment `ca` against this graph's conflict relation.
    ///
    /// Only valid for graphs built under a uniform assignment, where every
    /// radio link is a vertex and every potential conflict is an edge; the
    /// result equals building the graph afresh under `ca` and counting its
    /// edges.
    pub fn tid_under(&self, ca: &ChannelAssignment) -> Result<usize, MmcgError> {
        let channels = self
            .vertices
            .iter()
            .map(|l| ca.channel_of_link(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(i, j)| {
                let ci = channels[i as usize];
                ci.is_some() && ci == channels[j as usize]
            })
            .count())
    }

    pub fn to_file(&self) -> ConflictGraphFile {
        ConflictGraphFile {
            variant: self.variant,
            vertices: self
                .vertices
                .iter()
                .map(|l| {
                    [
                        [l.a().node.0, l.a().index as u32],
                        [l.b().node.0, l.b().index as u32],
                    ]
                })
                .collect(),
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
            tid: self.edges.len(),
        }
    }

    /// Per-vertex interference degrees as CSV.
    pub fn write_degree_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "vertex,a_node,a_radio,b_node,b_radio,channel,interference_degree")?;
        for (k, l) in self.vertices.iter().enumerate() {
            writeln!(
                w,
                "{k},{},{},{},{},{},{}",
                l.a().node,
                l.a().index,
                l.b().node,
                l.b().index,
                self.vertex_channels[k],
                self.adjacency[k].len()
            )?;
        }
        Ok(())
    }
}

/// JSON layout of a conflict-graph file. Radios are `[node, index]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictGraphFile {
    pub variant: Variant,
    pub vertices: Vec<[[u32; 2]; 2]>,
    pub edges: Vec<[u32; 2]>,
    pub tid: usize,
}

/// Classical conflict graph: radio co-location is ignored.
pub fn build_cmmcg(
    rg: &RadioGraph,
    ca: &ChannelAssignment,
    model: &dyn ConflictModel,
) -> Result<ConflictGraph, MmcgError> {
    build(rg, ca, model, Variant::Classical)
}

/// Enhanced conflict graph: classical edges plus every same-channel pair of
/// links that meet at a common mesh node.
pub fn build_emmcg(
    rg: &RadioGraph,
    ca: &ChannelAssignment,
    model: &dyn ConflictModel,
) -> Result<ConflictGraph, MmcgError> {
    build(rg, ca, model, Variant::Enhanced)
}

pub fn build(
    rg: &RadioGraph,
    ca: &ChannelAssignment,
    model: &dyn ConflictModel,
    variant: Variant,
) -> Result<ConflictGraph, MmcgError> {
    let g = rg.topology();
    ca.check(g)?;

    // V_c: operational links only
    let mut vertices = Vec::new();
    let mut vertex_channels = Vec::new();
    let mut vertex_of_link = vec![u32::MAX; rg.links().len()];
    for (k, l) in rg.links().iter().enumerate() {
        if let Some(c) = ca.channel_of_link(l)? {
            vertex_of_link[k] = vertices.len() as u32;
            vertices.push(*l);
            vertex_channels.push(c);
        }
    }

    let near = near_nodes(g, model.reach(g));
    let rows: Vec<Result<Vec<u32>, MmcgError>> = par::map_range(vertices.len(), |i| {
        let x = &vertices[i];
        let mut candidates: Vec<u32> = Vec::new();
        for u in x.nodes() {
            for &w in &near[u.index()] {
                for &k in rg.links_at_node(w) {
                    let j = vertex_of_link[k as usize];
                    if j != u32::MAX && (j as usize) > i && vertex_channels[j as usize] == vertex_channels[i] {
                        candidates.push(j);
                    }
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut out = Vec::new();
        for j in candidates {
            let l = &vertices[j as usize];
            let rci = variant == Variant::Enhanced && x.shares_node(l);
            if rci || model.conflicts(g, x, l)? {
                out.push(j);
            }
        }
        Ok(out)
    });

    let mut edges = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        edges.extend(row?.into_iter().map(|j| (i as u32, j)));
    }
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for &(i, j) in &edges {
        adjacency[i as usize].push(j);
        adjacency[j as usize].push(i);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(ConflictGraph {
        variant,
        vertices,
        vertex_channels,
        edges,
        adjacency,
        context: ca.clone(),
    })
}

/// For every node, the sorted list of nodes within `reach` (itself included).
/// `None` means every node.
fn near_nodes(g: &WmnGraph, reach: Option<f64>) -> Vec<Vec<NodeId>> {
    let nodes = g.nodes();
    let all: Vec<NodeId> = nodes.iter().map(|n| n.id).collect();
    let Some(reach) = reach.filter(|r| r.is_finite()) else {
        return vec![all; nodes.len()];
    };
    let cell = reach.max(f64::MIN_POSITIVE);
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<NodeId>> = HashMap::new();
    for n in nodes {
        buckets.entry(key(n.x, n.y)).or_default().push(n.id);
    }
    par::map_slice(nodes, |n| {
        let (cx, cy) = key(n.x, n.y);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = buckets.get(&(cx + dx, cy + dy)) {
                    out.extend(bucket.iter().copied().filter(|&m| g.distance(n.id, m) <= reach));
                }
            }
        }
        out.sort_unstable();
        out
    })
}

/// Number of conflict edges at vertex `v`.
pub fn interference_degree(cg: &ConflictGraph, v: usize) -> Result<usize, MmcgError> {
    cg.adjacency
        .get(v)
        .map(Vec::len)
        .ok_or(MmcgError::UnknownVertex(v))
}

/// Half the degree sum, i.e. the number of conflict edges.
pub fn total_interference_degree(cg: &ConflictGraph) -> usize {
    cg.edges.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::ProtocolModel;
    use crate::topology::{build_grid, Node};

    fn r(n: u32, i: u16) -> RadioId {
        RadioId::new(n, i)
    }

    fn link(a: (u32, u16), b: (u32, u16)) -> RadioLink {
        RadioLink::new(r(a.0, a.1), r(b.0, b.1)).unwrap()
    }

    #[test]
    fn expand_diamond_radios() {
        let nodes = vec![
            Node { id: NodeId(0), x: 0.0, y: 200.0, radios: 2 },
            Node { id: NodeId(1), x: 200.0, y: 0.0, radios: 1 },
            Node { id: NodeId(2), x: 200.0, y: 400.0, radios: 1 },
            Node { id: NodeId(3), x: 400.0, y: 200.0, radios: 2 },
        ];
        let g = WmnGraph::with_edges(
            nodes,
            300.0,
            vec![(NodeId(0), NodeId(1)), (NodeId(0), NodeId(2)), (NodeId(1), NodeId(3)), (NodeId(2), NodeId(3))],
        )
        .unwrap();
        let rg = expand(&g).unwrap();
        assert_eq!(rg.radios().len(), 6);
        let expected = vec![
            link((0, 0), (1, 0)),
            link((0, 0), (2, 0)),
            link((0, 1), (1, 0)),
            link((0, 1), (2, 0)),
            link((1, 0), (3, 0)),
            link((1, 0), (3, 1)),
            link((2, 0), (3, 0)),
            link((2, 0), (3, 1)),
        ];
        assert_eq!(rg.links(), expected.as_slice());
    }

    #[test]
    fn expand_counts() {
        let g = build_grid(1, 2, 200.0, 1, 250.0).unwrap();
        assert_eq!(expand(&g).unwrap().links().len(), 1);
        let g = build_grid(5, 5, 200.0, 2, 250.0).unwrap();
        let expected: usize = g
            .edges()
            .iter()
            .map(|&(i, j)| g.radio_count(i) as usize * g.radio_count(j) as usize)
            .sum();
        assert_eq!(expected, 160);
        assert_eq!(expand(&g).unwrap().links().len(), 160);
    }

    #[test]
    fn expand_rejects_invalid_topology() {
        let nodes = vec![
            Node { id: NodeId(0), x: 0.0, y: 0.0, radios: 1 },
            Node { id: NodeId(1), x: 300.0, y: 0.0, radios: 1 },
        ];
        let g = WmnGraph::with_edges(nodes, 250.0, vec![]).unwrap();
        assert!(expand(&g).is_err());
    }

    #[test]
    fn degrees_and_tid() {
        let g = build_grid(1, 3, 200.0, 1, 250.0).unwrap();
        let rg = expand(&g).unwrap();
        let model = ProtocolModel::default();
        let ca = ChannelAssignment::common(&g);
        let cg = build_cmmcg(&rg, &ca, &model).unwrap();
        assert_eq!(total_interference_degree(&cg), 1);
        assert_eq!(interference_degree(&cg, 0).unwrap(), 1);
        assert_eq!(interference_degree(&cg, 5), Err(MmcgError::UnknownVertex(5)));
    }

    #[test]
    fn isolated_vertex_has_zero_degree() {
        let g = build_grid(1, 2, 200.0, 1, 250.0).unwrap();
        let rg = expand(&g).unwrap();
        let cg = build_emmcg(&rg, &ChannelAssignment::common(&g), &ProtocolModel::default()).unwrap();
        assert_eq!(cg.vertices().len(), 1);
        assert_eq!(interference_degree(&cg, 0).unwrap(), 0);
        assert_eq!(total_interference_degree(&cg), 0);
    }

    #[test]
    fn file_and_csv_layout() {
        let g = build_grid(1, 3, 200.0, 1, 250.0).unwrap();
        let rg = expand(&g).unwrap();
        let cg = build_emmcg(&rg, &ChannelAssignment::common(&g), &ProtocolModel::default()).unwrap();
        let json = serde_json::to_string(&cg.to_file()).unwrap();
        assert_eq!(
            json,
            r#"{"variant":"enhanced","vertices":[[[0,0],[1,0]],[[1,0],[2,0]]],"edges":[[0,1]],"tid":1}"#
        );
        let mut buf = Vec::new();
        cg.write_degree_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1), Some("0,0,0,1,0,1,1"));
    }

    #[test]
    fn variant_parse() {
        assert_eq!("Enhanced".parse::<Variant>(), Ok(Variant::Enhanced));
        assert_eq!("c-mmcg".parse::<Variant>(), Ok(Variant::Classical));
        assert!("x".parse::<Variant>().is_err());
    }
}
