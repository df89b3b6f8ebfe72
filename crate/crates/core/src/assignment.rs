//! Radio-to-channel maps and their file formats.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{MmcgError, TopologyError};
use crate::topology::{NodeId, RadioId, RadioLink, WmnGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Channel(pub u16);

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Channel of every radio in a topology, plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelAssignment {
    channel_set: Vec<Channel>,
    per_node: Vec<Vec<Channel>>,
    scheme: String,
    seed: Option<u64>,
}

impl ChannelAssignment {
    /// Every radio on `channel_set[0]`: the maximal-conflict configuration
    /// used before any channel assignment runs.
    pub fn all_default(g: &WmnGraph, channel_set: &[Channel]) -> Result<Self, MmcgError> {
        let first = *channel_set
            .first()
            .ok_or_else(|| MmcgError::ShapeMismatch("empty channel set".into()))?;
        Ok(Self::uniform(g, first, channel_set.to_vec(), "all-default"))
    }

    /// Every radio on channel 1 of the single-channel set `[1]`.
    pub fn common(g: &WmnGraph) -> Self {
        Self::uniform(g, Channel(1), vec![Channel(1)], "all-default")
    }

    fn uniform(g: &WmnGraph, channel: Channel, channel_set: Vec<Channel>, scheme: &str) -> Self {
        Self {
            channel_set,
            per_node: g
                .nodes()
                .iter()
                .map(|n| vec![channel; n.radios as usize])
                .collect(),
            scheme: scheme.to_string(),
            seed: None,
        }
    }

    /// Builds an assignment from explicit `(radio, channel)` entries. Every
    /// radio of `g` must appear exactly once.
    pub fn from_entries<I>(
        g: &WmnGraph,
        channel_set: Vec<Channel>,
        entries: I,
    ) -> Result<Self, MmcgError>
    where
        I: IntoIterator<Item = (RadioId, Channel)>,
    {
        let mut per_node: Vec<Vec<Option<Channel>>> = g
            .nodes()
            .iter()
            .map(|n| vec![None; n.radios as usize])
            .collect();
        for (r, c) in entries {
            g.check_radio(r)?;
            let slot = &mut per_node[r.node.index()][r.index as usize];
            if slot.is_some() {
                return Err(MmcgError::ShapeMismatch(format!("radio {r} listed twice")));
            }
            *slot = Some(c);
        }
        let per_node = per_node
            .into_iter()
            .enumerate()
            .map(|(n, radios)| {
                radios
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| c.ok_or(MmcgError::UnassignedRadio(RadioId::new(n as u32, i as u16))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ca = Self {
            channel_set,
            per_node,
            scheme: "manual".into(),
            seed: None,
        };
        ca.check(g)?;
        Ok(ca)
    }

    pub(crate) fn from_parts(
        channel_set: Vec<Channel>,
        per_node: Vec<Vec<Channel>>,
        scheme: &str,
        seed: Option<u64>,
    ) -> Self {
        Self {
            channel_set,
            per_node,
            scheme: scheme.to_string(),
            seed,
        }
    }

    /// Checks that the assignment covers exactly the radios of `g` and only
    /// uses channels from the channel set.
    pub fn check(&self, g: &WmnGraph) -> Result<(), MmcgError> {
        if self.channel_set.is_empty() {
            return Err(MmcgError::ShapeMismatch("empty channel set".into()));
        }
        if self.per_node.len() != g.node_count() {
            return Err(MmcgError::ShapeMismatch(format!(
                "{} nodes assigned, topology has {}",
                self.per_node.len(),
                g.node_count()
            )));
        }
        for (n, radios) in self.per_node.iter().enumerate() {
            let id = NodeId(n as u32);
            if radios.len() != g.radio_count(id) as usize {
                return Err(MmcgError::ShapeMismatch(format!(
                    "node {id} has {} radios assigned, topology has {}",
                    radios.len(),
                    g.radio_count(id)
                )));
            }
            for (i, c) in radios.iter().enumerate() {
                if !self.channel_set.contains(c) {
                    return Err(MmcgError::ChannelOutOfSet {
                        radio: RadioId::new(n as u32, i as u16),
                        channel: c.0,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn channel(&self, r: RadioId) -> Result<Channel, MmcgError> {
        self.per_node
            .get(r.node.index())
            .and_then(|radios| radios.get(r.index as usize))
            .copied()
            .ok_or(MmcgError::Topology(TopologyError::UnknownRadio(r)))
    }

    pub(crate) fn set(&mut self, r: RadioId, c: Channel) {
        self.per_node[r.node.index()][r.index as usize] = c;
    }

    /// The common channel of a link's two radios, or `None` when they differ
    /// (the link is not operational).
    pub fn channel_of_link(&self, v: &RadioLink) -> Result<Option<Channel>, MmcgError> {
        let a = self.channel(v.a())?;
        let b = self.channel(v.b())?;
        Ok((a == b).then_some(a))
    }

    pub fn channel_set(&self) -> &[Channel] {
        &self.channel_set
    }

    pub fn node_channels(&self, n: NodeId) -> &[Channel] {
        &self.per_node[n.index()]
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_provenance(mut self, scheme: &str, seed: Option<u64>) -> Self {
        self.scheme = scheme.to_string();
        self.seed = seed;
        self
    }

    /// True when every radio shares one channel.
    pub fn is_uniform(&self) -> bool {
        let mut all = self.per_node.iter().flatten();
        match all.next() {
            Some(first) => all.all(|c| c == first),
            None => true,
        }
    }

    /// Radios in canonical order with their channels.
    pub fn entries(&self) -> impl Iterator<Item = (RadioId, Channel)> + '_ {
        self.per_node.iter().enumerate().flat_map(|(n, radios)| {
            radios
                .iter()
                .enumerate()
                .map(move |(i, &c)| (RadioId::new(n as u32, i as u16), c))
        })
    }

    pub fn distinct_channels_used(&self) -> BTreeSet<Channel> {
        self.per_node.iter().flatten().copied().collect()
    }

    /// Writes `node_id,radio_index,channel` rows sorted by `(node, radio)`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node_id,radio_index,channel")?;
        for (r, c) in self.entries() {
            writeln!(w, "{},{},{}", r.node, r.index, c)?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`ChannelAssignment::write_csv`].
    pub fn read_csv<R: BufRead>(
        g: &WmnGraph,
        channel_set: Vec<Channel>,
        reader: R,
    ) -> Result<Self, MmcgError> {
        let mut entries = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| MmcgError::ShapeMismatch(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("node_id")) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| -> Result<u32, MmcgError> {
                s.parse()
                    .map_err(|_| MmcgError::ShapeMismatch(format!("line {}: bad field {s:?}", lineno + 1)))
            };
            if fields.len() != 3 {
                return Err(MmcgError::ShapeMismatch(format!(
                    "line {}: expected 3 fields",
                    lineno + 1
                )));
            }
            let node = parse(fields[0])?;
            let index = parse(fields[1])? as u16;
            let channel = Channel(parse(fields[2])? as u16);
            entries.push((RadioId::new(node, index), channel));
        }
        Self::from_entries(g, channel_set, entries)
    }

    pub fn sidecar(&self, variant: Option<&str>) -> AssignmentSidecar {
        AssignmentSidecar {
            scheme: self.scheme.clone(),
            seed: self.seed,
            variant: variant.map(str::to_string),
            channels: self.channel_set.iter().map(|c| c.0).collect(),
        }
    }
}

/// JSON sidecar stored next to an assignment CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentSidecar {
    pub scheme: String,
    pub seed: Option<u64>,
    pub variant: Option<String>,
    pub channels: Vec<u16>,
}
