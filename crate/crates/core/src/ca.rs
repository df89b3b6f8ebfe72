//! Channel assignment heuristics over conflict graphs.
//!
//! A radio's channel is fixed by the first conflict-graph vertex that claims
//! it and never changes afterwards; a vertex whose radios end up on two
//! different channels is non-operational. The plan-based schemes finish with
//! a pass that retunes free radios (or, failing that, radios of unreached
//! nodes) until the network is connected. Radios still free at the end sit
//! on the first configured channel.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{Channel, ChannelAssignment};
use crate::error::CaError;
use crate::interference::ConflictModel;
use crate::mmcg::{self, ConflictGraph, RadioGraph, Variant};
use crate::seeding;
use crate::topology::{NodeId, RadioId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaConfig {
    pub channels: Vec<Channel>,
    pub gateway: Option<NodeId>,
    pub seed: u64,
}

impl Default for CaConfig {
    fn default() -> Self {
        Self {
            channels: vec![Channel(1), Channel(2), Channel(3)],
            gateway: None,
            seed: 0,
        }
    }
}

impl CaConfig {
    pub fn with_gateway(mut self, gateway: NodeId) -> Self {
        self.gateway = Some(gateway);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_channels(mut self, channels: Vec<Channel>) -> Self {
        self.channels = channels;
        self
    }

    fn check(&self) -> Result<(), CaError> {
        if self.channels.is_empty() {
            return Err(CaError::NoChannels);
        }
        let mut seen = BTreeSet::new();
        for c in &self.channels {
            if !seen.insert(*c) {
                return Err(CaError::DuplicateChannel(c.0));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Bfs,
    Mais,
    Cen,
    Clq,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Bfs, Scheme::Mais, Scheme::Cen, Scheme::Clq];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Bfs => "bfs",
            Scheme::Mais => "mais",
            Scheme::Cen => "cen",
            Scheme::Clq => "clq",
        }
    }

    /// Whether the scheme draws from the random stream.
    pub fn is_randomized(self) -> bool {
        matches!(self, Scheme::Bfs)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().trim_end_matches("-ca") {
            "bfs" => Ok(Scheme::Bfs),
            "mais" | "mis" => Ok(Scheme::Mais),
            "cen" => Ok(Scheme::Cen),
            "clq" => Ok(Scheme::Clq),
            other => Err(format!("unknown scheme {other:?} (expected bfs, mais, cen or clq)")),
        }
    }
}

/// Radio channels under construction.
struct RadioFixes {
    fixed: Vec<Vec<Option<Channel>>>,
}

impl RadioFixes {
    fn new(rg: &RadioGraph) -> Self {
        Self {
            fixed: rg
                .topology()
                .nodes()
                .iter()
                .map(|n| vec![None; n.radios as usize])
                .collect(),
        }
    }

    fn get(&self, r: RadioId) -> Option<Channel> {
        self.fixed[r.node.index()][r.index as usize]
    }

    fn set(&mut self, r: RadioId, c: Channel) {
        self.fixed[r.node.index()][r.index as usize] = Some(c);
    }

    /// Whether both radios are free or already on `c`.
    fn allows(&self, radios: [RadioId; 2], c: Channel) -> bool {
        radios.iter().all(|&r| self.get(r).is_none_or(|f| f == c))
    }

    /// Whether the two radios are fixed to different channels.
    fn split(&self, radios: [RadioId; 2]) -> bool {
        matches!(radios.map(|r| self.get(r)), [Some(x), Some(y)] if x != y)
    }

    /// Fixes both radios to `c` when neither is fixed elsewhere. Returns
    /// whether the vertex became operational on `c`.
    fn claim(&mut self, radios: [RadioId; 2], c: Channel) -> bool {
        if !self.allows(radios, c) {
            return false;
        }
        for r in radios {
            self.set(r, c);
        }
        true
    }

    fn node_channels(&self, n: NodeId) -> impl Iterator<Item = Channel> + '_ {
        self.fixed[n.index()].iter().flatten().copied()
    }

    /// Joins the operational network to node 0 one edge at a time. For the
    /// first edge leaving the reached side, a free radio on either end
    /// adopts the other end's channel; failing that, the last radio of the
    /// unreached node is retuned. Radios of reached nodes never change, so
    /// the reached set only grows.
    fn connect(&mut self, rg: &RadioGraph, default: Channel) {
        let g = rg.topology();
        if g.node_count() == 0 {
            return;
        }
        loop {
            let reached = g.reachable_from(NodeId(0), |u, v| {
                self.node_channels(u).any(|c| self.node_channels(v).any(|d| d == c))
            });
            let Some(&(u, v)) = g.edges().iter().find(|(u, v)| reached[u.index()] != reached[v.index()]) else {
                return;
            };
            let (inside, outside) = if reached[u.index()] { (u, v) } else { (v, u) };
            let radios = |n: NodeId| (0..g.radio_count(n)).map(move |i| RadioId::new(n.0, i));
            let free = |n: NodeId| radios(n).find(|&r| self.get(r).is_none());
            let fixed = |n: NodeId| radios(n).find_map(|r| self.get(r));
            match (free(inside), fixed(inside), free(outside), fixed(outside)) {
                (_, Some(c), Some(r), _) => self.set(r, c),
                (Some(r), _, _, Some(c)) => self.set(r, c),
                (Some(a), None, Some(b), None) => {
                    self.set(a, default);
                    self.set(b, default);
                }
                (_, Some(c), None, _) => {
                    let last = RadioId::new(outside.0, g.radio_count(outside) - 1);
                    self.set(last, c);
                }
                _ => unreachable!("a reached node with a radio has a fixed channel or a free radio"),
            }
        }
    }

    /// Links remaining unlinked neighbor pairs through spare radios: free
    /// ones first, then radios repeating a sibling's channel, so no linked
    /// pair is lost. Among the candidate retunes the one adding the fewest
    /// conflicts in `mmcg` wins.
    fn link_pairs(&mut self, rg: &RadioGraph, mmcg: &ConflictGraph, default: Channel) {
        let g = rg.topology();
        let radios = |n: NodeId| (0..g.radio_count(n)).map(move |i| RadioId::new(n.0, i));
        for &(u, v) in g.edges() {
            if self.node_channels(u).any(|c| self.node_channels(v).any(|d| d == c)) {
                continue;
            }
            let mut candidates: Vec<(RadioId, Channel)> = Vec::new();
            for (near, far) in [(u, v), (v, u)] {
                let free = radios(near).find(|&r| self.get(r).is_none());
                let repeat = radios(near).find(|&r| radios(near).any(|o| o.index < r.index && self.get(o) == self.get(r)));
                let Some(spare) = free.or(repeat) else { continue };
                let mut offered: Vec<Channel> = self.node_channels(far).collect();
                offered.sort_unstable();
                offered.dedup();
                candidates.extend(offered.into_iter().map(|c| (spare, c)));
            }
            if candidates.is_empty() {
                let (Some(a), Some(b)) = (radios(u).find(|&r| self.get(r).is_none()), radios(v).find(|&r| self.get(r).is_none())) else {
                    continue;
                };
                if self.node_channels(u).next().is_none() && self.node_channels(v).next().is_none() {
                    self.set(a, default);
                    self.set(b, default);
                }
                continue;
            }
            let best = candidates
                .into_iter()
                .min_by_key(|&(r, c)| {
                    let old = self.get(r);
                    let before = self.conflicts_at(rg, mmcg, r);
                    self.set(r, c);
                    let after = self.conflicts_at(rg, mmcg, r);
                    self.fixed[r.node.index()][r.index as usize] = old;
                    after as i64 - before as i64
                })
                .expect("non-empty");
            self.set(best.0, best.1);
        }
    }

    /// Conflicting pairs in `mmcg` among operational links with one link on
    /// radio `r`.
    fn conflicts_at(&self, rg: &RadioGraph, mmcg: &ConflictGraph, r: RadioId) -> usize {
        let on = |l: &crate::topology::RadioLink| {
            let [a, b] = l.radios();
            match (self.get(a), self.get(b)) {
                (Some(x), Some(y)) if x == y => Some(x),
                _ => None,
            }
        };
        let mut count = 0;
        for &k in rg.links_at_radio(r) {
            let l = rg.links()[k as usize];
            let (Some(c), Some(v)) = (on(&l), mmcg.vertex_index(&l)) else { continue };
            count += mmcg
                .neighbors(v)
                .iter()
                .filter(|&&w| on(&mmcg.vertices()[w as usize]) == Some(c))
                .count();
        }
        count
    }

    fn finish(self, cfg: &CaConfig, scheme: Scheme) -> ChannelAssignment {
        let default = cfg.channels[0];
        let per_node = self
            .fixed
            .into_iter()
            .map(|radios| radios.into_iter().map(|c| c.unwrap_or(default)).collect())
            .collect();
        let seed = scheme.is_randomized().then_some(cfg.seed);
        ChannelAssignment::from_parts(cfg.channels.clone(), per_node, scheme.as_str(), seed)
    }
}

fn check_inputs(rg: &RadioGraph, mmcg: &ConflictGraph) -> Result<(), CaError> {
    for l in mmcg.vertices() {
        if rg.link_index(l).is_none() {
            return Err(CaError::Mmcg(crate::error::MmcgError::ShapeMismatch(format!(
                "conflict-graph vertex {l} is not a link of the radio graph"
            ))));
        }
    }
    Ok(())
}

/// Breadth-first assignment outward from a gateway.
///
/// Vertices are visited by the mean hop distance of their two nodes from
/// the gateway. Each visited vertex gives its unfixed radios the first
/// channel not used by any operational neighbor; when every channel is
/// taken it draws one uniformly from the seeded stream.
pub fn bfs_ca(rg: &RadioGraph, mmcg: &ConflictGraph, cfg: &CaConfig) -> Result<ChannelAssignment, CaError> {
    cfg.check()?;
    check_inputs(rg, mmcg)?;
    let gateway = cfg.gateway.ok_or(CaError::GatewayMissing)?;
    let g = rg.topology();
    if gateway.index() >= g.node_count() {
        return Err(CaError::UnknownGateway(gateway));
    }
    let hops = g.hop_distances(gateway);
    let hop = |n: NodeId| hops[n.index()].unwrap_or(u32::MAX / 4);
    let mut order: Vec<usize> = (0..mmcg.vertices().len()).collect();
    // sum of hops orders the same as the mean
    order.sort_by_key(|&v| {
        let [a, b] = mmcg.vertices()[v].nodes();
        (hop(a) + hop(b), v)
    });

    let mut rng = seeding::stream(cfg.seed, Scheme::Bfs.as_str());
    let mut fixes = RadioFixes::new(rg);
    let mut pair_linked = std::collections::HashSet::new();
    for v in order {
        let link = mmcg.vertices()[v];
        let radios = link.radios();
        let pair = link.nodes();
        let state = radios.map(|r| fixes.get(r));
        let channel = match state {
            [Some(_), Some(_)] => continue,
            // the node pair has no working link yet: follow the fixed radio
            [Some(c), None] | [None, Some(c)] if !pair_linked.contains(&pair) => c,
            _ => {
                let used: BTreeSet<Channel> = mmcg
                    .neighbors(v)
                    .iter()
                    .filter_map(|&w| {
                        let [a, b] = mmcg.vertices()[w as usize].radios();
                        match (fixes.get(a), fixes.get(b)) {
                            (Some(x), Some(y)) if x == y => Some(x),
                            _ => None,
                        }
                    })
                    .collect();
                match cfg.channels.iter().find(|c| !used.contains(c)) {
                    Some(&c) => c,
                    None => cfg.channels[rng.gen_range(0..cfg.channels.len())],
                }
            }
        };
        for r in radios {
            if fixes.get(r).is_none() {
                fixes.set(r, channel);
            }
        }
        if radios.iter().all(|&r| fixes.get(r) == Some(channel)) {
            pair_linked.insert(pair);
        }
    }
    Ok(fixes.finish(cfg, Scheme::Bfs))
}

/// One round of a vertex-colouring plan: the channel and the vertices it
/// was given to, in selection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanRound {
    pub channel: Channel,
    pub vertices: Vec<usize>,
}

/// Repeated greedy maximal independent sets, each taking the next channel
/// round-robin, until every vertex is coloured. Radio constraints are
/// ignored; [`mais_ca`] runs the same rounds against its radios.
pub fn mais_plan(mmcg: &ConflictGraph, channels: &[Channel]) -> Vec<PlanRound> {
    mais_rounds(mmcg, channels, None)
}

/// With `fixes`, a round only considers vertices whose radios can take the
/// round's channel, claims the radios of the chosen set, and retires
/// vertices whose radios end up on two different channels.
fn mais_rounds(mmcg: &ConflictGraph, channels: &[Channel], mut fixes: Option<&mut RadioFixes>) -> Vec<PlanRound> {
    let n = mmcg.vertices().len();
    let mut remaining = vec![true; n];
    let mut left = n;
    let mut rounds = Vec::new();
    let mut turn = 0usize;
    let mut idle = 0usize;
    while left > 0 && idle < channels.len() {
        let channel = channels[turn % channels.len()];
        turn += 1;
        let eligible: Vec<bool> = (0..n)
            .map(|v| {
                remaining[v]
                    && fixes
                        .as_deref()
                        .is_none_or(|f| f.allows(mmcg.vertices()[v].radios(), channel))
            })
            .collect();
        let set = greedy_mis(mmcg, &eligible);
        if set.is_empty() {
            idle += 1;
            continue;
        }
        idle = 0;
        for &v in &set {
            remaining[v] = false;
            left -= 1;
            if let Some(f) = fixes.as_deref_mut() {
                f.claim(mmcg.vertices()[v].radios(), channel);
            }
        }
        if let Some(f) = fixes.as_deref() {
            let linked: std::collections::HashSet<[NodeId; 2]> = set
                .iter()
                .map(|&v| mmcg.vertices()[v])
                .filter(|l| f.split(l.radios()).not())
                .map(|l| l.nodes())
                .collect();
            for (keep, l) in remaining.iter_mut().zip(mmcg.vertices()) {
                if *keep && (f.split(l.radios()) || linked.contains(&l.nodes())) {
                    *keep = false;
                    left -= 1;
                }
            }
        }
        rounds.push(PlanRound { channel, vertices: set });
    }
    rounds
}

/// Minimum-degree greedy maximal independent set of the subgraph induced by
/// `active`; ties go to the lower vertex index.
fn greedy_mis(mmcg: &ConflictGraph, active: &[bool]) -> Vec<usize> {
    let mut candidate = active.to_vec();
    let mut degree: Vec<usize> = (0..candidate.len())
        .map(|v| {
            if candidate[v] {
                mmcg.neighbors(v).iter().filter(|&&w| candidate[w as usize]).count()
            } else {
                0
            }
        })
        .collect();
    let mut chosen = Vec::new();
    loop {
        let pick = (0..candidate.len())
            .filter(|&v| candidate[v])
            .min_by_key(|&v| (degree[v], v));
        let Some(v) = pick else { break };
        chosen.push(v);
        let mut dropped = vec![v];
        dropped.extend(mmcg.neighbors(v).iter().map(|&w| w as usize).filter(|&w| candidate[w]));
        for &d in &dropped {
            candidate[d] = false;
        }
        for &d in &dropped {
            for &w in mmcg.neighbors(d) {
                if candidate[w as usize] {
                    degree[w as usize] -= 1;
                }
            }
        }
    }
    chosen
}

/// Claims planned vertices in order, skipping those whose node pair already
/// has an operational link.
fn apply_plan(rg: &RadioGraph, mmcg: &ConflictGraph, plan: &[PlanRound]) -> RadioFixes {
    let mut fixes = RadioFixes::new(rg);
    let mut linked = std::collections::HashSet::new();
    for round in plan {
        for &v in &round.vertices {
            let l = mmcg.vertices()[v];
            if !linked.contains(&l.nodes()) && fixes.claim(l.radios(), round.channel) {
                linked.insert(l.nodes());
            }
        }
    }
    fixes
}

/// Maximal-independent-set assignment.
///
/// Each round draws its independent set from the vertices whose radios can
/// still take the round's channel. Once a node pair has an operational
/// link, its other vertices leave the graph. Pairs left unlinked at the end
/// are joined through spare radios where possible.
pub fn mais_ca(rg: &RadioGraph, mmcg: &ConflictGraph, cfg: &CaConfig) -> Result<ChannelAssignment, CaError> {
    cfg.check()?;
    check_inputs(rg, mmcg)?;
    let mut fixes = RadioFixes::new(rg);
    mais_rounds(mmcg, &cfg.channels, Some(&mut fixes));
    fixes.connect(rg, cfg.channels[0]);
    fixes.link_pairs(rg, mmcg, cfg.channels[0]);
    Ok(fixes.finish(cfg, Scheme::Mais))
}

/// Repeated greedy maximal cliques, each spread over the channels
/// round-robin, until the residual graph has no edges. Vertices left over
/// are not planned.
pub fn clq_plan(mmcg: &ConflictGraph, channels: &[Channel]) -> Vec<PlanRound> {
    let n = mmcg.vertices().len();
    let mut active = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| mmcg.neighbors(v).len()).collect();
    let mut rounds = Vec::new();
    loop {
        let seed = (0..n)
            .filter(|&v| active[v] && degree[v] > 0)
            .max_by_key(|&v| (degree[v], std::cmp::Reverse(v)));
        let Some(seed) = seed else { break };
        let mut clique = vec![seed];
        let mut common: Vec<usize> = mmcg
            .neighbors(seed)
            .iter()
            .map(|&w| w as usize)
            .filter(|&w| active[w])
            .collect();
        while let Some(&next) = common
            .iter()
            .max_by_key(|&&w| (degree[w], std::cmp::Reverse(w)))
        {
            clique.push(next);
            common.retain(|&w| w != next && mmcg.has_edge(next, w));
        }
        for (k, &v) in clique.iter().enumerate() {
            rounds.push(PlanRound {
                channel: channels[k % channels.len()],
                vertices: vec![v],
            });
        }
        for &v in &clique {
            active[v] = false;
            for &w in mmcg.neighbors(v) {
                if active[w as usize] {
                    degree[w as usize] -= 1;
                }
            }
        }
    }
    rounds
}

/// Clique-based assignment: the [`clq_plan`] vertices claim their radios in
/// plan order, skipping node pairs already linked, then the network is
/// connected and unlinked pairs joined as in [`mais_ca`].
pub fn clq_ca(rg: &RadioGraph, mmcg: &ConflictGraph, cfg: &CaConfig) -> Result<ChannelAssignment, CaError> {
    cfg.check()?;
    check_inputs(rg, mmcg)?;
    let plan = clq_plan(mmcg, &cfg.channels);
    let mut fixes = apply_plan(rg, mmcg, &plan);
    fixes.connect(rg, cfg.channels[0]);
    fixes.link_pairs(rg, mmcg, cfg.channels[0]);
    Ok(fixes.finish(cfg, Scheme::Clq))
}

/// Result of the centralized local search.
#[derive(Debug, Clone)]
pub struct CenOutcome {
    pub assignment: ChannelAssignment,
    /// TID after the all-default start and after every accepted move.
    pub trace: Vec<usize>,
    pub passes: usize,
}

/// Centralized local search.
///
/// Starts with every radio on the first channel and scans radio links in
/// canonical order, moving a link's two radios to whichever other channel
/// lowers the TID of the `variant` conflict graph the most. Moves that
/// would disconnect the operational network are infeasible. Stops after a
/// pass with no improving move.
pub fn cen_ca(
    rg: &RadioGraph,
    cfg: &CaConfig,
    model: &dyn ConflictModel,
    variant: Variant,
) -> Result<ChannelAssignment, CaError> {
    Ok(cen_search(rg, cfg, model, variant)?.assignment)
}

pub fn cen_search(
    rg: &RadioGraph,
    cfg: &CaConfig,
    model: &dyn ConflictModel,
    variant: Variant,
) -> Result<CenOutcome, CaError> {
    cfg.check()?;
    let g = rg.topology();
    let start = ChannelAssignment::all_default(g, &cfg.channels)?;
    let potential = mmcg::build(rg, &start, model, variant)?;
    // every link is a vertex under a uniform assignment
    debug_assert_eq!(potential.vertices(), rg.links());

    let mut ca = start.with_provenance(Scheme::Cen.as_str(), None);
    let mut link_channel: Vec<Option<Channel>> = vec![Some(cfg.channels[0]); rg.links().len()];
    let mut tid = potential.edges().len();
    let mut trace = vec![tid];
    let mut passes = 0;
    loop {
        passes += 1;
        let mut improved = false;
        for k in 0..rg.links().len() {
            let link = rg.links()[k];
            let mut best: Option<(usize, Channel)> = None;
            for &c in &cfg.channels {
                if link_channel[k] == Some(c) {
                    continue;
                }
                let mut trial = ca.clone();
                for r in link.radios() {
                    trial.set(r, c);
                }
                if !preserves_connectivity(rg, &trial) {
                    continue;
                }
                let affected = affected_links(rg, &link);
                let after: Vec<Option<Channel>> = affected
                    .iter()
                    .map(|&u| trial.channel_of_link(&rg.links()[u]))
                    .collect::<Result<_, _>>()?;
                let before_local = local_conflicts(&potential, &affected, |u| link_channel[u]);
                let after_local = local_conflicts(&potential, &affected, |u| {
                    affected
                        .binary_search(&u)
                        .map(|pos| after[pos])
                        .unwrap_or(link_channel[u])
                });
                let candidate = tid + after_local - before_local;
                if candidate < best.map_or(tid, |(t, _)| t) {
                    best = Some((candidate, c));
                }
            }
            if let Some((new_tid, c)) = best {
                for r in link.radios() {
                    ca.set(r, c);
                }
                for u in affected_links(rg, &link) {
                    link_channel[u] = ca.channel_of_link(&rg.links()[u])?;
                }
                tid = new_tid;
                trace.push(tid);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(CenOutcome {
        assignment: ca,
        trace,
        passes,
    })
}

/// Sorted indices of links sharing a radio with `link`.
fn affected_links(rg: &RadioGraph, link: &crate::topology::RadioLink) -> Vec<usize> {
    let mut out: Vec<usize> = link
        .radios()
        .iter()
        .flat_map(|&r| rg.links_at_radio(r).iter().map(|&k| k as usize))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Conflicting same-channel pairs with at least one endpoint in `set`.
fn local_conflicts<F>(potential: &ConflictGraph, set: &[usize], channel: F) -> usize
where
    F: Fn(usize) -> Option<Channel>,
{
    let mut count = 0;
    for &u in set {
        let Some(cu) = channel(u) else { continue };
        for &w in potential.neighbors(u) {
            let w = w as usize;
            let inside = set.binary_search(&w).is_ok();
            if inside && w < u {
                continue;
            }
            if channel(w) == Some(cu) {
                count += 1;
            }
        }
    }
    count
}

/// Whether the nodes stay connected through operational links (links whose
/// two radios share a channel).
pub fn preserves_connectivity(rg: &RadioGraph, ca: &ChannelAssignment) -> bool {
    let g = rg.topology();
    if g.node_count() == 0 {
        return true;
    }
    let linked = |u: NodeId, v: NodeId| {
        let cu = ca.node_channels(u);
        ca.node_channels(v).iter().any(|c| cu.contains(c))
    };
    g.reachable_from(NodeId(0), linked).into_iter().all(|r| r)
}

/// Runs `scheme` with its conflict-graph input built by `variant` under the
/// all-default assignment.
pub fn assign(
    scheme: Scheme,
    rg: &RadioGraph,
    variant: Variant,
    model: &dyn ConflictModel,
    cfg: &CaConfig,
) -> Result<ChannelAssignment, CaError> {
    cfg.check()?;
    if scheme == Scheme::Cen {
        return cen_ca(rg, cfg, model, variant);
    }
    let start = ChannelAssignment::all_default(rg.topology(), &cfg.channels)?;
    let input = mmcg::build(rg, &start, model, variant)?;
    match scheme {
        Scheme::Bfs => bfs_ca(rg, &input, cfg),
        Scheme::Mais => mais_ca(rg, &input, cfg),
        Scheme::Clq => clq_ca(rg, &input, cfg),
        Scheme::Cen => unreachable!(),
    }
}
