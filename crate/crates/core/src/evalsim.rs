//! Flow evaluation: shortest-hop routing, max-min fair fluid TDMA over
//! conflict cliques, the grid flow suites and rank correlation.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assignment::ChannelAssignment;
use crate::error::EvalError;
use crate::interference::ConflictModel;
use crate::mmcg::{self, ConflictGraph, RadioGraph};
use crate::topology::{NodeId, RadioLink};

/// Physical rate used when none is given, in Mbps.
pub const DEFAULT_PHY_RATE: f64 = 9.0;

/// Maximal cliques enumerated before scheduling gives up.
pub const DEFAULT_CLIQUE_BUDGET: usize = 200_000;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub src: NodeId,
    pub dst: NodeId,
    pub label: String,
}

impl FlowSpec {
    pub fn new(src: NodeId, dst: NodeId, label: impl Into<String>) -> Result<Self, EvalError> {
        if src == dst {
            return Err(EvalError::DegenerateFlow(src));
        }
        Ok(Self {
            src,
            dst,
            label: label.into(),
        })
    }
}

/// A flow pinned to concrete radio links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutedFlow {
    pub flow: FlowSpec,
    pub nodes: Vec<NodeId>,
    pub links: Vec<RadioLink>,
}

impl RoutedFlow {
    pub fn hops(&self) -> usize {
        self.links.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    /// Rate of each flow in Mbps, in input order.
    pub per_flow: Vec<f64>,
    pub aggregate: f64,
    /// Airtime share of every link carrying traffic.
    pub airtime: Vec<(RadioLink, f64)>,
    pub paths: Vec<RoutedFlow>,
}

impl ScheduleResult {
    fn empty() -> Self {
        Self {
            per_flow: Vec::new(),
            aggregate: 0.0,
            airtime: Vec::new(),
            paths: Vec::new(),
        }
    }
}

/// Routes each flow along a shortest hop path over node pairs that share a
/// channel, preferring the lexicographically smallest node sequence. Every
/// hop takes the operational radio link with the fewest conflicts in `cg`,
/// the lowest link winning ties.
pub fn route(
    rg: &RadioGraph,
    ca: &ChannelAssignment,
    cg: &ConflictGraph,
    flows: &[FlowSpec],
) -> Result<Vec<RoutedFlow>, EvalError> {
    let g = rg.topology();
    ca.check(g)?;
    let linked = |u: NodeId, v: NodeId| {
        let cu = ca.node_channels(u);
        ca.node_channels(v).iter().any(|c| cu.contains(c))
    };
    flows
        .iter()
        .map(|flow| {
            g.node(flow.src)?;
            g.node(flow.dst)?;
            if flow.src == flow.dst {
                return Err(EvalError::DegenerateFlow(flow.src));
            }
            let no_route = || EvalError::NoRoute {
                src: flow.src,
                dst: flow.dst,
            };
            // distances to the destination, so the walk from the source can
            // take the smallest next node at each step
            let mut dist = vec![u32::MAX; g.node_count()];
            dist[flow.dst.index()] = 0;
            let mut queue = VecDeque::from([flow.dst]);
            while let Some(u) = queue.pop_front() {
                for &v in g.neighbors(u) {
                    if dist[v.index()] == u32::MAX && linked(u, v) {
                        dist[v.index()] = dist[u.index()] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if dist[flow.src.index()] == u32::MAX {
                return Err(no_route());
            }
            let mut nodes = vec![flow.src];
            let mut at = flow.src;
            while at != flow.dst {
                let next = g
                    .neighbors(at)
                    .iter()
                    .copied()
                    .find(|&v| dist[v.index()] + 1 == dist[at.index()] && linked(at, v))
                    .ok_or_else(no_route)?;
                nodes.push(next);
                at = next;
            }
            let links = nodes
                .windows(2)
                .map(|w| best_link(rg, ca, cg, w[0], w[1]).ok_or_else(no_route))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RoutedFlow {
                flow: flow.clone(),
                nodes,
                links,
            })
        })
        .collect()
}

fn best_link(rg: &RadioGraph, ca: &ChannelAssignment, cg: &ConflictGraph, u: NodeId, v: NodeId) -> Option<RadioLink> {
    rg.links_between(u, v)
        .map(|k| rg.links()[k as usize])
        .filter(|l| {
            let [a, b] = l.radios();
            ca.channel(a) == ca.channel(b)
        })
        .min_by_key(|l| (cg.vertex_index(l).map_or(usize::MAX, |v| cg.neighbors(v).len()), *l))
}

/// Schedules routed flows over the conflicts recorded in `cg`.
pub fn schedule(
    cg: &ConflictGraph,
    flows: &[RoutedFlow],
    phy_rate: f64,
    clique_budget: usize,
) -> Result<ScheduleResult, EvalError> {
    if !(phy_rate.is_finite() && phy_rate > 0.0) {
        return Err(EvalError::InvalidRate(phy_rate));
    }
    if flows.is_empty() {
        return Ok(ScheduleResult::empty());
    }
    let mut active: Vec<usize> = Vec::new();
    for f in flows {
        for l in &f.links {
            active.push(cg.vertex_index(l).ok_or(EvalError::LinkNotInConflictGraph(*l))?);
        }
    }
    active.sort_unstable();
    active.dedup();
    let local = |v: usize| active.binary_search(&v).expect("active vertex");
    let paths: Vec<Vec<usize>> = flows
        .iter()
        .map(|f| {
            f.links
                .iter()
                .map(|l| local(cg.vertex_index(l).expect("checked above")))
                .collect()
        })
        .collect();
    let conflicts: Vec<Vec<bool>> = active
        .iter()
        .map(|&u| active.iter().map(|&w| u != w && cg.has_edge(u, w)).collect())
        .collect();
    let rates = fluid_schedule(&paths, &conflicts, phy_rate, clique_budget)?;

    let mut load = vec![0.0; active.len()];
    for (p, r) in paths.iter().zip(&rates) {
        for &k in p {
            load[k] += r;
        }
    }
    let airtime = active
        .iter()
        .zip(&load)
        .map(|(&v, &x)| (cg.vertices()[v], (x / phy_rate).min(1.0)))
        .collect();
    Ok(ScheduleResult {
        aggregate: rates.iter().sum(),
        per_flow: rates,
        airtime,
        paths: flows.to_vec(),
    })
}

/// Max-min fair rates for flows given as paths over links `0..n`, where
/// `conflicts` is the symmetric conflict matrix among those links. Every
/// maximal clique of conflicting links shares one unit of airtime at
/// `phy_rate`; a flow crossing a clique's links k times counts k times.
pub fn fluid_schedule(
    paths: &[Vec<usize>],
    conflicts: &[Vec<bool>],
    phy_rate: f64,
    clique_budget: usize,
) -> Result<Vec<f64>, EvalError> {
    if !(phy_rate.is_finite() && phy_rate > 0.0) {
        return Err(EvalError::InvalidRate(phy_rate));
    }
    let cliques = maximal_cliques(conflicts, clique_budget)?;
    let mut member = vec![Vec::new(); conflicts.len()];
    for (q, c) in cliques.iter().enumerate() {
        for &k in c {
            member[k].push(q);
        }
    }
    // uses[q][f]: how many links of flow f sit in clique q
    let mut uses = vec![vec![0u32; paths.len()]; cliques.len()];
    for (f, p) in paths.iter().enumerate() {
        for &k in p {
            for &q in &member[k] {
                uses[q][f] += 1;
            }
        }
    }
    let mut rate = vec![0.0; paths.len()];
    let mut frozen: Vec<bool> = paths.iter().map(|p| p.is_empty()).collect();
    let mut load = vec![0.0; cliques.len()];
    while frozen.iter().any(|f| !f) {
        let mut step = f64::INFINITY;
        for (q, u) in uses.iter().enumerate() {
            let weight: u32 = (0..paths.len()).filter(|&f| !frozen[f]).map(|f| u[f]).sum();
            if weight > 0 {
                step = step.min(((phy_rate - load[q]) / f64::from(weight)).max(0.0));
            }
        }
        if !step.is_finite() {
            break;
        }
        for f in 0..paths.len() {
            if !frozen[f] {
                rate[f] += step;
            }
        }
        for (q, u) in uses.iter().enumerate() {
            load[q] = (0..paths.len()).map(|f| f64::from(u[f]) * rate[f]).sum();
        }
        for (q, u) in uses.iter().enumerate() {
            if load[q] >= phy_rate * (1.0 - EPS) {
                for f in 0..paths.len() {
                    if u[f] > 0 {
                        frozen[f] = true;
                    }
                }
            }
        }
    }
    Ok(rate)
}

/// Bron-Kerbosch with pivoting; every vertex lands in at least one clique,
/// isolated vertices as singletons. Cliques come out sorted.
pub fn maximal_cliques(adj: &[Vec<bool>], budget: usize) -> Result<Vec<Vec<usize>>, EvalError> {
    fn expand(
        adj: &[Vec<bool>],
        r: &mut Vec<usize>,
        p: Vec<usize>,
        mut x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        budget: usize,
    ) -> Result<(), EvalError> {
        if p.is_empty() && x.is_empty() {
            if out.len() >= budget {
                return Err(EvalError::CliqueBudgetExceeded { budget });
            }
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return Ok(());
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .expect("p or x is non-empty");
        let mut p = p;
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in candidates {
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            r.push(v);
            expand(adj, r, np, nx, out, budget)?;
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
        Ok(())
    }
    let mut out = Vec::new();
    expand(adj, &mut Vec::new(), (0..adj.len()).collect(), Vec::new(), &mut out, budget)?;
    out.sort();
    Ok(out)
}

/// Test case classes over the grid flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestCase {
    /// One-hop flows: 1 vertical, 2 horizontal, 3 both.
    Sustenance(u8),
    /// Every combination of `k` row-spanning flows.
    Injection(u8),
    Stress(StressCase),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StressCase {
    D2,
    H4V4,
    H5V5,
    H5V5D2,
}

impl StressCase {
    pub const ALL: [StressCase; 4] = [StressCase::D2, StressCase::H4V4, StressCase::H5V5, StressCase::H5V5D2];

    pub fn as_str(self) -> &'static str {
        match self {
            StressCase::D2 => "D2",
            StressCase::H4V4 => "H4V4",
            StressCase::H5V5 => "H5V5",
            StressCase::H5V5D2 => "H5V5D2",
        }
    }
}

impl TestCase {
    /// Parses a class number and a case name or 1-based index.
    pub fn parse(class: u8, case: &str) -> Result<Self, EvalError> {
        let unknown = || EvalError::UnknownCase {
            class,
            case: case.to_string(),
        };
        let index: Option<u8> = case.trim().parse().ok();
        match (class, index) {
            (1, Some(k @ 1..=3)) => Ok(TestCase::Sustenance(k)),
            (2, Some(k @ 1..=5)) => Ok(TestCase::Injection(k)),
            (3, Some(k @ 1..=4)) => Ok(TestCase::Stress(StressCase::ALL[usize::from(k) - 1])),
            (3, None) => StressCase::ALL
                .into_iter()
                .find(|s| s.as_str().eq_ignore_ascii_case(case.trim()))
                .map(TestCase::Stress)
                .ok_or_else(unknown),
            _ => Err(unknown()),
        }
    }

    pub fn class(self) -> u8 {
        match self {
            TestCase::Sustenance(_) => 1,
            TestCase::Injection(_) => 2,
            TestCase::Stress(_) => 3,
        }
    }

    /// Every case of a class.
    pub fn all_of(class: u8) -> Result<Vec<TestCase>, EvalError> {
        match class {
            1 => Ok((1..=3).map(TestCase::Sustenance).collect()),
            2 => Ok((1..=5).map(TestCase::Injection).collect()),
            3 => Ok(StressCase::ALL.into_iter().map(TestCase::Stress).collect()),
            _ => Err(EvalError::UnknownCase {
                class,
                case: "*".into(),
            }),
        }
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestCase::Sustenance(k) => write!(f, "{k}"),
            TestCase::Injection(k) => write!(f, "FT-{k}"),
            TestCase::Stress(s) => f.write_str(s.as_str()),
        }
    }
}

impl FromStr for StressCase {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match TestCase::parse(3, s)? {
            TestCase::Stress(c) => Ok(c),
            _ => unreachable!(),
        }
    }
}

/// Grid flow sets for a test case; each inner list runs as one experiment.
///
/// Node (r, c) of a `rows` × `cols` grid has id `r * cols + c`, row 0 on
/// top. One-hop flows pair alternate nodes, (0,1), (2,3), ..., along every
/// row and column, sourced at the lower index. Multi-hop flows use the
/// top-left 5 × 5 block: row flows run left to right, column flows top to
/// bottom, and the two diagonals run from (0,0) to (4,4) and from (4,0) to
/// (0,4).
pub fn flow_suite(rows: usize, cols: usize, case: TestCase) -> Result<Vec<Vec<FlowSpec>>, EvalError> {
    let small = || EvalError::GridTooSmall { rows, cols };
    let id = |r: usize, c: usize| NodeId((r * cols + c) as u32);
    match case {
        TestCase::Sustenance(k) => {
            if rows < 2 && cols < 2 {
                return Err(small());
            }
            let mut flows = Vec::new();
            if k != 2 {
                for c in 0..cols {
                    for r in (0..rows.saturating_sub(1)).step_by(2) {
                        flows.push(FlowSpec::new(id(r, c), id(r + 1, c), format!("1-HVF-C{}-{}", c + 1, r / 2 + 1))?);
                    }
                }
            }
            if k != 1 {
                for r in 0..rows {
                    for c in (0..cols.saturating_sub(1)).step_by(2) {
                        flows.push(FlowSpec::new(id(r, c), id(r, c + 1), format!("1-HHF-R{}-{}", r + 1, c / 2 + 1))?);
                    }
                }
            }
            Ok(vec![flows])
        }
        _ if rows < 5 || cols < 5 => Err(small()),
        TestCase::Injection(k) => {
            let rows_flows: Vec<FlowSpec> = (0..5).map(|r| horizontal(id, r)).collect::<Result<_, _>>()?;
            Ok(combinations(5, usize::from(k))
                .into_iter()
                .map(|set| set.into_iter().map(|r| rows_flows[r].clone()).collect())
                .collect())
        }
        TestCase::Stress(s) => {
            let diagonals = || -> Result<Vec<FlowSpec>, EvalError> {
                Ok(vec![
                    FlowSpec::new(id(0, 0), id(4, 4), "8-HDF-1")?,
                    FlowSpec::new(id(4, 0), id(0, 4), "8-HDF-2")?,
                ])
            };
            let grid = |rs: std::ops::Range<usize>, cs: std::ops::Range<usize>| -> Result<Vec<FlowSpec>, EvalError> {
                let mut v: Vec<FlowSpec> = rs.map(|r| horizontal(id, r)).collect::<Result<_, _>>()?;
                for c in cs {
                    v.push(vertical(id, c)?);
                }
                Ok(v)
            };
            match s {
                StressCase::D2 => Ok(vec![diagonals()?]),
                StressCase::H4V4 => {
                    let mut out = Vec::new();
                    for rs in [0..4, 1..5] {
                        for cs in [0..4, 1..5] {
                            out.push(grid(rs.clone(), cs)?);
                        }
                    }
                    Ok(out)
                }
                StressCase::H5V5 => Ok(vec![grid(0..5, 0..5)?]),
                StressCase::H5V5D2 => {
                    let mut v = grid(0..5, 0..5)?;
                    v.extend(diagonals()?);
                    Ok(vec![v])
                }
            }
        }
    }
}

fn horizontal(id: impl Fn(usize, usize) -> NodeId, r: usize) -> Result<FlowSpec, EvalError> {
    FlowSpec::new(id(r, 0), id(r, 4), format!("4-HHF-R{}", r + 1))
}

fn vertical(id: impl Fn(usize, usize) -> NodeId, c: usize) -> Result<FlowSpec, EvalError> {
    FlowSpec::new(id(0, c), id(4, c), format!("4-HVF-C{}", c + 1))
}

/// k-subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub case: TestCase,
    /// One schedule per flow combination.
    pub runs: Vec<ScheduleResult>,
    /// Mean aggregate throughput over the runs, in Mbps.
    pub mean_aggregate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    pub phy_rate: f64,
    pub clique_budget: usize,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            phy_rate: DEFAULT_PHY_RATE,
            clique_budget: DEFAULT_CLIQUE_BUDGET,
        }
    }
}

/// Routes and schedules every combination of a test case under `ca`, with
/// conflicts taken from the enhanced conflict graph.
pub fn evaluate(
    rg: &RadioGraph,
    ca: &ChannelAssignment,
    model: &dyn ConflictModel,
    rows: usize,
    cols: usize,
    case: TestCase,
    params: EvalParams,
) -> Result<Evaluation, EvalError> {
    let suite = flow_suite(rows, cols, case)?;
    let cg = mmcg::build_emmcg(rg, ca, model)?;
    evaluate_suite(rg, ca, &cg, case, &suite, params)
}

/// [`evaluate`] with a prebuilt enhanced conflict graph and flow sets.
pub fn evaluate_suite(
    rg: &RadioGraph,
    ca: &ChannelAssignment,
    cg: &ConflictGraph,
    case: TestCase,
    suite: &[Vec<FlowSpec>],
    params: EvalParams,
) -> Result<Evaluation, EvalError> {
    let runs = suite
        .iter()
        .map(|flows| schedule(cg, &route(rg, ca, cg, flows)?, params.phy_rate, params.clique_budget))
        .collect::<Result<Vec<_>, _>>()?;
    let mean_aggregate = if runs.is_empty() {
        0.0
    } else {
        runs.iter().map(|r| r.aggregate).sum::<f64>() / runs.len() as f64
    };
    Ok(Evaluation {
        case,
        runs,
        mean_aggregate,
    })
}

/// Mid-ranks (1-based) with ties sharing their average rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = mid;
        }
        i = j + 1;
    }
    out
}

/// Spearman correlation between TID and throughput over `(TID, throughput)`
/// records. A constant column yields 0.
pub fn tid_performance_correlation(records: &[(f64, f64)]) -> Result<f64, EvalError> {
    if records.len() < 3 {
        return Err(EvalError::InsufficientData(records.len()));
    }
    let (t, p): (Vec<f64>, Vec<f64>) = records.iter().copied().unzip();
    let (rt, rp) = (ranks(&t), ranks(&p));
    let n = records.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in rt.iter().zip(&rp) {
        sxy += (x - mean) * (y - mean);
        sxx += (x - mean).powi(2);
        syy += (y - mean).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
