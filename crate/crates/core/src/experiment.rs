//! Seeded experiment runs: grid sweeps and scheme × variant × seed batches.
//!
//! Jobs are independent and fan out over the worker pool; results come
//! back in job order so output files are stable across thread counts.

use serde::{Deserialize, Serialize};

use crate::assignment::{Channel, ChannelAssignment};
use crate::ca::{self, CaConfig, Scheme};
use crate::error::{EvalError, TopologyError};
use crate::evalsim::{self, EvalParams, Evaluation, FlowSpec, TestCase};
use crate::interference::ProtocolModel;
use crate::mmcg::{self, RadioGraph, Variant};
use crate::par;
use crate::seeding;
use crate::topology::{build_grid, NodeId, WmnGraph};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "MESHCONFLICT_THREADS";

/// Worker cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Hex SHA-256 of the canonical JSON of a configuration.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("configurations serialize");
    seeding::fingerprint(&bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub radios: u16,
    pub tx_range: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            rows: 5,
            cols: 5,
            spacing: 200.0,
            radios: 2,
            tx_range: 250.0,
        }
    }
}

impl GridSpec {
    pub fn square(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            ..Self::default()
        }
    }

    pub fn build(&self) -> Result<WmnGraph, TopologyError> {
        build_grid(self.rows, self.cols, self.spacing, self.radios, self.tx_range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Grid side is `5 n`.
    pub n: usize,
    pub nodes: usize,
    pub tid_classical: usize,
    pub tid_enhanced: usize,
}

impl SweepRow {
    pub fn gap(&self) -> usize {
        self.tid_enhanced - self.tid_classical
    }
}

/// Default-channel TIDs of both variants on `5n × 5n` grids for
/// `n = 1..=n_max`.
pub fn sweep(n_max: usize, base: GridSpec, model: &ProtocolModel) -> Result<Vec<SweepRow>, EvalError> {
    (1..=n_max).map(|n| sweep_row(n, base, model)).collect()
}

/// One sweep row: the `5n × 5n` grid under a common channel.
pub fn sweep_row(n: usize, base: GridSpec, model: &ProtocolModel) -> Result<SweepRow, EvalError> {
    let spec = GridSpec {
        rows: 5 * n,
        cols: 5 * n,
        ..base
    };
    let g = spec.build()?;
    let rg = mmcg::expand(&g)?;
    let ca = ChannelAssignment::common(&g);
    let c = mmcg::build_cmmcg(&rg, &ca, model)?;
    let e = mmcg::build_emmcg(&rg, &ca, model)?;
    Ok(SweepRow {
        n,
        nodes: g.node_count(),
        tid_classical: mmcg::total_interference_degree(&c),
        tid_enhanced: mmcg::total_interference_degree(&e),
    })
}

/// One assignment job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub scheme: Scheme,
    pub variant: Variant,
    pub seed: u64,
}

/// Jobs for every scheme, variant and seed. Deterministic schemes run once
/// per variant, under the first seed.
pub fn jobs(schemes: &[Scheme], variants: &[Variant], seeds: &[u64]) -> Vec<Job> {
    let mut out = Vec::new();
    for &scheme in schemes {
        for &variant in variants {
            let used = if scheme.is_randomized() { seeds } else { &seeds[..seeds.len().min(1)] };
            for &seed in used {
                out.push(Job { scheme, variant, seed });
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub job: Job,
    pub assignment: ChannelAssignment,
    pub tid_classical: usize,
    pub tid_enhanced: usize,
    pub connected: bool,
    pub evaluations: Vec<Evaluation>,
}

impl RunOutcome {
    pub fn evaluation(&self, case: TestCase) -> Option<&Evaluation> {
        self.evaluations.iter().find(|e| e.case == case)
    }

    /// Mean of the mean aggregates over the evaluated cases.
    pub fn mean_over_cases(&self) -> f64 {
        if self.evaluations.is_empty() {
            return 0.0;
        }
        self.evaluations.iter().map(|e| e.mean_aggregate).sum::<f64>() / self.evaluations.len() as f64
    }
}

/// Shared inputs of a batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchConfig {
    pub grid: GridSpec,
    pub delta: f64,
    pub channels: Vec<Channel>,
    pub gateway: NodeId,
    pub cases: Vec<TestCase>,
    pub phy_rate: f64,
    pub clique_budget: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            delta: 1.0,
            channels: vec![Channel(1), Channel(2), Channel(3)],
            gateway: NodeId(0),
            cases: Vec::new(),
            phy_rate: evalsim::DEFAULT_PHY_RATE,
            clique_budget: evalsim::DEFAULT_CLIQUE_BUDGET,
        }
    }
}

/// Runs every job against one topology: assign, measure both TIDs, check
/// connectivity and evaluate each configured case. Results keep job order.
pub fn run_batch(cfg: &BatchConfig, g: &WmnGraph, jobs: &[Job]) -> Result<Vec<RunOutcome>, EvalError> {
    let rg = mmcg::expand(g)?;
    let model = ProtocolModel::with_delta(cfg.delta, g.tx_range())?;
    let suites: Vec<(TestCase, Vec<Vec<FlowSpec>>)> = cfg
        .cases
        .iter()
        .map(|&c| Ok((c, evalsim::flow_suite(cfg.grid.rows, cfg.grid.cols, c)?)))
        .collect::<Result<_, EvalError>>()?;
    let params = EvalParams {
        phy_rate: cfg.phy_rate,
        clique_budget: cfg.clique_budget,
    };
    par::map_slice(jobs, |job| run_job(cfg, &rg, &model, &suites, params, *job))
        .into_iter()
        .collect()
}

fn run_job(
    cfg: &BatchConfig,
    rg: &RadioGraph,
    model: &ProtocolModel,
    suites: &[(TestCase, Vec<Vec<FlowSpec>>)],
    params: EvalParams,
    job: Job,
) -> Result<RunOutcome, EvalError> {
    let ca_cfg = CaConfig::default()
        .with_channels(cfg.channels.clone())
        .with_gateway(cfg.gateway)
        .with_seed(job.seed);
    let assignment = ca::assign(job.scheme, rg, job.variant, model, &ca_cfg)?;
    let c = mmcg::build_cmmcg(rg, &assignment, model)?;
    let e = mmcg::build_emmcg(rg, &assignment, model)?;
    let connected = ca::preserves_connectivity(rg, &assignment);
    let evaluations = suites
        .iter()
        .map(|(case, suite)| evalsim::evaluate_suite(rg, &assignment, &e, *case, suite, params))
        .collect::<Result<_, _>>()?;
    Ok(RunOutcome {
        job,
        tid_classical: c.edges().len(),
        tid_enhanced: e.edges().len(),
        assignment,
        connected,
        evaluations,
    })
}

/// Median of a non-empty sample; the mean of the middle pair for even
/// sizes.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}
