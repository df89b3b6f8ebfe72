use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::Args;
use meshconflict::ca::{self, CaConfig, Scheme};
use meshconflict::evalsim::{self, TestCase};
use meshconflict::experiment::{self, config_hash, BatchConfig, GridSpec};
use meshconflict::mmcg;
use meshconflict::seeding::fingerprint;
use meshconflict::topology::TopologyFile;
use meshconflict::{expand, Channel, ChannelAssignment, NodeId, ProtocolModel, Variant, WmnGraph};
use serde::{Deserialize, Serialize};

use crate::io::{write_atomic, write_json, write_meta};
use crate::CliError;

/// `ROWSxCOLS`, e.g. `5x5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    rows: usize,
    cols: usize,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let (r, c) = s
        .to_ascii_lowercase()
        .split_once('x')
        .map(|(r, c)| (r.trim().to_string(), c.trim().to_string()))
        .ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
    let rows = r.parse().map_err(|_| format!("bad row count {r:?}"))?;
    let cols = c.parse().map_err(|_| format!("bad column count {c:?}"))?;
    Ok(Grid { rows, cols })
}

fn parse_channel(s: &str) -> Result<u16, String> {
    s.trim().parse().map_err(|_| format!("bad channel {s:?}"))
}

/// Seeds as `A..B` (end exclusive), `A..=B` or a single value; lists are
/// comma-separated.
fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    let num = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("bad seed {x:?}"));
    if let Some((a, b)) = s.split_once("..=") {
        Ok((num(a)?..=num(b)?).collect())
    } else if let Some((a, b)) = s.split_once("..") {
        Ok((num(a)?..num(b)?).collect())
    } else {
        Ok(vec![num(s)?])
    }
}

fn channels(list: &[u16]) -> Vec<Channel> {
    list.iter().copied().map(Channel).collect()
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TopoArgs {
    /// Topology JSON file.
    #[arg(long, conflicts_with = "grid")]
    topology: Option<PathBuf>,
    /// Generate a grid instead, as ROWSxCOLS.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    #[command(flatten)]
    layout: Layout,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct Layout {
    /// Grid spacing in metres.
    #[arg(long, default_value_t = 200.0)]
    spacing: f64,
    /// Radios per node.
    #[arg(long, default_value_t = 2)]
    radios: u16,
    /// Transmission range in metres.
    #[arg(long = "range", default_value_t = 250.0)]
    tx_range: f64,
}

impl Layout {
    fn grid(&self, g: Grid) -> GridSpec {
        GridSpec {
            rows: g.rows,
            cols: g.cols,
            spacing: self.spacing,
            radios: self.radios,
            tx_range: self.tx_range,
        }
    }
}

/// A loaded topology and a fingerprint of where it came from.
struct Loaded {
    graph: WmnGraph,
    source: String,
}

impl TopoArgs {
    fn load(&self) -> Result<Loaded, CliError> {
        match (&self.topology, self.grid) {
            (Some(path), _) => {
                let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
                let file: TopologyFile = serde_json::from_slice(&bytes)
                    .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
                Ok(Loaded {
                    graph: file.into_graph()?,
                    source: fingerprint(&bytes),
                })
            }
            (None, Some(g)) => {
                let spec = self.layout.grid(g);
                Ok(Loaded {
                    graph: spec.build()?,
                    source: config_hash(&spec),
                })
            }
            (None, None) => Err(CliError::Usage("give --topology FILE or --grid ROWSxCOLS".into())),
        }
    }
}

fn hash_of<T: Serialize>(command: &str, args: &T, extra: &[&str]) -> String {
    config_hash(&(command, args, extra))
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    /// Grid size as ROWSxCOLS.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    #[command(flatten)]
    layout: Layout,
    /// Output file; stdout when omitted.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let g = a.layout.grid(a.grid).build()?;
    let file = TopologyFile::from_graph(&g);
    let hash = hash_of("gen", &a, &[]);
    match &a.out {
        Some(path) => {
            write_json(path, &file, &hash)?;
            println!("nodes={} edges={} config_hash={hash}", g.node_count(), g.edges().len());
        }
        None => {
            let doc = crate::io::Stamped {
                body: &file,
                config_hash: &hash,
            };
            let mut text = serde_json::to_string_pretty(&doc).expect("topology serializes");
            text.push('\n');
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    return Err(CliError::io(Path::new("<stdout>"), e));
                }
                _ => {}
            }
        }
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct MmcgArgs {
    #[command(flatten)]
    topo: TopoArgs,
    /// classical or enhanced.
    #[arg(long, default_value = "enhanced")]
    variant: Variant,
    /// Guard-zone factor of the protocol model.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Assignment CSV (node_id,radio_index,channel); all radios on one
    /// channel when omitted.
    #[arg(long)]
    assignment: Option<PathBuf>,
    /// Channel set the assignment draws from.
    #[arg(long, value_delimiter = ',', value_parser = parse_channel, default_value = "1,2,3")]
    channels: Vec<u16>,
    /// Conflict-graph JSON output.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Per-vertex interference degree CSV output.
    #[arg(long)]
    #[serde(skip)]
    degrees: Option<PathBuf>,
}

pub fn mmcg(a: MmcgArgs) -> Result<(), CliError> {
    let loaded = a.topo.load()?;
    let g = &loaded.graph;
    let (ca, ca_source) = match &a.assignment {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            let ca = ChannelAssignment::read_csv(g, channels(&a.channels), bytes.as_slice())?;
            (ca, fingerprint(&bytes))
        }
        None => (ChannelAssignment::common(g), String::new()),
    };
    let model = ProtocolModel::with_delta(a.delta, g.tx_range())?;
    let rg = expand(g)?;
    let cg = mmcg::build(&rg, &ca, &model, a.variant)?;
    let hash = hash_of("mmcg", &a, &[&loaded.source, &ca_source]);
    if let Some(path) = &a.out {
        write_json(path, &cg.to_file(), &hash)?;
    }
    if let Some(path) = &a.degrees {
        let mut buf = Vec::new();
        cg.write_degree_csv(&mut buf).map_err(|e| CliError::io(path, e))?;
        write_atomic(path, &buf)?;
        write_meta(path, "mmcg", &a, &hash)?;
    }
    println!(
        "variant={} vertices={} tid={} config_hash={hash}",
        a.variant,
        cg.vertices().len(),
        mmcg::total_interference_degree(&cg)
    );
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    /// Largest n; grids are 5n x 5n for n = 1..=N.
    #[arg(long = "max-n", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    max_n: u64,
    #[command(flatten)]
    layout: Layout,
    /// Guard-zone factor of the protocol model.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Stop with exit code 4 once this many seconds have passed.
    #[arg(long = "time-budget")]
    time_budget: Option<f64>,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepLine {
    n: usize,
    side: usize,
    nodes: usize,
    tid_classical: usize,
    tid_enhanced: usize,
    gap: usize,
}

pub fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let budget = a.time_budget.map(Duration::from_secs_f64);
    let base = a.layout.grid(Grid { rows: 5, cols: 5 });
    let model = ProtocolModel::with_delta(a.delta, a.layout.tx_range)?;
    let hash = hash_of("sweep", &a, &[]);
    let mut rows = Vec::new();
    let mut over = false;
    for n in 1..=a.max_n as usize {
        let r = experiment::sweep_row(n, base, &model)?;
        rows.push(SweepLine {
            n,
            side: 5 * n,
            nodes: r.nodes,
            tid_classical: r.tid_classical,
            tid_enhanced: r.tid_enhanced,
            gap: r.gap(),
        });
        if budget.is_some_and(|b| start.elapsed() > b) && n < a.max_n as usize {
            over = true;
            break;
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().expect("in-memory writer");
    match &a.out {
        Some(path) => {
            write_atomic(path, &bytes)?;
            write_meta(path, "sweep", &a, &hash)?;
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    eprintln!("config_hash={hash}");
    if over {
        return Err(CliError::Budget(format!(
            "time budget exceeded after n = {} of {}",
            rows.len(),
            a.max_n
        )));
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct AssignArgs {
    #[command(flatten)]
    topo: TopoArgs,
    /// Schemes to run: bfs, mais, cen, clq (comma-separated).
    #[arg(long = "scheme", alias = "schemes", value_delimiter = ',', required = true, num_args = 1..)]
    schemes: Vec<Scheme>,
    /// Conflict-graph variants feeding the schemes.
    #[arg(long = "variant", alias = "variants", value_delimiter = ',', default_value = "classical,enhanced")]
    variants: Vec<Variant>,
    /// Seed for randomized schemes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gateway node for bfs.
    #[arg(long)]
    gateway: Option<u32>,
    /// Available channels (comma-separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_channel, default_value = "1,2,3")]
    channels: Vec<u16>,
    /// Guard-zone factor of the protocol model.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Directory for assignment CSVs and their JSON sidecars.
    #[arg(long = "out-dir")]
    #[serde(skip)]
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct AssignSidecar<'a> {
    #[serde(flatten)]
    assignment: meshconflict::assignment::AssignmentSidecar,
    tid_classical: usize,
    tid_enhanced: usize,
    connected: bool,
    config: &'a AssignArgs,
}

fn require_gateway(schemes: &[Scheme], gateway: Option<u32>) -> Result<NodeId, CliError> {
    match gateway {
        Some(g) => Ok(NodeId(g)),
        None if schemes.contains(&Scheme::Bfs) => Err(CliError::Usage("scheme bfs needs --gateway".into())),
        None => Ok(NodeId(0)),
    }
}

pub fn assign(a: AssignArgs) -> Result<(), CliError> {
    let gateway = require_gateway(&a.schemes, a.gateway)?;
    let loaded = a.topo.load()?;
    let g = &loaded.graph;
    let rg = expand(g)?;
    let model = ProtocolModel::with_delta(a.delta, g.tx_range())?;
    let cfg = CaConfig::default()
        .with_channels(channels(&a.channels))
        .with_gateway(gateway)
        .with_seed(a.seed);
    let hash = hash_of("assign", &a, &[&loaded.source]);
    let pairs: Vec<(Scheme, Variant)> = a
        .schemes
        .iter()
        .flat_map(|&s| a.variants.iter().map(move |&v| (s, v)))
        .collect();
    let results = meshconflict::par::map_slice(&pairs, |&(scheme, variant)| {
        let ca = ca::assign(scheme, &rg, variant, &model, &cfg)?;
        let c = mmcg::build_cmmcg(&rg, &ca, &model)?.edges().len();
        let e = mmcg::build_emmcg(&rg, &ca, &model)?.edges().len();
        let connected = ca::preserves_connectivity(&rg, &ca);
        Ok::<_, CliError>((scheme, variant, ca, c, e, connected))
    });
    println!("{:<6} {:<10} {:>10} {:>10} {:>9}", "scheme", "fed-by", "TID(C)", "TID(E)", "connected");
    for r in results {
        let (scheme, variant, ca, c, e, connected) = r?;
        println!("{:<6} {:<10} {:>10} {:>10} {:>9}", scheme.to_string(), variant.to_string(), c, e, if connected { "yes" } else { "no" });
        if let Some(dir) = &a.out_dir {
            let stem = format!("{scheme}-{variant}-s{}", a.seed);
            let path = dir.join(format!("{stem}.csv"));
            let mut buf = Vec::new();
            ca.write_csv(&mut buf).map_err(|e| CliError::io(&path, e))?;
            write_atomic(&path, &buf)?;
            let side = AssignSidecar {
                assignment: ca.sidecar(Some(variant.as_str())),
                tid_classical: c,
                tid_enhanced: e,
                connected,
                config: &a,
            };
            write_json(&dir.join(format!("{stem}.json")), &side, &hash)?;
        }
    }
    println!("config_hash={hash}");
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    /// Grid size as ROWSxCOLS.
    #[arg(long, value_parser = parse_grid, default_value = "5x5")]
    grid: Grid,
    #[command(flatten)]
    layout: Layout,
    /// Schemes to run: bfs, mais, cen, clq (comma-separated).
    #[arg(long = "schemes", alias = "scheme", value_delimiter = ',', required = true, num_args = 1..)]
    schemes: Vec<Scheme>,
    /// Conflict-graph variants feeding the schemes.
    #[arg(long = "variants", alias = "variant", value_delimiter = ',', default_value = "classical,enhanced")]
    variants: Vec<Variant>,
    /// Seeds as A..B, A..=B or N (comma-separated). Only bfs uses more
    /// than the first.
    #[arg(long, value_delimiter = ',', value_parser = parse_seeds, default_value = "0")]
    seeds: Vec<Vec<u64>>,
    /// Test case class: 1, 2 or 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    class: u8,
    /// Case index or name (D2, H4V4, H5V5, H5V5D2); every case of the
    /// class when omitted.
    #[arg(long)]
    case: Option<String>,
    /// Available channels (comma-separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_channel, default_value = "1,2,3")]
    channels: Vec<u16>,
    /// Gateway node for bfs.
    #[arg(long)]
    gateway: Option<u32>,
    /// Guard-zone factor of the protocol model.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Physical rate in Mbps.
    #[arg(long = "phy-rate", default_value_t = evalsim::DEFAULT_PHY_RATE)]
    phy_rate: f64,
    /// Maximal cliques enumerated per schedule before giving up (exit 4).
    #[arg(long = "clique-budget", default_value_t = evalsim::DEFAULT_CLIQUE_BUDGET)]
    clique_budget: usize,
    /// Directory receiving results and reports.
    #[arg(long = "out-dir")]
    #[serde(skip)]
    out_dir: PathBuf,
    /// Also write a rank-correlation report over every results file in
    /// the output directory.
    #[arg(long)]
    correlate: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ResultRow {
    scheme: String,
    variant: String,
    seed: u64,
    class: u8,
    case: String,
    aggregate_mbps: f64,
    per_flow: String,
    tid_classical: usize,
    tid_enhanced: usize,
    connected: bool,
}

pub fn evaluate(a: EvaluateArgs) -> Result<(), CliError> {
    let gateway = require_gateway(&a.schemes, a.gateway)?;
    let seeds: Vec<u64> = a.seeds.iter().flatten().copied().collect();
    if seeds.is_empty() {
        return Err(CliError::Usage("empty seed range".into()));
    }
    let cases = match &a.case {
        Some(c) => vec![TestCase::parse(a.class, c)?],
        None => TestCase::all_of(a.class)?,
    };
    let cfg = BatchConfig {
        grid: a.layout.grid(a.grid),
        delta: a.delta,
        channels: channels(&a.channels),
        gateway,
        cases,
        phy_rate: a.phy_rate,
        clique_budget: a.clique_budget,
    };
    let g = cfg.grid.build()?;
    let jobs = experiment::jobs(&a.schemes, &a.variants, &seeds);
    let outcomes = experiment::run_batch(&cfg, &g, &jobs)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    for o in &outcomes {
        for ev in &o.evaluations {
            let per_flow: Vec<BTreeMap<&str, f64>> = ev
                .runs
                .iter()
                .map(|r| r.paths.iter().map(|p| p.flow.label.as_str()).zip(r.per_flow.iter().copied()).collect())
                .collect();
            w.serialize(ResultRow {
                scheme: o.job.scheme.to_string(),
                variant: o.job.variant.to_string(),
                seed: o.job.seed,
                class: a.class,
                case: ev.case.to_string(),
                aggregate_mbps: ev.mean_aggregate,
                per_flow: serde_json::to_string(&per_flow).expect("rates serialize"),
                tid_classical: o.tid_classical,
                tid_enhanced: o.tid_enhanced,
                connected: o.connected,
            })
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().expect("in-memory writer");
    let hash = hash_of("evaluate", &a, &[]);
    let path = a.out_dir.join(format!("results-{}.csv", &hash[..12]));
    write_atomic(&path, &bytes)?;
    write_meta(&path, "evaluate", &a, &hash)?;
    println!("{} runs -> {} (config_hash={hash})", outcomes.len(), path.display());
    for o in &outcomes {
        let means: Vec<String> = o.evaluations.iter().map(|e| format!("{}={:.3}", e.case, e.mean_aggregate)).collect();
        println!("{} {} seed {}: {}", o.job.scheme, o.job.variant, o.job.seed, means.join(" "));
    }
    if a.correlate {
        correlate(&a.out_dir)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CorrelationRecord {
    scheme: String,
    variant: String,
    seed: u64,
    tid_enhanced: usize,
    mean_aggregate_mbps: f64,
}

#[derive(Serialize)]
struct CorrelationReport {
    sources: Vec<String>,
    records: Vec<CorrelationRecord>,
    spearman_rho: f64,
}

/// Spearman correlation of enhanced TID against mean aggregate throughput,
/// one record per (scheme, variant, seed) across every results file in
/// `dir`.
fn correlate(dir: &Path) -> Result<(), CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("results-") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    let mut groups: BTreeMap<(String, String, u64), (usize, Vec<f64>)> = BTreeMap::new();
    let mut sources = Vec::new();
    for f in &files {
        let bytes = fs::read(f).map_err(|e| CliError::io(f, e))?;
        sources.push(format!("{}:{}", f.file_name().unwrap_or_default().to_string_lossy(), fingerprint(&bytes)));
        for row in csv::Reader::from_reader(bytes.as_slice()).deserialize::<ResultRow>() {
            let row = row.map_err(|e| CliError::Invalid(format!("{}: {e}", f.display())))?;
            let entry = groups
                .entry((row.scheme, row.variant, row.seed))
                .or_insert((row.tid_enhanced, Vec::new()));
            entry.1.push(row.aggregate_mbps);
        }
    }
    let records: Vec<CorrelationRecord> = groups
        .into_iter()
        .map(|((scheme, variant, seed), (tid, xs))| CorrelationRecord {
            scheme,
            variant,
            seed,
            tid_enhanced: tid,
            mean_aggregate_mbps: xs.iter().sum::<f64>() / xs.len() as f64,
        })
        .collect();
    let pairs: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.tid_enhanced as f64, r.mean_aggregate_mbps))
        .collect();
    let rho = evalsim::tid_performance_correlation(&pairs)?;
    let hash = config_hash(&sources);
    let report = CorrelationReport {
        sources,
        records,
        spearman_rho: rho,
    };
    let path = dir.join("correlation.json");
    write_json(&path, &report, &hash)?;
    println!("spearman_rho={rho:.4} over {} runs -> {}", report.records.len(), path.display());
    Ok(())
}
