//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use meshconflict::ca::{preserves_connectivity, Scheme};
use meshconflict::evalsim::{route, schedule, tid_performance_correlation, FlowSpec, StressCase, TestCase};
use meshconflict::experiment::{jobs, median, run_batch, sweep, BatchConfig, GridSpec, RunOutcome};
use meshconflict::interference::ProtocolModel;
use meshconflict::scenarios::{chain, diamond, ChainLayout};
use meshconflict::{build_cmmcg, build_emmcg, expand, ChannelAssignment, NodeId, Variant};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

const SEEDS: u64 = 30;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.2}s of {}s", e.as_secs_f64(), limit.as_secs()))
}

fn diamond_rci() -> Verdict {
    let t = Instant::now();
    // A=0, B=1, C=2, D=3
    let extra: BTreeSet<_> = [
        pair((0, 0, 1, 0), (0, 1, 2, 0)),
        pair((0, 1, 1, 0), (0, 0, 2, 0)),
        pair((1, 0, 3, 0), (2, 0, 3, 1)),
        pair((2, 0, 3, 0), (1, 0, 3, 1)),
    ]
    .into();
    let g = diamond();
    let rg = expand(&g).unwrap();
    let ca = ChannelAssignment::common(&g);
    let mut ok = true;
    let mut sizes = Vec::new();
    for delta in [0.0, 1.0] {
        let model = ProtocolModel::with_delta(delta, g.tx_range()).unwrap();
        let c = as_tuples(&build_cmmcg(&rg, &ca, &model).unwrap());
        let e = as_tuples(&build_emmcg(&rg, &ca, &model).unwrap());
        let expected: BTreeSet<_> = c.union(&extra).cloned().collect();
        ok &= c.is_disjoint(&extra) && e == expected;
        sizes.push(format!("delta {delta}: C {} E {}", c.len(), e.len()));
    }
    let (fast, time) = within(t, Duration::from_secs(1));
    verdict(ok && fast, format!("{}; {time}", sizes.join(", ")))
}

fn chain_counts() -> Verdict {
    let t = Instant::now();
    let model = ProtocolModel::default();
    let count = |layout, enhanced: bool| {
        let (g, ca) = chain(layout);
        let rg = expand(&g).unwrap();
        let cg = if enhanced {
            build_emmcg(&rg, &ca, &model)
        } else {
            build_cmmcg(&rg, &ca, &model)
        };
        cg.unwrap().edges().len()
    };
    let got = [
        count(ChainLayout::SingleRadioCommonChannel, false),
        count(ChainLayout::MultiRadioCommonChannel, true),
        count(ChainLayout::MultiRadioDifferentChannel, false),
        count(ChainLayout::MultiRadioDifferentChannel, true),
    ];
    let (fast, time) = within(t, Duration::from_secs(1));
    verdict(got == [1, 6, 0, 0] && fast, format!("SRCC/C {}, MRCC/E {}, MRDC {} and {}; {time}", got[0], got[1], got[2], got[3]))
}

fn superset_law() -> Verdict {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let model = ProtocolModel::default();
    let seen = std::cell::Cell::new(0usize);
    let result = runner.run(&arb_scenario(12, 4), |(g, ca)| {
        seen.set(seen.get() + 1);
        let rg = expand(&g).unwrap();
        let c = as_tuples(&build_cmmcg(&rg, &ca, &model).unwrap());
        let e = as_tuples(&build_emmcg(&rg, &ca, &model).unwrap());
        if c.is_subset(&e) && e.len() >= c.len() {
            Ok(())
        } else {
            Err(TestCaseError::fail("classical edge missing from enhanced"))
        }
    });
    verdict(result.is_ok(), format!("{} topologies, {}", seen.get(), result.err().map_or("0 violations".into(), |e| e.to_string())))
}

fn oracle_equivalence() -> Verdict {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let seen = std::cell::Cell::new(0usize);
    let result = runner.run(&(arb_scenario(8, 4), 0usize..3), |((g, ca), d)| {
        seen.set(seen.get() + 1);
        let delta = [0.0, 0.5, 1.0][d];
        let model = ProtocolModel::with_delta(delta, g.tx_range()).unwrap();
        let rg = expand(&g).unwrap();
        for enhanced in [false, true] {
            let cg = if enhanced {
                build_emmcg(&rg, &ca, &model)
            } else {
                build_cmmcg(&rg, &ca, &model)
            }
            .unwrap();
            if as_tuples(&cg) != oracle_edges(&g, &ca, delta, enhanced) {
                return Err(TestCaseError::fail(format!("mismatch, enhanced = {enhanced}")));
            }
        }
        Ok(())
    });
    verdict(result.is_ok(), format!("{} topologies, {}", seen.get(), result.err().map_or("0 mismatches".into(), |e| e.to_string())))
}

fn sweep_trend() -> Verdict {
    let t = Instant::now();
    let rows = sweep(10, GridSpec::default(), &ProtocolModel::default()).unwrap();
    let above = rows.iter().all(|r| r.tid_enhanced > r.tid_classical);
    let growing = rows.windows(2).all(|w| w[1].gap() > w[0].gap());
    let (fast, time) = within(t, Duration::from_secs(300));
    let gaps: Vec<String> = rows.iter().map(|r| r.gap().to_string()).collect();
    verdict(above && growing && fast, format!("gaps {}; {time}", gaps.join(" ")))
}

fn medians(runs: &[RunOutcome], scheme: Scheme, variant: Variant, f: impl Fn(&RunOutcome) -> f64) -> f64 {
    let xs: Vec<f64> = runs
        .iter()
        .filter(|o| o.job.scheme == scheme && o.job.variant == variant)
        .map(f)
        .collect();
    median(&xs).expect("runs for every scheme and variant")
}

fn tid_of(o: &RunOutcome) -> f64 {
    match o.job.variant {
        Variant::Classical => o.tid_classical as f64,
        Variant::Enhanced => o.tid_enhanced as f64,
    }
}

fn tid_ordering(runs: &[RunOutcome]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for v in Variant::ALL {
        let bfs = medians(runs, Scheme::Bfs, v, tid_of);
        let mais = medians(runs, Scheme::Mais, v, tid_of);
        ok &= bfs > mais;
        parts.push(format!("{v}: bfs {bfs} mais {mais}"));
    }
    verdict(ok, parts.join(", "))
}

fn chain_ratio() -> Verdict {
    let t = Instant::now();
    let model = ProtocolModel::default();
    let aggregate = |layout| {
        let (g, ca) = chain(layout);
        let rg = expand(&g).unwrap();
        let cg = build_emmcg(&rg, &ca, &model).unwrap();
        let flows = [
            FlowSpec::new(NodeId(0), NodeId(1), "A-B").unwrap(),
            FlowSpec::new(NodeId(2), NodeId(1), "C-B").unwrap(),
        ];
        schedule(&cg, &route(&rg, &ca, &cg, &flows).unwrap(), 9.0, 1000).unwrap().aggregate
    };
    let srcc = aggregate(ChainLayout::SingleRadioCommonChannel);
    let mrcc = aggregate(ChainLayout::MultiRadioCommonChannel);
    let mrdc = aggregate(ChainLayout::MultiRadioDifferentChannel);
    let (fast, time) = within(t, Duration::from_secs(1));
    verdict(
        mrdc / srcc >= 1.8 && mrcc <= srcc && fast,
        format!("SRCC {srcc} MRCC {mrcc} MRDC {mrdc} ratio {:.2}; {time}", mrdc / srcc),
    )
}

fn ft5(o: &RunOutcome) -> f64 {
    o.evaluation(TestCase::Injection(5)).expect("FT-5 evaluated").mean_aggregate
}

fn throughput_direction(runs: &[RunOutcome], elapsed: Duration) -> Verdict {
    let mut ok = elapsed < Duration::from_secs(600);
    let mut misses = Vec::new();
    for v in Variant::ALL {
        let bfs = medians(runs, Scheme::Bfs, v, ft5);
        let mais = medians(runs, Scheme::Mais, v, ft5);
        if mais < bfs {
            ok = false;
            misses.push(format!("{v}: mais {mais:.2} < bfs {bfs:.2}"));
        }
    }
    for s in Scheme::ALL {
        let c = medians(runs, s, Variant::Classical, ft5);
        let e = medians(runs, s, Variant::Enhanced, ft5);
        if e < c {
            ok = false;
            misses.push(format!("{s}: enhanced {e:.2} < classical {c:.2}"));
        }
    }
    let summary = if misses.is_empty() { "all orderings hold".to_string() } else { misses.join(", ") };
    verdict(ok, format!("{summary}; batch {:.1}s", elapsed.as_secs_f64()))
}

fn connectivity(runs: &[RunOutcome]) -> Verdict {
    let g = GridSpec::default().build().unwrap();
    let rg = expand(&g).unwrap();
    let broken: Vec<String> = runs
        .iter()
        .filter(|o| !(o.connected && preserves_connectivity(&rg, &o.assignment)))
        .map(|o| format!("{} {} seed {}", o.job.scheme, o.job.variant, o.job.seed))
        .collect();
    verdict(broken.is_empty(), format!("{} runs, disconnected: {:?}", runs.len(), broken))
}

fn weak_correlation(runs: &[RunOutcome]) -> Verdict {
    let mut records = Vec::new();
    for s in Scheme::ALL {
        for v in Variant::ALL {
            let o = runs
                .iter()
                .find(|o| o.job.scheme == s && o.job.variant == v && o.job.seed == 0)
                .expect("seed 0 run");
            let stress: Vec<f64> = StressCase::ALL
                .iter()
                .map(|&c| o.evaluation(TestCase::Stress(c)).expect("class 3 evaluated").mean_aggregate)
                .collect();
            records.push((o.tid_enhanced as f64, stress.iter().sum::<f64>() / stress.len() as f64));
        }
    }
    let rho = tid_performance_correlation(&records).unwrap();
    verdict(rho.abs() < 0.9, format!("rho {rho:.3} over {} assignments", records.len()))
}

fn main() {
    let t = Instant::now();
    let mut cases = vec![TestCase::Injection(5)];
    cases.extend(StressCase::ALL.map(TestCase::Stress));
    let cfg = BatchConfig {
        cases,
        ..BatchConfig::default()
    };
    let g = cfg.grid.build().unwrap();
    let seeds: Vec<u64> = (0..SEEDS).collect();
    let runs = run_batch(&cfg, &g, &jobs(&Scheme::ALL, &Variant::ALL, &seeds)).unwrap();
    let batch = t.elapsed();

    let results = [
        ("diamond: enhanced adds exactly four co-location edges", diamond_rci()),
        ("chain conflict counts 1 / 6 / 0", chain_counts()),
        ("superset law over random topologies", superset_law()),
        ("builders match the brute-force oracle", oracle_equivalence()),
        ("grid sweep: enhanced above classical, gap growing", sweep_trend()),
        ("median TID: bfs above mais in each variant", tid_ordering(&runs)),
        ("chain scheduler ratio and ordering", chain_ratio()),
        ("FT-5 throughput: mais >= bfs, enhanced-fed >= classical-fed", throughput_direction(&runs, batch)),
        ("every scheme keeps the grid connected", connectivity(&runs)),
        ("weak TID-throughput rank correlation", weak_correlation(&runs)),
    ];
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("criterion {:>2} {}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, name, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
