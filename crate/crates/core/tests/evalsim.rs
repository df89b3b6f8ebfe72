use meshconflict::ca::{assign, CaConfig, Scheme};
use meshconflict::evalsim::{
    evaluate, flow_suite, fluid_schedule, maximal_cliques, route, schedule, EvalParams, FlowSpec, StressCase,
    TestCase,
};
use meshconflict::interference::ProtocolModel;
use meshconflict::topology::build_grid;
use meshconflict::{build_emmcg, expand, Channel, ChannelAssignment, NodeId, Variant};
use proptest::prelude::*;

const PHY: f64 = 9.0;
const EPS: f64 = 1e-9;

/// Random symmetric conflict matrix over `n` links and flows as non-empty
/// link sequences without repeats.
fn arb_instance() -> impl Strategy<Value = (Vec<Vec<bool>>, Vec<Vec<usize>>)> {
    (1usize..=8).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(4)), 1..=5),
        )
            .prop_map(move |(bits, paths)| (matrix(n, &bits), paths))
    })
}

fn matrix(n: usize, bits: &[bool]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    for ((i, j), &b) in pairs.zip(bits) {
        m[i][j] = b;
        m[j][i] = b;
    }
    m
}

fn loads(cliques: &[Vec<usize>], paths: &[Vec<usize>], rates: &[f64]) -> Vec<f64> {
    cliques
        .iter()
        .map(|c| {
            paths
                .iter()
                .zip(rates)
                .map(|(p, r)| p.iter().filter(|k| c.contains(k)).count() as f64 * r)
                .sum()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cliques_never_exceed_airtime((adj, paths) in arb_instance()) {
        let rates = fluid_schedule(&paths, &adj, PHY, 10_000).unwrap();
        prop_assert!(rates.iter().all(|&r| r >= 0.0));
        let cliques = maximal_cliques(&adj, 10_000).unwrap();
        for load in loads(&cliques, &paths, &rates) {
            prop_assert!(load / PHY <= 1.0 + EPS);
        }
    }

    /// Max-min fairness: every flow crosses a saturated clique in which no
    /// other flow has a higher rate, so raising it would lower a flow of
    /// equal or smaller rate.
    #[test]
    fn every_flow_has_a_bottleneck((adj, paths) in arb_instance()) {
        let rates = fluid_schedule(&paths, &adj, PHY, 10_000).unwrap();
        let cliques = maximal_cliques(&adj, 10_000).unwrap();
        let load = loads(&cliques, &paths, &rates);
        for (f, p) in paths.iter().enumerate() {
            let bottlenecked = cliques.iter().zip(&load).any(|(c, &l)| {
                l >= PHY * (1.0 - 1e-7)
                    && p.iter().any(|k| c.contains(k))
                    && paths.iter().zip(&rates).all(|(q, &r)| !q.iter().any(|k| c.contains(k)) || r <= rates[f] + 1e-7)
            });
            prop_assert!(bottlenecked, "flow {} at {} has no bottleneck", f, rates[f]);
        }
    }

    /// A new conflict edge never raises the smallest rate.
    #[test]
    fn added_conflicts_never_raise_the_floor((adj, paths) in arb_instance(), pick in any::<prop::sample::Index>()) {
        let n = adj.len();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !adj[i][j])
            .collect();
        prop_assume!(!missing.is_empty());
        let (i, j) = missing[pick.index(missing.len())];
        let mut more = adj.clone();
        more[i][j] = true;
        more[j][i] = true;
        let before = fluid_schedule(&paths, &adj, PHY, 10_000).unwrap();
        let after = fluid_schedule(&paths, &more, PHY, 10_000).unwrap();
        let floor = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(floor(&after) <= floor(&before) + EPS);
    }
}

/// Max-min allocations are not monotone per flow: squeezing the flows on a
/// new conflict frees airtime for a flow elsewhere.
#[test]
fn a_new_conflict_can_raise_another_flow() {
    let free = vec![vec![false; 3]; 3];
    let mut tied = free.clone();
    tied[0][1] = true;
    tied[1][0] = true;
    let paths = vec![vec![2], vec![1], vec![0, 1, 2]];
    let before = fluid_schedule(&paths, &free, PHY, 100).unwrap();
    let after = fluid_schedule(&paths, &tied, PHY, 100).unwrap();
    assert_eq!(before, [4.5, 4.5, 4.5]);
    for (got, want) in after.iter().zip([6.0, 3.0, 3.0]) {
        assert!((got - want).abs() < EPS, "{after:?}");
    }
}

#[test]
fn routes_are_shortest_over_linked_pairs() {
    let g = build_grid(5, 5, 200.0, 2, 250.0).unwrap();
    let rg = expand(&g).unwrap();
    let model = ProtocolModel::default();
    for scheme in Scheme::ALL {
        let cfg = CaConfig::default().with_gateway(NodeId(0)).with_seed(5);
        let ca = assign(scheme, &rg, Variant::Enhanced, &model, &cfg).unwrap();
        let cg = build_emmcg(&rg, &ca, &model).unwrap();
        let flows: Vec<FlowSpec> = (1..25).map(|d| FlowSpec::new(NodeId(0), NodeId(d), "x").unwrap()).collect();
        let routed = route(&rg, &ca, &cg, &flows).unwrap();
        let linked = |u: NodeId, v: NodeId| {
            let a = ca.node_channels(u);
            ca.node_channels(v).iter().any(|c| a.contains(c))
        };
        // reference hop counts from a plain breadth-first search
        let mut dist = [usize::MAX; 25];
        dist[0] = 0;
        let mut frontier = vec![NodeId(0)];
        while let Some(u) = frontier.first().copied() {
            frontier.remove(0);
            for &v in g.neighbors(u) {
                if dist[v.index()] == usize::MAX && linked(u, v) {
                    dist[v.index()] = dist[u.index()] + 1;
                    frontier.push(v);
                }
            }
        }
        for r in &routed {
            assert_eq!(r.hops(), dist[r.flow.dst.index()], "{scheme}");
            for (w, l) in r.nodes.windows(2).zip(&r.links) {
                assert_eq!(l.nodes(), if w[0] < w[1] { [w[0], w[1]] } else { [w[1], w[0]] });
                assert_eq!(ca.channel(l.a()).unwrap(), ca.channel(l.b()).unwrap());
            }
        }
    }
}

#[test]
fn injection_of_one_flow_averages_the_five_rows() {
    let g = build_grid(5, 5, 200.0, 2, 250.0).unwrap();
    let rg = expand(&g).unwrap();
    let model = ProtocolModel::default();
    let ca = assign(Scheme::Mais, &rg, Variant::Enhanced, &model, &CaConfig::default()).unwrap();
    let ev = evaluate(&rg, &ca, &model, 5, 5, TestCase::Injection(1), EvalParams::default()).unwrap();
    assert_eq!(ev.runs.len(), 5);
    let cg = build_emmcg(&rg, &ca, &model).unwrap();
    let suite = flow_suite(5, 5, TestCase::Injection(1)).unwrap();
    let mut total = 0.0;
    for flows in &suite {
        total += schedule(&cg, &route(&rg, &ca, &cg, flows).unwrap(), PHY, 10_000).unwrap().aggregate;
    }
    assert!((ev.mean_aggregate - total / 5.0).abs() < 1e-9);
    for run in &ev.runs {
        let sum: f64 = run.per_flow.iter().sum();
        assert!((sum - run.aggregate).abs() < 1e-9);
        assert!(run.airtime.iter().all(|&(_, a)| (0.0..=1.0).contains(&a)));
    }
}

#[test]
fn stress_cases_route_on_a_common_channel() {
    let g = build_grid(5, 5, 200.0, 2, 250.0).unwrap();
    let rg = expand(&g).unwrap();
    let model = ProtocolModel::default();
    let ca = ChannelAssignment::common(&g);
    for case in StressCase::ALL {
        let ev = evaluate(&rg, &ca, &model, 5, 5, TestCase::Stress(case), EvalParams::default()).unwrap();
        assert!(ev.mean_aggregate > 0.0, "{case:?}");
    }
    let d2 = evaluate(&rg, &ca, &model, 5, 5, TestCase::Stress(StressCase::D2), EvalParams::default()).unwrap();
    assert!(d2.runs[0].paths.iter().all(|p| p.hops() == 8));
}

#[test]
fn more_channels_do_not_hurt() {
    let g = build_grid(5, 5, 200.0, 2, 250.0).unwrap();
    let rg = expand(&g).unwrap();
    let model = ProtocolModel::default();
    let mut worse = Vec::new();
    for scheme in Scheme::ALL {
        for seed in 0..3 {
            let run = |k: u16| {
                let cfg = CaConfig::default()
                    .with_channels((1..=k).map(Channel).collect())
                    .with_gateway(NodeId(0))
                    .with_seed(seed);
                let ca = assign(scheme, &rg, Variant::Enhanced, &model, &cfg).unwrap();
                evaluate(&rg, &ca, &model, 5, 5, TestCase::Injection(5), EvalParams::default())
                    .unwrap()
                    .mean_aggregate
            };
            let (one, three) = (run(1), run(3));
            if three + EPS < one {
                worse.push((scheme, seed, one, three));
            }
        }
    }
    assert!(worse.is_empty(), "{worse:?}");
}
