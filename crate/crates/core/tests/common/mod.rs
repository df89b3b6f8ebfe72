//! Test-only helpers: a brute-force conflict-graph oracle and random
//! topology generators. The oracle works on raw tuples and re-derives radio
//! links from the node-level edge list, so it shares no code path with the
//! builders it checks.

#![allow(dead_code)]

use std::collections::BTreeSet;

use meshconflict::topology::Node;
use meshconflict::{Channel, ChannelAssignment, NodeId, RadioId, WmnGraph};
use proptest::prelude::*;

pub type Radio = (u32, u16);
pub type Link = (Radio, Radio);

/// Conflict edges computed by testing every pair of operational radio links
/// against the written rules.
pub fn oracle_edges(g: &WmnGraph, ca: &ChannelAssignment, delta: f64, enhanced: bool) -> BTreeSet<(Link, Link)> {
    let pos: Vec<(f64, f64)> = g.nodes().iter().map(|n| (n.x, n.y)).collect();
    let dist = |a: u32, b: u32| {
        let (x1, y1) = pos[a as usize];
        let (x2, y2) = pos[b as usize];
        ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt()
    };
    let chan = |r: Radio| ca.channel(RadioId::new(r.0, r.1)).unwrap();

    let mut links: Vec<(Link, Channel)> = Vec::new();
    for &(i, j) in g.edges() {
        for x in 0..g.nodes()[i.0 as usize].radios {
            for y in 0..g.nodes()[j.0 as usize].radios {
                let a = (i.0, x);
                let b = (j.0, y);
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                if chan(a) == chan(b) {
                    links.push(((a, b), chan(a)));
                }
            }
        }
    }

    let mut out = BTreeSet::new();
    for p in 0..links.len() {
        for q in 0..links.len() {
            if p == q {
                continue;
            }
            let ((x, cx), (l, cl)) = (links[p], links[q]);
            if cx != cl {
                continue;
            }
            let xr = [x.0, x.1];
            let lr = [l.0, l.1];
            let xn = [x.0 .0, x.1 .0];
            let ln = [l.0 .0, l.1 .0];
            let share_radio = xr.iter().any(|r| lr.contains(r));
            let share_node = xn.iter().any(|n| ln.contains(n));
            let conflict = if share_radio {
                true
            } else if share_node {
                enhanced
            } else {
                let len_x = dist(xn[0], xn[1]);
                let len_l = dist(ln[0], ln[1]);
                let mut hit = false;
                for &u in &xn {
                    for &v in &ln {
                        let d = dist(u, v);
                        if d < (1.0 + delta) * len_x || d < (1.0 + delta) * len_l {
                            hit = true;
                        }
                    }
                }
                hit
            };
            if conflict {
                out.insert(if x < l { (x, l) } else { (l, x) });
            }
        }
    }
    out
}

pub fn as_tuples(cg: &meshconflict::ConflictGraph) -> BTreeSet<(Link, Link)> {
    cg.link_pairs()
        .into_iter()
        .map(|(x, l)| {
            let t = |k: meshconflict::RadioLink| {
                ((k.a().node.0, k.a().index), (k.b().node.0, k.b().index))
            };
            (t(x), t(l))
        })
        .collect()
}

/// A connected random topology: each new node is dropped within range of a
/// random earlier node, and edges are every pair within range.
pub fn arb_topology(max_nodes: usize, max_radios: u16) -> impl Strategy<Value = WmnGraph> {
    (1..=max_nodes, 150.0f64..350.0).prop_flat_map(move |(n, range)| {
        (
            Just(range),
            prop::collection::vec((0..n.max(1), 0.3f64..1.0, 0.0f64..std::f64::consts::TAU), n),
            prop::collection::vec(1..=max_radios, n),
        )
            .prop_map(move |(range, placement, radios)| {
                let mut pts: Vec<(f64, f64)> = Vec::with_capacity(placement.len());
                for (k, &(anchor, frac, angle)) in placement.iter().enumerate() {
                    if k == 0 {
                        pts.push((0.0, 0.0));
                        continue;
                    }
                    let (ax, ay) = pts[anchor % k];
                    let r = frac * range;
                    pts.push((ax + r * angle.cos(), ay + r * angle.sin()));
                }
                let nodes = pts
                    .iter()
                    .zip(&radios)
                    .enumerate()
                    .map(|(k, (&(x, y), &radios))| Node { id: NodeId(k as u32), x, y, radios })
                    .collect();
                WmnGraph::from_range(nodes, range).unwrap()
            })
    })
}

/// Random assignment of every radio in `g` to one of `1..=channels`.
pub fn arb_assignment(g: &WmnGraph, channels: u16) -> impl Strategy<Value = ChannelAssignment> {
    let radios: Vec<RadioId> = g
        .nodes()
        .iter()
        .flat_map(|n| (0..n.radios).map(move |i| RadioId { node: n.id, index: i }))
        .collect();
    let g = g.clone();
    let set: Vec<Channel> = (1..=channels).map(Channel).collect();
    prop::collection::vec(1..=channels, radios.len()).prop_map(move |picks| {
        ChannelAssignment::from_entries(
            &g,
            set.clone(),
            radios.iter().copied().zip(picks.into_iter().map(Channel)),
        )
        .unwrap()
    })
}

/// Topology plus a random assignment over 1..=3 channels.
pub fn arb_scenario(max_nodes: usize, max_radios: u16) -> impl Strategy<Value = (WmnGraph, ChannelAssignment)> {
    (arb_topology(max_nodes, max_radios), 1u16..=3)
        .prop_flat_map(|(g, k)| (Just(g.clone()), arb_assignment(&g, k)))
}

pub fn radio(n: u32, i: u16) -> Radio {
    (n, i)
}

pub fn pair(a: (u32, u16, u32, u16), b: (u32, u16, u32, u16)) -> (Link, Link) {
    let x = ((a.0, a.1), (a.2, a.3));
    let l = ((b.0, b.1), (b.2, b.3));
    if x < l {
        (x, l)
    } else {
        (l, x)
    }
}
