use std::collections::BTreeSet;

use meshtopo_core::geom::Point;
use meshtopo_core::interference::{interference_rate, transmission_range};
use meshtopo_core::pruning::{covered_nodes, level_fractions, level_occupancy, prune, PruneConfig};
use meshtopo_core::rng::MeshRng;
use meshtopo_core::sweep::count_crossings;
use meshtopo_core::topology::{Area, Edge, Node, NodeId, NodeSet, Topology};
use meshtopo_core::triangulation::build_delaunay;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn dt_topology(seed: u64, n: usize) -> Topology {
    let mut rng = MeshRng::new(seed);
    let mut seen = BTreeSet::new();
    let mut nodes = Vec::new();
    while nodes.len() < n {
        let p = Point::new(rng.below(1_000_000_000) as i64, rng.below(1_000_000_000) as i64);
        if seen.insert(p) {
            nodes.push(Node { id: NodeId(nodes.len() as u32), point: p });
        }
    }
    build_delaunay(&NodeSet::new(nodes).unwrap(), seed).link_graph(Area::default())
}

fn population(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64;
    (m, var.sqrt())
}

/// Straightforward reimplementation: rebuild every key from scratch before
/// each removal.
fn reference_prune(topo: &Topology, max_priority: u8) -> Vec<Edge> {
    let mut t = topo.clone();
    let mut removed = Vec::new();
    loop {
        let level = |t: &Topology, e: Edge, at: NodeId| {
            let lens: Vec<f64> = t
                .incident_links(at)
                .unwrap()
                .into_iter()
                .map(|f| t.link_length(f).unwrap())
                .collect();
            let (m, s) = population(&lens);
            let l = t.link_length(e).unwrap();
            if l < m {
                0
            } else if l <= m + s {
                1
            } else if l <= m + 2.0 * s {
                2
            } else {
                3
            }
        };
        let prio = |a: u8, b: u8| match (a.max(b), a.min(b)) {
            (3, 3) => 1,
            (3, _) => 2,
            (2, 2) => 3,
            (2, _) => 4,
            _ => 5,
        };
        let mut cands: Vec<(u8, std::cmp::Reverse<usize>, Edge)> = t
            .links()
            .iter()
            .map(|&e| {
                let p = prio(level(&t, e, e.lo()), level(&t, e, e.hi()));
                (p, std::cmp::Reverse(covered_nodes(&t, e).unwrap()), e)
            })
            .filter(|c| c.0 <= max_priority)
            .collect();
        cands.sort();
        let pick = cands.into_iter().map(|c| c.2).find(|&e| {
            let mut probe = t.clone();
            probe.remove_link(e).unwrap();
            probe.is_connected()
        });
        match pick {
            Some(e) => {
                t.remove_link(e).unwrap();
                removed.push(e);
            }
            None => return removed,
        }
    }
}

#[test]
fn greedy_matches_from_scratch_reference() {
    for seed in 0..12 {
        let t = dt_topology(seed, 45);
        for max_priority in [2, 4, 5] {
            let cfg = PruneConfig { max_priority, ..PruneConfig::default() };
            let got: Vec<Edge> = prune(&t, &cfg).unwrap().removed.iter().map(|s| s.key.link).collect();
            assert_eq!(got, reference_prune(&t, max_priority), "seed {seed} max {max_priority}");
        }
    }
}

#[test]
fn pruning_is_safe_on_delaunay_topologies() {
    for seed in 100..140 {
        let t = dt_topology(seed, 100);
        let out = prune(&t, &PruneConfig::default()).unwrap();
        let p = &out.topology;
        assert!(p.is_connected());
        assert_eq!(count_crossings(p), 0);
        assert!(interference_rate(p).unwrap() <= interference_rate(&t).unwrap());
        for n in t.nodes().iter() {
            assert!(transmission_range(p, n.id).unwrap() <= transmission_range(&t, n.id).unwrap());
        }
        if !out.removed.is_empty() {
            let avg = |x: &Topology| {
                x.nodes().iter().map(|n| transmission_range(x, n.id).unwrap()).sum::<f64>()
            };
            assert!(avg(p) < avg(&t));
        }
        assert_eq!(p.link_count() + out.removed.len(), t.link_count());
    }
}

#[test]
fn pruning_is_deterministic_and_tie_seed_is_honoured() {
    let t = dt_topology(7, 150);
    let a = prune(&t, &PruneConfig::default()).unwrap();
    let b = prune(&t, &PruneConfig::default()).unwrap();
    assert_eq!(a.topology, b.topology);
    assert_eq!(a.removed, b.removed);
    let cfg = PruneConfig { tie_seed: Some(5), ..PruneConfig::default() };
    let c = prune(&t, &cfg).unwrap();
    assert!(c.topology.is_connected());
    assert_eq!(prune(&t, &cfg).unwrap().removed, c.removed);
}

#[test]
fn priority_five_prunes_down_to_a_spanning_tree() {
    let t = dt_topology(3, 60);
    let cfg = PruneConfig { max_priority: 5, ..PruneConfig::default() };
    let out = prune(&t, &cfg).unwrap();
    assert!(out.topology.is_connected());
    assert_eq!(out.topology.link_count(), 59);
}

#[test]
fn normal_lengths_fill_the_levels_like_the_normal_bands() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(10);
    let normal = Normal::new(100.0, 15.0).unwrap();
    let lengths: Vec<f64> = (0..100_000).map(|_| normal.sample(&mut rng)).collect();
    let f = level_fractions(&lengths);
    let want = [0.5, 0.342, 0.136, 0.022];
    for k in 0..4 {
        assert!((f[k] - want[k]).abs() <= 0.02, "{f:?}");
    }
}

#[test]
fn occupancy_counts_each_endpoint() {
    // Path 0 - 1 - 2 with lengths 1 and 3: node 1 sees one short and one
    // long link, the leaves see a single link each.
    let nodes = NodeSet::from_points([(0, 0), (1, 0), (4, 0)].map(|(x, y)| Point::new(x, y))).unwrap();
    let t = Topology::from_pairs(nodes, Area::default(), [(0, 1), (1, 2)]).unwrap();
    let f = level_occupancy(&t);
    assert_eq!(f, [0.25, 0.75, 0.0, 0.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn pruning_never_disconnects(seed in 0u64..10_000, n in 4usize..60, max_priority in 1u8..=5) {
        let t = dt_topology(seed, n);
        let cfg = PruneConfig { max_priority, ..PruneConfig::default() };
        let out = prune(&t, &cfg).unwrap();
        prop_assert_eq!(out.topology.is_connected(), t.is_connected());
        for s in &out.removed {
            prop_assert!(s.key.priority <= max_priority);
        }
    }
}
