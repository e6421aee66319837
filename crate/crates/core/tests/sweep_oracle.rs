use std::cmp::Ordering;

use meshtopo_core::geom::{segment_intersection, IntersectionKind, Point, Segment};
use meshtopo_core::rng::MeshRng;
use meshtopo_core::sweep::{brute_force_crossings, count_crossings, find_crossings, find_crossings_traced};
use meshtopo_core::topology::{Area, NodeSet, Topology};
use proptest::prelude::*;

fn random_segments(rng: &mut MeshRng, n: usize, span: u64) -> Vec<Segment> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = Point::new(rng.below(span) as i64, rng.below(span) as i64);
        let b = Point::new(rng.below(span) as i64, rng.below(span) as i64);
        if a != b {
            out.push(Segment::new(a, b));
        }
    }
    out
}

fn check(segs: &[Segment]) {
    let (got, events) = find_crossings_traced(segs);
    let want = brute_force_crossings(segs);
    assert_eq!(got, want, "segments: {segs:?}");
    for c in &got.crossings {
        let r = segment_intersection(&segs[c.first], &segs[c.second]);
        assert_eq!(r.kind, IntersectionKind::Proper);
        assert_eq!(r.point.unwrap(), c.point);
    }
    for w in events.windows(2) {
        assert_eq!(w[0].point.sweep_cmp(&w[1].point), Ordering::Less);
    }
}

#[test]
fn matches_brute_force_on_uniform_instances() {
    let mut rng = MeshRng::new(11);
    for _ in 0..200 {
        // 1000 m square in micrometres.
        let segs = random_segments(&mut rng, 50, 1_000_000_000);
        check(&segs);
    }
}

#[test]
fn matches_brute_force_on_degenerate_grids() {
    // Tiny integer grids force shared endpoints, horizontals, verticals,
    // overlaps and many segments through one point.
    let mut rng = MeshRng::new(12);
    for span in [3, 4, 6, 10] {
        for _ in 0..300 {
            let segs = random_segments(&mut rng, 25, span);
            check(&segs);
        }
    }
}

#[test]
fn star_through_one_point_reports_all_pairs() {
    let segs: Vec<Segment> = [(0, 0, 4, 4), (0, 4, 4, 0), (2, 0, 2, 4), (0, 2, 4, 2), (1, 0, 3, 4)]
        .iter()
        .map(|&(a, b, c, d)| Segment::new(Point::new(a, b), Point::new(c, d)))
        .collect();
    let got = find_crossings(&segs);
    assert_eq!(got.len(), 10);
    assert!(got.crossings.iter().all(|c| c.point.as_point() == Some(Point::new(2, 2))));
}

#[test]
fn overlaps_are_diagnostics_only() {
    let segs = vec![
        Segment::new(Point::new(0, 0), Point::new(4, 0)),
        Segment::new(Point::new(2, 0), Point::new(6, 0)),
        Segment::new(Point::new(3, -1), Point::new(3, 1)),
    ];
    let got = find_crossings(&segs);
    assert_eq!(got.overlaps, vec![(0, 1)]);
    assert_eq!(got.pairs().into_iter().collect::<Vec<_>>(), vec![(0, 2), (1, 2)]);
}

#[test]
fn k4_on_convex_quad_has_one_crossing() {
    let nodes = NodeSet::from_points([(0, 0), (10, 0), (10, 10), (0, 10)].map(|(x, y)| Point::new(x, y))).unwrap();
    let all = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let t = Topology::from_pairs(nodes, Area::default(), all).unwrap();
    assert_eq!(count_crossings(&t), 1);
}

#[test]
fn empty_and_parallel() {
    assert!(find_crossings(&[]).is_empty());
    let segs = vec![
        Segment::new(Point::new(0, 0), Point::new(1, 0)),
        Segment::new(Point::new(0, 1), Point::new(1, 1)),
    ];
    assert!(find_crossings(&segs).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn sweep_equals_brute_force(raw in prop::collection::vec((0i64..8, 0i64..8, 0i64..8, 0i64..8), 0..30)) {
        let segs: Vec<Segment> = raw
            .into_iter()
            .filter(|&(a, b, c, d)| (a, b) != (c, d))
            .map(|(a, b, c, d)| Segment::new(Point::new(a, b), Point::new(c, d)))
            .collect();
        prop_assert_eq!(find_crossings(&segs), brute_force_crossings(&segs));
    }
}
