//! Plane-sweep detection of proper crossings among segments.
//!
//! The sweep line moves from top to bottom (ties left to right). Events are
//! segment endpoints plus crossings discovered between segments that become
//! neighbours in the status structure, kept in a balanced tree keyed by
//! exact rational position. Runtime is `O((n + I) log n)` for `n` segments
//! and `I` crossings.
//!
//! Degeneracies follow the usual lexicographic convention: the "upper"
//! endpoint of a horizontal segment is its left one, and a horizontal
//! segment sorts after every other segment leaving the same event point.
//! Collinear overlaps are not crossings; they are reported separately.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::geom::{segment_intersection, IntersectionKind, Orientation, Point, RatPoint, Segment};
use crate::topology::{Edge, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    /// Smaller segment index.
    pub first: usize,
    pub second: usize,
    pub point: RatPoint,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossingSet {
    /// Sorted by `(first, second)`.
    pub crossings: Vec<Crossing>,
    /// Collinear pairs sharing a stretch of positive length, sorted.
    pub overlaps: Vec<(usize, usize)>,
}

impl CrossingSet {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn pairs(&self) -> BTreeSet<(usize, usize)> {
        self.crossings.iter().map(|c| (c.first, c.second)).collect()
    }

    fn from_unsorted(mut crossings: Vec<Crossing>, overlaps: BTreeSet<(usize, usize)>) -> Self {
        crossings.sort_by_key(|c| (c.first, c.second));
        CrossingSet {
            crossings,
            overlaps: overlaps.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    UpperEndpoint,
    LowerEndpoint,
    Intersection,
}

/// One processed event point, as recorded by [`find_crossings_traced`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventPoint {
    pub point: RatPoint,
    /// Segments starting here.
    pub upper: Vec<usize>,
    /// Segments ending here.
    pub lower: Vec<usize>,
    /// Segments passing through here.
    pub interior: Vec<usize>,
}

impl EventPoint {
    pub fn kinds(&self) -> Vec<EventKind> {
        let mut k = Vec::new();
        if !self.upper.is_empty() {
            k.push(EventKind::UpperEndpoint);
        }
        if !self.lower.is_empty() {
            k.push(EventKind::LowerEndpoint);
        }
        if !self.interior.is_empty() {
            k.push(EventKind::Intersection);
        }
        k
    }
}

#[derive(Debug, Clone, Copy)]
struct SweepKey(RatPoint);

impl PartialEq for SweepKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for SweepKey {}
impl PartialOrd for SweepKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SweepKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.sweep_cmp(&other.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Oriented {
    upper: Point,
    lower: Point,
}

impl Oriented {
    fn new(s: &Segment) -> Self {
        let a_first = s.a.y > s.b.y || (s.a.y == s.b.y && s.a.x < s.b.x);
        if a_first {
            Oriented { upper: s.a, lower: s.b }
        } else {
            Oriented { upper: s.b, lower: s.a }
        }
    }

    fn dir(&self) -> (i64, i64) {
        (self.lower.x - self.upper.x, self.lower.y - self.upper.y)
    }
}

struct Sweep<'a> {
    input: &'a [Segment],
    segs: Vec<Oriented>,
    queue: BTreeMap<SweepKey, Vec<usize>>,
    /// Active segments, left to right along the sweep line.
    status: Vec<usize>,
    crossings: Vec<Crossing>,
    overlaps: BTreeSet<(usize, usize)>,
    trace: Option<Vec<EventPoint>>,
}

impl<'a> Sweep<'a> {
    fn new(input: &'a [Segment], traced: bool) -> Self {
        let segs: Vec<Oriented> = input.iter().map(Oriented::new).collect();
        let mut queue: BTreeMap<SweepKey, Vec<usize>> = BTreeMap::new();
        for (i, s) in segs.iter().enumerate() {
            queue.entry(SweepKey(s.upper.into())).or_default().push(i);
            queue.entry(SweepKey(s.lower.into())).or_default();
        }
        Sweep {
            input,
            segs,
            queue,
            status: Vec::new(),
            crossings: Vec::new(),
            overlaps: BTreeSet::new(),
            trace: traced.then(Vec::new),
        }
    }

    /// Where `p` lies relative to active segment `s` on the sweep line.
    fn side(&self, p: &RatPoint, s: usize) -> Ordering {
        let seg = &self.segs[s];
        match p.orient_from(seg.upper, seg.lower) {
            Orientation::Ccw => Ordering::Greater,
            Orientation::Cw => Ordering::Less,
            Orientation::Collinear => Ordering::Equal,
        }
    }

    /// Left-to-right order just below a common point.
    fn below_order(&self, s: usize, t: usize) -> Ordering {
        let (sx, sy) = self.segs[s].dir();
        let (tx, ty) = self.segs[t].dir();
        let cross = sx as i128 * ty as i128 - sy as i128 * tx as i128;
        0.cmp(&cross).then(s.cmp(&t))
    }

    fn run(mut self) -> (CrossingSet, Option<Vec<EventPoint>>) {
        while let Some((SweepKey(p), upper)) = self.queue.pop_first() {
            self.handle(p, upper);
        }
        (
            CrossingSet::from_unsorted(self.crossings, self.overlaps),
            self.trace,
        )
    }

    fn handle(&mut self, p: RatPoint, mut upper: Vec<usize>) {
        let lo = self.status.partition_point(|&s| self.side(&p, s) == Ordering::Greater);
        let hi = lo + self.status[lo..]
            .iter()
            .take_while(|&&s| self.side(&p, s) == Ordering::Equal)
            .count();

        let p_grid = p.as_point();
        let (lower, interior): (Vec<usize>, Vec<usize>) = self.status[lo..hi]
            .iter()
            .partition(|&&s| Some(self.segs[s].lower) == p_grid);

        let mut involved: Vec<usize> = upper.iter().chain(&lower).chain(&interior).copied().collect();
        if involved.len() > 1 {
            involved.sort_unstable();
            self.report(&involved);
        }
        if let Some(trace) = self.trace.as_mut() {
            let mut ev = EventPoint {
                point: p,
                upper: upper.clone(),
                lower: lower.clone(),
                interior: interior.clone(),
            };
            ev.upper.sort_unstable();
            ev.lower.sort_unstable();
            ev.interior.sort_unstable();
            trace.push(ev);
        }

        upper.extend(interior);
        upper.sort_by(|&s, &t| self.below_order(s, t));
        let inserted = upper.len();
        self.status.splice(lo..hi, upper);

        if inserted == 0 {
            if lo > 0 && lo < self.status.len() {
                self.check(self.status[lo - 1], self.status[lo], &p);
            }
        } else {
            if lo > 0 {
                self.check(self.status[lo - 1], self.status[lo], &p);
            }
            let last = lo + inserted - 1;
            if last + 1 < self.status.len() {
                self.check(self.status[last], self.status[last + 1], &p);
            }
        }
    }

    fn report(&mut self, involved: &[usize]) {
        for (k, &s) in involved.iter().enumerate() {
            for &t in &involved[k + 1..] {
                let r = segment_intersection(&self.input[s], &self.input[t]);
                match r.kind {
                    IntersectionKind::Proper => self.crossings.push(Crossing {
                        first: s,
                        second: t,
                        point: r.point.expect("proper crossing has a point"),
                    }),
                    IntersectionKind::Overlap => {
                        self.overlaps.insert((s, t));
                    }
                    _ => {}
                }
            }
        }
    }

    fn check(&mut self, s: usize, t: usize, p: &RatPoint) {
        let r = segment_intersection(&self.input[s], &self.input[t]);
        if r.kind == IntersectionKind::Proper {
            let q = r.point.expect("proper crossing has a point");
            if q.sweep_cmp(p) == Ordering::Greater {
                self.queue.entry(SweepKey(q)).or_default();
            }
        }
    }
}

/// All proper crossings among `segments`, identified by index.
pub fn find_crossings(segments: &[Segment]) -> CrossingSet {
    Sweep::new(segments, false).run().0
}

/// Like [`find_crossings`], also returning every processed event in order.
pub fn find_crossings_traced(segments: &[Segment]) -> (CrossingSet, Vec<EventPoint>) {
    let (set, trace) = Sweep::new(segments, true).run();
    (set, trace.expect("tracing enabled"))
}

/// All-pairs reference implementation, `O(n^2)`.
pub fn brute_force_crossings(segments: &[Segment]) -> CrossingSet {
    let mut crossings = Vec::new();
    let mut overlaps = BTreeSet::new();
    for i in 0..segments.len() {
        for j in i + 1..segments.len() {
            let r = segment_intersection(&segments[i], &segments[j]);
            match r.kind {
                IntersectionKind::Proper => crossings.push(Crossing {
                    first: i,
                    second: j,
                    point: r.point.expect("proper crossing has a point"),
                }),
                IntersectionKind::Overlap => {
                    overlaps.insert((i, j));
                }
                _ => {}
            }
        }
    }
    CrossingSet::from_unsorted(crossings, overlaps)
}

/// Number of crossing link pairs in `topo`.
pub fn count_crossings(topo: &Topology) -> usize {
    find_crossings(&topo.segments()).len()
}

/// Crossing link pairs of `topo`, as links.
pub fn crossing_links(topo: &Topology) -> Vec<(Edge, Edge, RatPoint)> {
    let links: Vec<Edge> = topo.links().iter().copied().collect();
    find_crossings(&topo.segments())
        .crossings
        .into_iter()
        .map(|c| (links[c.first], links[c.second], c.point))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::MeshRng;

    fn s(ax: i64, ay: i64, bx: i64, by: i64) -> Segment {
        Segment::new(Point::new(ax, ay), Point::new(bx, by))
    }

    #[test]
    fn single_x() {
        let set = find_crossings(&[s(0, 0, 2, 2), s(0, 2, 2, 0)]);
        assert_eq!(set.len(), 1);
        assert_eq!(set.crossings[0].point.as_point(), Some(Point::new(1, 1)));
    }

    #[test]
    fn parallel_horizontals() {
        assert!(find_crossings(&[s(0, 0, 1, 0), s(0, 1, 1, 1)]).is_empty());
    }

    #[test]
    fn horizontal_and_vertical() {
        let segs = [s(0, 5, 10, 5), s(3, 0, 3, 10), s(7, 0, 7, 10), s(5, 5, 5, 9)];
        let set = find_crossings(&segs);
        assert_eq!(set.pairs(), brute_force_crossings(&segs).pairs());
        assert_eq!(set.pairs(), [(0, 1), (0, 2)].into_iter().collect());
    }

    #[test]
    fn many_through_one_point() {
        // Four segments through the origin: every pair crosses there.
        let segs = [s(-4, -4, 4, 4), s(-4, 4, 4, -4), s(0, -5, 0, 5), s(-5, 0, 5, 0)];
        let set = find_crossings(&segs);
        assert_eq!(set.len(), 6);
        assert!(set.crossings.iter().all(|c| c.point.as_point() == Some(Point::new(0, 0))));
    }

    #[test]
    fn overlaps_are_diagnostics() {
        let segs = [s(0, 0, 10, 0), s(5, 0, 15, 0), s(7, -3, 7, 3)];
        let set = find_crossings(&segs);
        assert_eq!(set.overlaps, vec![(0, 1)]);
        assert_eq!(set.pairs(), [(0, 2), (1, 2)].into_iter().collect());
    }

    #[test]
    fn shared_endpoints_not_counted() {
        let segs = [s(0, 0, 5, 5), s(5, 5, 10, 0), s(5, 5, 5, 0), s(0, 0, 10, 0)];
        let set = find_crossings(&segs);
        assert!(set.is_empty(), "{set:?}");
    }

    #[test]
    fn events_pop_in_sweep_order() {
        let mut rng = MeshRng::new(3);
        let segs: Vec<Segment> = (0..60)
            .map(|_| {
                let mut p = || Point::new(rng.below(1000) as i64, rng.below(1000) as i64);
                let a = p();
                let mut b = p();
                while b == a {
                    b = p();
                }
                Segment::new(a, b)
            })
            .collect();
        let (set, trace) = find_crossings_traced(&segs);
        for w in trace.windows(2) {
            assert_eq!(w[0].point.sweep_cmp(&w[1].point), Ordering::Less);
        }
        assert_eq!(set.pairs(), brute_force_crossings(&segs).pairs());
        let crossing_events = trace
            .iter()
            .filter(|e| e.kinds().contains(&EventKind::Intersection))
            .count();
        assert!(crossing_events > 0);
    }
}
