//! Standard-deviation link pruning.
//!
//! Each endpoint judges a link against the mean `μ` and population standard
//! deviation `σ` of its own incident link lengths:
//!
//! | level | length            |
//! |-------|-------------------|
//! | 0     | `< μ`             |
//! | 1     | `μ ..= μ + σ`     |
//! | 2     | `(μ + σ) ..= μ + 2σ` |
//! | 3     | `> μ + 2σ`        |
//!
//! The two endpoint levels give a priority from 1 (both level 3) to 5 (both
//! below level 2). Links are removed greedily, best-ranked first across the
//! whole network, ranking by priority, then by how many nodes the link's
//! transmissions cover (more first), then by link id. Endpoint statistics
//! are refreshed after every removal, and bridges are never removed while
//! connectivity preservation is on.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geom::dist2;
use crate::rng::derive;
use crate::spatial::GridIndex;
use crate::topology::{Edge, NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SdLevel {
    Level0,
    Level1,
    Level2,
    Level3,
}

impl SdLevel {
    pub const ALL: [SdLevel; 4] = [SdLevel::Level0, SdLevel::Level1, SdLevel::Level2, SdLevel::Level3];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeLinkStats {
    pub node: NodeId,
    pub links: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Mean and population standard deviation; `None` for an empty slice.
pub fn mean_sd(lengths: &[f64]) -> Option<(f64, f64)> {
    if lengths.is_empty() {
        return None;
    }
    let k = lengths.len() as f64;
    let mean = lengths.iter().sum::<f64>() / k;
    let var = lengths.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / k;
    Some((mean, var.sqrt()))
}

pub fn node_link_stats(topo: &Topology, u: NodeId) -> Result<NodeLinkStats> {
    let i = topo.index(u)?;
    stats_at(topo, i).ok_or(Error::IsolatedNode(u))
}

fn stats_at(topo: &Topology, i: usize) -> Option<NodeLinkStats> {
    let p = topo.point_at(i);
    let lengths: Vec<f64> = topo
        .neighbors_of(i)
        .map(|j| crate::geom::dist(p, topo.point_at(j)))
        .collect();
    let (mean, sd) = mean_sd(&lengths)?;
    Some(NodeLinkStats {
        node: topo.id(i),
        links: lengths.len(),
        mean,
        sd,
    })
}

pub fn sd_level(length: f64, stats: &NodeLinkStats) -> SdLevel {
    level_for(length, stats.mean, stats.sd)
}

fn level_for(length: f64, mean: f64, sd: f64) -> SdLevel {
    if length < mean {
        SdLevel::Level0
    } else if length <= mean + sd {
        SdLevel::Level1
    } else if length <= mean + 2.0 * sd {
        SdLevel::Level2
    } else {
        SdLevel::Level3
    }
}

/// Pruning priority from the two endpoint levels; 1 is pruned first.
pub fn priority(a: SdLevel, b: SdLevel) -> u8 {
    use SdLevel::*;
    match (a, b) {
        (Level3, Level3) => 1,
        (Level3, _) | (_, Level3) => 2,
        (Level2, Level2) => 3,
        (Level2, _) | (_, Level2) => 4,
        _ => 5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPruneKey {
    pub link: Edge,
    /// Level at `link.lo()`.
    pub level_a: SdLevel,
    /// Level at `link.hi()`.
    pub level_b: SdLevel,
    pub priority: u8,
    pub covered: usize,
    pub length_m: f64,
}

impl LinkPruneKey {
    pub fn new(link: Edge, level_a: SdLevel, level_b: SdLevel, covered: usize, length_m: f64) -> Self {
        LinkPruneKey {
            link,
            level_a,
            level_b,
            priority: priority(level_a, level_b),
            covered,
            length_m,
        }
    }

    /// Ranking order: lower priority number, then more covered nodes, then
    /// smaller link.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        (self.priority, Reverse(self.covered), self.link).cmp(&(other.priority, Reverse(other.covered), other.link))
    }
}

/// Nodes other than the endpoints within the link's length of either
/// endpoint.
pub fn covered_nodes(topo: &Topology, e: Edge) -> Result<usize> {
    if !topo.has_link(e) {
        return Err(Error::UnknownLink(e));
    }
    let grid = GridIndex::new(topo.nodes().points().collect());
    Ok(covered_with(topo, &grid, e))
}

fn covered_with(topo: &Topology, grid: &GridIndex, e: Edge) -> usize {
    let a = topo.index(e.lo()).expect("link endpoints exist");
    let b = topo.index(e.hi()).expect("link endpoints exist");
    let (pa, pb) = (topo.point_at(a), topo.point_at(b));
    let r2 = dist2(pa, pb);
    let mut hits = HashSet::new();
    grid.for_each_within(pa, r2, |i| {
        hits.insert(i);
    });
    grid.for_each_within(pb, r2, |i| {
        hits.insert(i);
    });
    hits.remove(&a);
    hits.remove(&b);
    hits.len()
}

fn key_for(topo: &Topology, stats: &[Option<NodeLinkStats>], covered: usize, e: Edge) -> LinkPruneKey {
    let a = topo.index(e.lo()).expect("link endpoints exist");
    let b = topo.index(e.hi()).expect("link endpoints exist");
    let len = crate::geom::dist(topo.point_at(a), topo.point_at(b));
    let sa = stats[a].as_ref().expect("endpoint has a link");
    let sb = stats[b].as_ref().expect("endpoint has a link");
    LinkPruneKey::new(e, sd_level(len, sa), sd_level(len, sb), covered, len)
}

/// `u`'s incident links in pruning order.
pub fn prune_order(topo: &Topology, u: NodeId) -> Result<Vec<LinkPruneKey>> {
    let i = topo.index(u)?;
    if topo.degree_of(i) == 0 {
        return Err(Error::IsolatedNode(u));
    }
    let grid = GridIndex::new(topo.nodes().points().collect());
    let mut keys: Vec<LinkPruneKey> = topo
        .incident_links(u)?
        .into_iter()
        .map(|e| {
            let stats = [e.lo(), e.hi()].map(|id| stats_at(topo, topo.index(id).unwrap()));
            let len = topo.link_length(e).unwrap();
            LinkPruneKey::new(
                e,
                sd_level(len, stats[0].as_ref().unwrap()),
                sd_level(len, stats[1].as_ref().unwrap()),
                covered_with(topo, &grid, e),
                len,
            )
        })
        .collect();
    rank(&mut keys);
    Ok(keys)
}

/// Sorts keys into pruning order.
pub fn rank(keys: &mut [LinkPruneKey]) {
    keys.sort_by(|a, b| a.rank_cmp(b));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneConfig {
    /// Links of priority up to this value are candidates (1..=5).
    pub max_priority: u8,
    pub preserve_connectivity: bool,
    /// Replaces the final link-id tie-break by a seeded permutation.
    pub tie_seed: Option<u64>,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            max_priority: 4,
            preserve_connectivity: true,
            tie_seed: None,
        }
    }
}

impl PruneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.max_priority) {
            return Err(Error::InvalidParameter(format!(
                "max priority must be in 1..=5, got {}",
                self.max_priority
            )));
        }
        Ok(())
    }
}

/// One removal, with the key the link held when it was removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneStep {
    pub step: usize,
    pub key: LinkPruneKey,
}

#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub topology: Topology,
    pub removed: Vec<PruneStep>,
    /// Candidates kept because removing them would disconnect the graph.
    pub bridges_kept: usize,
}

type HeapEntry = Reverse<(u8, Reverse<usize>, u64, Edge)>;

pub fn prune(topo: &Topology, cfg: &PruneConfig) -> Result<PruneOutcome> {
    cfg.validate()?;
    let mut work = topo.clone();
    let n = work.node_count();
    let grid = GridIndex::new(work.nodes().points().collect());
    let covered: HashMap<Edge, usize> = work
        .links()
        .iter()
        .map(|&e| (e, covered_with(&work, &grid, e)))
        .collect();
    let tie = |e: Edge| match cfg.tie_seed {
        Some(s) => derive(s, &[e.lo().0 as u64, e.hi().0 as u64]),
        None => 0,
    };
    let mut stats: Vec<Option<NodeLinkStats>> = (0..n).map(|i| stats_at(&work, i)).collect();
    let mut current: HashMap<Edge, LinkPruneKey> = HashMap::with_capacity(covered.len());
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<HeapEntry>, k: &LinkPruneKey| {
        if k.priority <= cfg.max_priority {
            heap.push(Reverse((k.priority, Reverse(k.covered), tie(k.link), k.link)));
        }
    };
    for &e in work.links() {
        let k = key_for(&work, &stats, covered[&e], e);
        push(&mut heap, &k);
        current.insert(e, k);
    }
    let mut skipped: HashSet<Edge> = HashSet::new();
    let mut removed = Vec::new();
    while let Some(Reverse((p, Reverse(c), _, e))) = heap.pop() {
        let Some(k) = current.get(&e) else { continue };
        if k.priority != p || k.covered != c || skipped.contains(&e) {
            continue;
        }
        let (a, b) = (work.index(e.lo())?, work.index(e.hi())?);
        if cfg.preserve_connectivity && !work.connected_avoiding(a, b) {
            // Removing further links can only keep it a bridge.
            skipped.insert(e);
            continue;
        }
        let key = current.remove(&e).expect("checked above");
        work.remove_link(e)?;
        removed.push(PruneStep { step: removed.len(), key });
        stats[a] = stats_at(&work, a);
        stats[b] = stats_at(&work, b);
        for x in [a, b] {
            let xid = work.id(x);
            let around: Vec<usize> = work.neighbors_of(x).collect();
            for y in around {
                let f = Edge::new(xid, work.id(y)).expect("no self-loops");
                let k = key_for(&work, &stats, covered[&f], f);
                let old = current.insert(f, k).expect("live link has a key");
                if old.priority != k.priority && !skipped.contains(&f) {
                    push(&mut heap, &k);
                }
            }
        }
    }
    Ok(PruneOutcome {
        topology: work,
        removed,
        bridges_kept: skipped.len(),
    })
}

/// Fraction of (link, endpoint) classifications at each level.
pub fn level_occupancy(topo: &Topology) -> [f64; 4] {
    let stats: Vec<Option<NodeLinkStats>> = (0..topo.node_count()).map(|i| stats_at(topo, i)).collect();
    let mut counts = [0usize; 4];
    for &e in topo.links() {
        let len = topo.link_length(e).expect("validated");
        for id in [e.lo(), e.hi()] {
            let s = stats[topo.index(id).unwrap()].as_ref().unwrap();
            counts[sd_level(len, s).index()] += 1;
        }
    }
    fractions(counts)
}

/// Level fractions of `lengths` judged against their own mean and SD, as
/// seen from a single node holding all of them.
pub fn level_fractions(lengths: &[f64]) -> [f64; 4] {
    let Some((mean, sd)) = mean_sd(lengths) else {
        return [0.0; 4];
    };
    let mut counts = [0usize; 4];
    for &l in lengths {
        counts[level_for(l, mean, sd).index()] += 1;
    }
    fractions(counts)
}

fn fractions(counts: [usize; 4]) -> [f64; 4] {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return [0.0; 4];
    }
    counts.map(|c| c as f64 / total as f64)
}
