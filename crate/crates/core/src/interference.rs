//! Transmission ranges and interference classification.
//!
//! A node's transmission range is its longest incident link. A transmission
//! from `u` silences its *direct* set; nodes outside it that hold a link to a
//! silenced node are *indirectly* affected, since their traffic to that
//! neighbour has to wait. Everything else is unaffected.
//!
//! Which nodes count as direct is pluggable ([`InterferenceModel`]). The
//! default, [`RangeModel`], takes every node within range. [`LinkModel`]
//! takes only the link neighbours, so a node keeps unlinked corners of a
//! triangulated hexagon out of its direct set even when they are in range.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geom::{dist2, Point};
use crate::spatial::GridIndex;
use crate::strategy::Strategy;
use crate::topology::{NodeId, Topology};

/// Squared transmission ranges (exact, in squared micrometres) with a grid
/// index over the node positions.
#[derive(Debug, Clone)]
pub struct Ranges {
    range2: Vec<i128>,
    grid: GridIndex,
}

impl Ranges {
    pub fn new(topo: &Topology) -> Self {
        let range2 = (0..topo.node_count())
            .map(|u| {
                let p = topo.point_at(u);
                topo.neighbors_of(u)
                    .map(|v| dist2(p, topo.point_at(v)))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let grid = GridIndex::new(topo.nodes().points().collect());
        Ranges { range2, grid }
    }

    pub fn range2(&self, u: usize) -> i128 {
        self.range2[u]
    }

    pub fn range_m(&self, u: usize) -> f64 {
        (self.range2[u] as f64).sqrt() / crate::geom::MICROS_PER_METER as f64
    }

    /// Whether `q` lies within `u`'s range.
    pub fn covers(&self, topo: &Topology, u: usize, q: Point) -> bool {
        dist2(topo.point_at(u), q) <= self.range2[u]
    }

    /// Indices other than `u` within `u`'s range, ascending.
    pub fn in_range(&self, topo: &Topology, u: usize) -> Vec<usize> {
        if self.range2[u] == 0 {
            return Vec::new();
        }
        let mut v = self.grid.within(topo.point_at(u), self.range2[u]);
        v.retain(|&x| x != u);
        v
    }

    pub fn grid(&self) -> &GridIndex {
        &self.grid
    }
}

/// Rule deciding which nodes a transmission silences directly.
pub trait InterferenceModel: Strategy {
    /// Node indices other than `u` silenced directly by `u`, ascending.
    fn direct(&self, topo: &Topology, ranges: &Ranges, u: usize) -> Vec<usize>;
}

/// Every node within the transmitter's range.
#[derive(Debug, Clone, Copy, Default)]
pub struct RangeModel;

impl InterferenceModel for RangeModel {
    fn direct(&self, topo: &Topology, ranges: &Ranges, u: usize) -> Vec<usize> {
        ranges.in_range(topo, u)
    }
}

/// The transmitter's link neighbours only.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinkModel;

impl InterferenceModel for LinkModel {
    fn direct(&self, topo: &Topology, _ranges: &Ranges, u: usize) -> Vec<usize> {
        topo.neighbors_of(u).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub node: NodeId,
    pub direct: BTreeSet<NodeId>,
    pub indirect: BTreeSet<NodeId>,
    pub none: BTreeSet<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub total: usize,
    pub average: f64,
}

/// Aggregate metrics of a topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub nodes: usize,
    pub links: usize,
    pub total_degree: usize,
    pub avg_degree: f64,
    pub avg_range_m: f64,
    pub avg_interference_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceReport {
    pub model: &'static str,
    pub summary: Summary,
    pub ranges_m: Vec<f64>,
    pub nodes: Vec<Classification>,
}

/// Longest incident link of `u` in metres, 0 when isolated.
pub fn transmission_range(topo: &Topology, u: NodeId) -> Result<f64> {
    let i = topo.index(u)?;
    let p = topo.point_at(i);
    let r2 = topo
        .neighbors_of(i)
        .map(|v| dist2(p, topo.point_at(v)))
        .max()
        .unwrap_or(0);
    Ok((r2 as f64).sqrt() / crate::geom::MICROS_PER_METER as f64)
}

pub fn classify(topo: &Topology, u: NodeId) -> Result<Classification> {
    classify_with(topo, &RangeModel, u)
}

pub fn classify_with(topo: &Topology, model: &dyn InterferenceModel, u: NodeId) -> Result<Classification> {
    let ranges = Ranges::new(topo);
    let i = topo.index(u)?;
    Ok(classify_index(topo, model, &ranges, i))
}

fn classify_index(topo: &Topology, model: &dyn InterferenceModel, ranges: &Ranges, u: usize) -> Classification {
    let n = topo.node_count();
    let mut state = vec![0u8; n]; // 1 direct, 2 indirect
    state[u] = 3;
    let direct = model.direct(topo, ranges, u);
    for &w in &direct {
        state[w] = 1;
    }
    for &w in &direct {
        for x in topo.neighbors_of(w) {
            if state[x] == 0 {
                state[x] = 2;
            }
        }
    }
    let mut c = Classification {
        node: topo.id(u),
        direct: BTreeSet::new(),
        indirect: BTreeSet::new(),
        none: BTreeSet::new(),
    };
    for (v, s) in state.into_iter().enumerate() {
        let id = topo.id(v);
        match s {
            0 => c.none.insert(id),
            1 => c.direct.insert(id),
            2 => c.indirect.insert(id),
            _ => false,
        };
    }
    c
}

/// Mean over nodes of the directly silenced fraction of the other nodes.
pub fn interference_rate(topo: &Topology) -> Result<f64> {
    interference_rate_with(topo, &RangeModel)
}

pub fn interference_rate_with(topo: &Topology, model: &dyn InterferenceModel) -> Result<f64> {
    let n = topo.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { need: 2, got: n });
    }
    let ranges = Ranges::new(topo);
    Ok(rate_from(topo, model, &ranges))
}

fn rate_from(topo: &Topology, model: &dyn InterferenceModel, ranges: &Ranges) -> f64 {
    let n = topo.node_count();
    let sum: usize = (0..n).map(|u| model.direct(topo, ranges, u).len()).sum();
    sum as f64 / (n as f64 * (n - 1) as f64)
}

pub fn degree_stats(topo: &Topology) -> DegreeStats {
    let total = 2 * topo.link_count();
    let n = topo.node_count();
    DegreeStats {
        total,
        average: if n == 0 { 0.0 } else { total as f64 / n as f64 },
    }
}

/// Degree, range and interference aggregates. The rate is 0 for fewer
/// than two nodes.
pub fn summarize(topo: &Topology, model: &dyn InterferenceModel) -> Summary {
    let ranges = Ranges::new(topo);
    summary_from(topo, model, &ranges)
}

fn summary_from(topo: &Topology, model: &dyn InterferenceModel, ranges: &Ranges) -> Summary {
    let n = topo.node_count();
    let deg = degree_stats(topo);
    let avg_range_m = if n == 0 {
        0.0
    } else {
        (0..n).map(|u| ranges.range_m(u)).sum::<f64>() / n as f64
    };
    Summary {
        nodes: n,
        links: topo.link_count(),
        total_degree: deg.total,
        avg_degree: deg.average,
        avg_range_m,
        avg_interference_rate: if n < 2 { 0.0 } else { rate_from(topo, model, ranges) },
    }
}

/// Full per-node classification plus aggregates. Quadratic in memory; meant
/// for inspection of small topologies.
pub fn report(topo: &Topology, model: &dyn InterferenceModel) -> InterferenceReport {
    let ranges = Ranges::new(topo);
    let n = topo.node_count();
    InterferenceReport {
        model: model.name(),
        summary: summary_from(topo, model, &ranges),
        ranges_m: (0..n).map(|u| ranges.range_m(u)).collect(),
        nodes: (0..n).map(|u| classify_index(topo, model, &ranges, u)).collect(),
    }
}
