//! Named, interchangeable algorithms.
//!
//! Each family (topology builders, crossing detectors, interference models)
//! is a trait object type; a [`Registry`] maps names to implementations so
//! the CLI and pipeline pick them at runtime.

use crate::error::{Error, Result};
use crate::geom::{snap, Segment};
use crate::interference::{InterferenceModel, LinkModel, RangeModel};
use crate::pruning::{prune, PruneConfig};
use crate::spatial::GridIndex;
use crate::sweep::{brute_force_crossings, find_crossings, CrossingSet};
use crate::topology::{Area, Edge, NodeSet, Topology};
use crate::triangulation::Triangulation;

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Strategy> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Strategy> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds `item`, replacing any entry of the same name.
    pub fn register(&mut self, item: Box<T>) {
        self.entries.retain(|e| e.name() != item.name());
        self.entries.push(item);
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries.iter().map(|b| b.as_ref())
    }
}

/// Inputs shared by topology builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildContext {
    pub seed: u64,
    /// Radio range of the unprocessed network, metres.
    pub initial_range_m: f64,
    pub prune: PruneConfig,
}

impl Default for BuildContext {
    fn default() -> Self {
        BuildContext {
            seed: 0,
            initial_range_m: 300.0,
            prune: PruneConfig::default(),
        }
    }
}

pub trait TopologyStrategy: Strategy {
    fn build(&self, nodes: &NodeSet, area: Area, ctx: &BuildContext) -> Result<Topology>;
}

/// Every pair within the initial radio range.
pub struct FixedRange;

/// Delaunay triangulation edges.
pub struct Delaunay;

/// Delaunay edges after standard-deviation pruning.
pub struct DelaunayPruned;

/// Every pair linked.
pub struct FullMesh;

impl Strategy for FixedRange {
    fn name(&self) -> &'static str {
        "original"
    }
    fn description(&self) -> &'static str {
        "all pairs within the initial transmission range"
    }
}

impl TopologyStrategy for FixedRange {
    fn build(&self, nodes: &NodeSet, area: Area, ctx: &BuildContext) -> Result<Topology> {
        let r = snap(ctx.initial_range_m)?;
        if r < 0 {
            return Err(Error::InvalidParameter(format!(
                "initial range must be non-negative, got {}",
                ctx.initial_range_m
            )));
        }
        let r2 = (r as i128) * (r as i128);
        let pts: Vec<_> = nodes.points().collect();
        let grid = GridIndex::new(pts.clone());
        let mut links = Vec::new();
        for (i, &p) in pts.iter().enumerate() {
            grid.for_each_within(p, r2, |j| {
                if j > i {
                    links.push((i, j));
                }
            });
        }
        let ids: Vec<_> = nodes.iter().map(|n| n.id).collect();
        Topology::new(
            nodes.clone(),
            area,
            links.into_iter().map(|(i, j)| Edge::new(ids[i], ids[j]).expect("distinct")),
        )
    }
}

impl Strategy for Delaunay {
    fn name(&self) -> &'static str {
        "dt"
    }
    fn description(&self) -> &'static str {
        "Delaunay triangulation"
    }
}

impl TopologyStrategy for Delaunay {
    fn build(&self, nodes: &NodeSet, area: Area, ctx: &BuildContext) -> Result<Topology> {
        Ok(Triangulation::build(nodes, ctx.seed).link_graph(area))
    }
}

impl Strategy for DelaunayPruned {
    fn name(&self) -> &'static str {
        "dt_sd"
    }
    fn description(&self) -> &'static str {
        "Delaunay triangulation with standard-deviation pruning"
    }
}

impl TopologyStrategy for DelaunayPruned {
    fn build(&self, nodes: &NodeSet, area: Area, ctx: &BuildContext) -> Result<Topology> {
        let dt = Delaunay.build(nodes, area, ctx)?;
        Ok(prune(&dt, &ctx.prune)?.topology)
    }
}

impl Strategy for FullMesh {
    fn name(&self) -> &'static str {
        "full_mesh"
    }
    fn description(&self) -> &'static str {
        "complete graph"
    }
}

impl TopologyStrategy for FullMesh {
    fn build(&self, nodes: &NodeSet, area: Area, _ctx: &BuildContext) -> Result<Topology> {
        let ids: Vec<_> = nodes.iter().map(|n| n.id).collect();
        let links = ids
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| ids[i + 1..].iter().map(move |&b| Edge::new(a, b).expect("distinct")));
        Topology::new(nodes.clone(), area, links)
    }
}

pub trait CrossingDetector: Strategy {
    fn detect(&self, segments: &[Segment]) -> CrossingSet;
}

pub struct SweepLine;

pub struct BruteForce;

impl Strategy for SweepLine {
    fn name(&self) -> &'static str {
        "sweep"
    }
    fn description(&self) -> &'static str {
        "plane sweep, O((n + k) log n)"
    }
}

impl CrossingDetector for SweepLine {
    fn detect(&self, segments: &[Segment]) -> CrossingSet {
        find_crossings(segments)
    }
}

impl Strategy for BruteForce {
    fn name(&self) -> &'static str {
        "brute_force"
    }
    fn description(&self) -> &'static str {
        "all pairs, O(n^2)"
    }
}

impl CrossingDetector for BruteForce {
    fn detect(&self, segments: &[Segment]) -> CrossingSet {
        brute_force_crossings(segments)
    }
}

impl Strategy for RangeModel {
    fn name(&self) -> &'static str {
        "range"
    }
    fn description(&self) -> &'static str {
        "nodes within the transmitter's longest-link range"
    }
}

impl Strategy for LinkModel {
    fn name(&self) -> &'static str {
        "link"
    }
    fn description(&self) -> &'static str {
        "the transmitter's link neighbours"
    }
}

pub fn topology_strategies() -> Registry<dyn TopologyStrategy> {
    let mut r: Registry<dyn TopologyStrategy> = Registry::new("topology");
    r.register(Box::new(FixedRange));
    r.register(Box::new(Delaunay));
    r.register(Box::new(DelaunayPruned));
    r.register(Box::new(FullMesh));
    r
}

pub fn crossing_detectors() -> Registry<dyn CrossingDetector> {
    let mut r: Registry<dyn CrossingDetector> = Registry::new("crossing detector");
    r.register(Box::new(SweepLine));
    r.register(Box::new(BruteForce));
    r
}

pub fn interference_models() -> Registry<dyn InterferenceModel> {
    let mut r: Registry<dyn InterferenceModel> = Registry::new("interference model");
    r.register(Box::new(RangeModel));
    r.register(Box::new(LinkModel));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn nodes() -> NodeSet {
        NodeSet::from_points(
            [(0.0, 0.0), (100.0, 0.0), (0.0, 100.0), (400.0, 0.0), (300.0, 0.0)]
                .map(|(x, y)| Point::from_meters(x, y).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn lookup_and_unknown_names() {
        let r = topology_strategies();
        assert_eq!(r.names(), vec!["original", "dt", "dt_sd", "full_mesh"]);
        let err = r.get("nope").err().unwrap();
        assert!(err.to_string().contains("original, dt, dt_sd, full_mesh"));
        assert_eq!(crossing_detectors().names(), vec!["sweep", "brute_force"]);
        assert_eq!(interference_models().get("link").unwrap().name(), "link");
    }

    #[test]
    fn fixed_range_is_inclusive() {
        let t = FixedRange.build(&nodes(), Area::default(), &BuildContext::default()).unwrap();
        // 0-1, 0-2, 0-4 (exactly 300 m), 1-2, 1-4, 1-3 (300 m), 3-4
        assert_eq!(t.link_count(), 7);
    }

    #[test]
    fn builders_agree_on_counts() {
        let ctx = BuildContext::default();
        let full = FullMesh.build(&nodes(), Area::default(), &ctx).unwrap();
        assert_eq!(full.link_count(), 10);
        let dt = Delaunay.build(&nodes(), Area::default(), &ctx).unwrap();
        let pruned = DelaunayPruned.build(&nodes(), Area::default(), &ctx).unwrap();
        assert!(pruned.link_count() <= dt.link_count());
        assert!(pruned.is_connected());
    }

    #[test]
    fn register_replaces_same_name() {
        let mut r = crossing_detectors();
        r.register(Box::new(SweepLine));
        assert_eq!(r.names(), vec!["brute_force", "sweep"]);
    }
}
