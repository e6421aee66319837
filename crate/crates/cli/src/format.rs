//! JSON documents: topologies (also used for deployments, with no links),
//! Voronoi diagrams, crossing reports, prune logs and interference reports.
//!
//! Coordinates are decimal metres. Values with more than six fractional
//! digits are snapped to the micrometre grid on load, so a save/load round
//! trip is exact.

use std::collections::BTreeMap;
use std::path::Path;

use meshtopo_core::geom::{Coord, Point};
use meshtopo_core::interference::InterferenceReport;
use meshtopo_core::pruning::{PruneConfig, PruneOutcome, SdLevel};
use meshtopo_core::sweep::CrossingSet;
use meshtopo_core::topology::{Area, Edge, Node, NodeId, NodeSet, Topology};
use meshtopo_core::voronoi::VoronoiDiagram;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{parse_err, read, write, Result};

pub type Meta = BTreeMap<String, Value>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AreaDoc {
    w: f64,
    h: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: u32,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDoc {
    area: AreaDoc,
    nodes: Vec<NodeDoc>,
    links: Vec<[u32; 2]>,
    #[serde(default)]
    meta: Meta,
}

/// A topology together with its free-form `meta` object.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyFile {
    pub topology: Topology,
    pub meta: Meta,
}

pub fn topology_to_json(topo: &Topology, meta: &Meta) -> String {
    let area = topo.area();
    let doc = TopologyDoc {
        area: AreaDoc { w: area.w, h: area.h },
        nodes: topo
            .nodes()
            .iter()
            .map(|n| NodeDoc {
                id: n.id.0,
                x: n.point.x_m(),
                y: n.point.y_m(),
            })
            .collect(),
        links: topo.links().iter().map(|e| [e.lo().0, e.hi().0]).collect(),
        meta: meta.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data");
    s.push('\n');
    s
}

pub fn topology_from_json(text: &str, origin: &str) -> Result<TopologyFile> {
    let doc: TopologyDoc = serde_json::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
    let area = &doc.area;
    if !(area.w.is_finite() && area.w > 0.0) {
        return Err(parse_err(origin, "area.w must be a positive number"));
    }
    if !(area.h.is_finite() && area.h > 0.0) {
        return Err(parse_err(origin, "area.h must be a positive number"));
    }
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (i, n) in doc.nodes.iter().enumerate() {
        let point = Point::from_meters(n.x, n.y).map_err(|e| parse_err(origin, format!("nodes[{i}]: {e}")))?;
        if point.x_m() < 0.0 || point.y_m() < 0.0 || point.x_m() > area.w || point.y_m() > area.h {
            return Err(parse_err(origin, format!("nodes[{i}] (id {}) lies outside the area", n.id)));
        }
        nodes.push(Node { id: NodeId(n.id), point });
    }
    let nodes = NodeSet::new(nodes).map_err(|e| parse_err(origin, format!("nodes: {e}")))?;
    let mut links = Vec::with_capacity(doc.links.len());
    for (k, &[a, b]) in doc.links.iter().enumerate() {
        for id in [a, b] {
            if nodes.index_of(NodeId(id)).is_none() {
                return Err(parse_err(origin, format!("links[{k}]: unknown node id {id}")));
            }
        }
        links.push(Edge::new(NodeId(a), NodeId(b)).map_err(|e| parse_err(origin, format!("links[{k}]: {e}")))?);
    }
    let n_links = links.len();
    let topology = Topology::new(nodes, Area { w: area.w, h: area.h }, links)
        .map_err(|e| parse_err(origin, format!("links: {e}")))?;
    if topology.link_count() != n_links {
        return Err(parse_err(origin, "links: duplicate link"));
    }
    Ok(TopologyFile { topology, meta: doc.meta })
}

pub fn load_topology(path: &Path) -> Result<TopologyFile> {
    topology_from_json(&read("load topology", path)?, &path.display().to_string())
}

pub fn save_topology(path: &Path, topo: &Topology, meta: &Meta) -> Result<()> {
    write("save topology", path, topology_to_json(topo, meta).as_bytes())
}

/// Rounds to the micrometre grid so that float noise never reaches a file.
fn um(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn xy(c: Coord) -> [f64; 2] {
    [um(c.x), um(c.y)]
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

pub fn voronoi_to_json(v: &VoronoiDiagram) -> String {
    pretty(&json!({
        "sites": v.sites.iter().map(|(id, c)| json!({"id": id.0, "x": um(c.x), "y": um(c.y)})).collect::<Vec<_>>(),
        "cells": v.cells.iter().map(|cell| cell.iter().map(|&c| xy(c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "adjacency": v.adjacency.iter().map(|e| [e.lo().0, e.hi().0]).collect::<Vec<_>>(),
    }))
}

/// Crossings of `topo`'s links, reported as link pairs.
pub fn crossings_to_json(topo: &Topology, set: &CrossingSet, detector: &str) -> String {
    let links: Vec<Edge> = topo.links().iter().copied().collect();
    let pair = |e: Edge| [e.lo().0, e.hi().0];
    pretty(&json!({
        "detector": detector,
        "links": links.len(),
        "crossings": set.len(),
        "pairs": set.crossings.iter().map(|c| json!({
            "links": [pair(links[c.first]), pair(links[c.second])],
            "point": xy(c.point.to_coord()),
        })).collect::<Vec<_>>(),
        "overlaps": set.overlaps.iter().map(|&(a, b)| [pair(links[a]), pair(links[b])]).collect::<Vec<_>>(),
    }))
}

fn level_name(l: SdLevel) -> String {
    format!("level{}", l.index())
}

pub fn prune_log_to_json(cfg: &PruneConfig, out: &PruneOutcome) -> String {
    pretty(&json!({
        "config": {
            "max_priority": cfg.max_priority,
            "preserve_connectivity": cfg.preserve_connectivity,
            "tie_seed": cfg.tie_seed,
        },
        "removed": out.removed.iter().map(|s| json!({
            "step": s.step,
            "link": [s.key.link.lo().0, s.key.link.hi().0],
            "priority": s.key.priority,
            "level_a": level_name(s.key.level_a),
            "level_b": level_name(s.key.level_b),
            "covered": s.key.covered,
            "length_m": um(s.key.length_m),
        })).collect::<Vec<_>>(),
        "bridges_kept": out.bridges_kept,
    }))
}

pub fn report_to_json(r: &InterferenceReport) -> String {
    let ids = |s: &std::collections::BTreeSet<NodeId>| s.iter().map(|n| n.0).collect::<Vec<_>>();
    let s = &r.summary;
    pretty(&json!({
        "model": r.model,
        "summary": {
            "nodes": s.nodes,
            "links": s.links,
            "total_degree": s.total_degree,
            "avg_degree": s.avg_degree,
            "avg_range_m": s.avg_range_m,
            "avg_interference_rate": s.avg_interference_rate,
        },
        "nodes": r.nodes.iter().zip(&r.ranges_m).map(|(c, range)| json!({
            "id": c.node.0,
            "range_m": um(*range),
            "direct": ids(&c.direct),
            "indirect": ids(&c.indirect),
            "none": ids(&c.none),
        })).collect::<Vec<_>>(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Topology {
        let nodes = NodeSet::from_points([(0, 0), (1_500_000, 0), (0, 2_250_000)].map(|(x, y)| Point::new(x, y))).unwrap();
        Topology::from_pairs(nodes, Area::default(), [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn round_trip() {
        let t = small();
        let mut meta = Meta::new();
        meta.insert("kind".into(), json!("dt"));
        let s = topology_to_json(&t, &meta);
        assert!(s.contains("1.5") && s.contains("2.25"));
        let back = topology_from_json(&s, "mem").unwrap();
        assert_eq!(back.topology, t);
        assert_eq!(back.meta, meta);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let missing = r#"{"area": {"w": 10, "h": 10}, "nodes": []}"#;
        assert!(topology_from_json(missing, "mem").unwrap_err().to_string().contains("links"));
        let unknown = r#"{"area": {"w": 10, "h": 10}, "nodes": [{"id": 0, "x": 1, "y": 1}], "links": [[0, 4]]}"#;
        assert!(topology_from_json(unknown, "mem").unwrap_err().to_string().contains("links[0]"));
        let outside = r#"{"area": {"w": 10, "h": 10}, "nodes": [{"id": 0, "x": 11, "y": 1}], "links": []}"#;
        assert!(topology_from_json(outside, "mem").unwrap_err().to_string().contains("nodes[0]"));
        let area = r#"{"area": {"w": 0, "h": 10}, "nodes": [], "links": []}"#;
        assert!(topology_from_json(area, "mem").unwrap_err().to_string().contains("area.w"));
        let dup = r#"{"area": {"w": 10, "h": 10}, "nodes": [{"id": 0, "x": 1, "y": 1}, {"id": 0, "x": 2, "y": 1}], "links": []}"#;
        assert!(topology_from_json(dup, "mem").is_err());
    }

    #[test]
    fn extra_digits_are_snapped() {
        let s = r#"{"area": {"w": 10, "h": 10}, "nodes": [{"id": 3, "x": 1.23456789, "y": 0.0000004}], "links": []}"#;
        let t = topology_from_json(s, "mem").unwrap().topology;
        assert_eq!(t.point(NodeId(3)).unwrap(), Point::new(1_234_568, 0));
    }
}
