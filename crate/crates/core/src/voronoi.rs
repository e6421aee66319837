//! Voronoi diagram as the dual of a Delaunay triangulation.
//!
//! A site's cell is the intersection of the half-planes bounded by the
//! perpendicular bisectors to its Delaunay neighbours. Each clipped polygon
//! edge remembers which neighbour's bisector produced it; two sites are
//! adjacent when that edge has positive length. Adjacency is decided on a
//! box enclosing every circumcentre (so each unbounded hull edge keeps a
//! finite piece), and the returned polygons are then clipped to the caller's
//! box.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geom::{circumcenter, Coord};
use crate::topology::{Area, Edge, NodeId};
use crate::triangulation::Triangulation;

/// Axis-aligned rectangle in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn from_area(area: Area) -> Self {
        Rect::new(0.0, 0.0, area.w, area.h)
    }

    /// Grown on every side by `frac` of its width and height.
    pub fn expanded(&self, frac: f64) -> Self {
        let dx = (self.x1 - self.x0) * frac;
        let dy = (self.y1 - self.y0) * frac;
        Rect::new(self.x0 - dx, self.y0 - dy, self.x1 + dx, self.y1 + dy)
    }

    fn include(&mut self, c: Coord) {
        self.x0 = self.x0.min(c.x);
        self.y0 = self.y0.min(c.y);
        self.x1 = self.x1.max(c.x);
        self.y1 = self.y1.max(c.y);
    }

    fn corners(&self) -> Vec<Coord> {
        vec![
            Coord::new(self.x0, self.y0),
            Coord::new(self.x1, self.y0),
            Coord::new(self.x1, self.y1),
            Coord::new(self.x0, self.y1),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDiagram {
    pub sites: Vec<(NodeId, Coord)>,
    /// Counter-clockwise cell polygon per site, clipped to the box.
    pub cells: Vec<Vec<Coord>>,
    /// Pairs of sites sharing a cell edge of positive length.
    pub adjacency: BTreeSet<Edge>,
}

impl VoronoiDiagram {
    pub fn cell(&self, id: NodeId) -> Option<&[Coord]> {
        self.sites
            .iter()
            .position(|(s, _)| *s == id)
            .map(|i| self.cells[i].as_slice())
    }

    /// Index of a site whose (closed) cell contains `q`, if any.
    pub fn locate(&self, q: Coord) -> Option<usize> {
        self.cells.iter().position(|c| polygon_contains(c, q))
    }
}

const NO_LABEL: usize = usize::MAX;

/// Convex polygon whose edge `k` runs from `pts[k]` to `pts[k + 1]` and was
/// cut by the bisector with site `labels[k]`.
#[derive(Debug, Clone)]
struct Cell {
    pts: Vec<Coord>,
    labels: Vec<usize>,
}

impl Cell {
    fn boxed(r: &Rect) -> Self {
        Cell {
            pts: r.corners(),
            labels: vec![NO_LABEL; 4],
        }
    }

    /// Keeps the side `n . x <= c`, labelling the new edge with `label`.
    fn clip(&mut self, n: Coord, c: f64, label: usize) {
        let m = self.pts.len();
        if m == 0 {
            return;
        }
        let side = |p: Coord| n.x * p.x + n.y * p.y - c;
        let mut pts = Vec::with_capacity(m + 1);
        let mut labels = Vec::with_capacity(m + 1);
        for k in 0..m {
            let a = self.pts[k];
            let b = self.pts[(k + 1) % m];
            let (sa, sb) = (side(a), side(b));
            let (ina, inb) = (sa <= 0.0, sb <= 0.0);
            if ina {
                pts.push(a);
                labels.push(self.labels[k]);
            }
            if ina != inb {
                let t = sa / (sa - sb);
                let x = Coord::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
                pts.push(x);
                labels.push(if ina { label } else { self.labels[k] });
            }
        }
        self.pts = pts;
        self.labels = labels;
    }

    fn neighbours(&self, min_len: f64) -> impl Iterator<Item = usize> + '_ {
        let m = self.pts.len();
        (0..m).filter_map(move |k| {
            let l = self.labels[k];
            (l != NO_LABEL && self.pts[k].dist(self.pts[(k + 1) % m]) > min_len).then_some(l)
        })
    }
}

/// Bisector half-plane of sites `p` (kept) and `q` in `n . x <= c` form.
fn bisector(p: Coord, q: Coord) -> (Coord, f64) {
    let n = Coord::new(q.x - p.x, q.y - p.y);
    let c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / 2.0;
    (n, c)
}

/// Bisector clipping in coordinates centred on `p`, which keeps the
/// arithmetic well-conditioned far from the origin.
fn cell_around(p: Coord, others: impl Iterator<Item = (usize, Coord)>, r: &Rect) -> Cell {
    let local = Rect::new(r.x0 - p.x, r.y0 - p.y, r.x1 - p.x, r.y1 - p.y);
    let mut cell = Cell::boxed(&local);
    for (j, q) in others {
        let (n, c) = bisector(Coord::new(0.0, 0.0), Coord::new(q.x - p.x, q.y - p.y));
        cell.clip(n, c, j);
    }
    for v in cell.pts.iter_mut() {
        v.x += p.x;
        v.y += p.y;
    }
    cell
}

pub fn voronoi_dual(t: &Triangulation, bbox: Rect) -> Result<VoronoiDiagram> {
    let nodes = t.node_set();
    let sites: Vec<(NodeId, Coord)> = nodes.iter().map(|n| (n.id, n.point.to_coord())).collect();
    let index = |id: NodeId| nodes.index_of(id).expect("triangulation vertex");
    let neighbours: Vec<Vec<usize>> = if t.is_degenerate() {
        if sites.len() != 2 {
            return Err(Error::Degenerate);
        }
        vec![vec![1], vec![0]]
    } else {
        sites
            .iter()
            .map(|(id, _)| t.neighbors(*id).unwrap().into_iter().map(index).collect())
            .collect()
    };

    let mut outer = Rect::new(bbox.x0, bbox.y0, bbox.x1, bbox.y1);
    for (_, c) in &sites {
        outer.include(*c);
    }
    for tri in t.triangles() {
        let [a, b, c] = tri.map(|id| nodes.point(id).unwrap());
        outer.include(circumcenter(a, b, c)?);
    }
    let outer = outer.expanded(0.1);
    let outer = Rect::new(outer.x0 - 1.0, outer.y0 - 1.0, outer.x1 + 1.0, outer.y1 + 1.0);
    let scale = (outer.x1 - outer.x0).max(outer.y1 - outer.y0);
    let min_len = scale * 1e-12;

    let mut adjacency = BTreeSet::new();
    let mut cells = Vec::with_capacity(sites.len());
    for (i, (id, p)) in sites.iter().enumerate() {
        let nb = neighbours[i].iter().map(|&j| (j, sites[j].1));
        let mut cell = cell_around(*p, nb, &outer);
        for j in cell.neighbours(min_len) {
            adjacency.insert(Edge::new(*id, sites[j].0).expect("distinct sites"));
        }
        clip_to_rect(&mut cell, &bbox);
        cells.push(cell.pts);
    }
    Ok(VoronoiDiagram {
        sites,
        cells,
        adjacency,
    })
}

fn clip_to_rect(cell: &mut Cell, r: &Rect) {
    cell.clip(Coord::new(-1.0, 0.0), -r.x0, NO_LABEL);
    cell.clip(Coord::new(1.0, 0.0), r.x1, NO_LABEL);
    cell.clip(Coord::new(0.0, -1.0), -r.y0, NO_LABEL);
    cell.clip(Coord::new(0.0, 1.0), r.y1, NO_LABEL);
}

/// Closed containment test for a counter-clockwise convex polygon, with a
/// small relative tolerance.
pub fn polygon_contains(poly: &[Coord], q: Coord) -> bool {
    let m = poly.len();
    if m < 3 {
        return false;
    }
    (0..m).all(|k| {
        let a = poly[k];
        let b = poly[(k + 1) % m];
        let cross = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
        let scale = (b.x - a.x).abs() + (b.y - a.y).abs();
        cross >= -1e-9 * scale.max(1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::topology::NodeSet;

    fn tri(pts: &[(f64, f64)]) -> Triangulation {
        let nodes = NodeSet::from_points(pts.iter().map(|&(x, y)| Point::from_meters(x, y).unwrap())).unwrap();
        Triangulation::build(&nodes, 1)
    }

    #[test]
    fn two_sites_split_by_bisector() {
        let v = voronoi_dual(&tri(&[(0.0, 0.0), (1.0, 0.0)]), Rect::new(-1.0, -1.0, 2.0, 1.0)).unwrap();
        assert_eq!(v.adjacency.len(), 1);
        let left = &v.cells[0];
        assert!(left.iter().all(|c| c.x <= 0.5 + 1e-12));
        assert!(left.iter().any(|c| (c.x - 0.5).abs() < 1e-12));
        assert!(v.cells[1].iter().all(|c| c.x >= 0.5 - 1e-12));
    }

    #[test]
    fn square_cells_meet_at_centre() {
        let t = tri(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let v = voronoi_dual(&t, Rect::new(-1.0, -1.0, 2.0, 2.0)).unwrap();
        for cell in &v.cells {
            assert!(cell.iter().any(|c| (c.x - 0.5).abs() < 1e-9 && (c.y - 0.5).abs() < 1e-9));
        }
        // The Delaunay diagonal has a zero-length dual edge.
        assert_eq!(v.adjacency.len(), 4);
    }

    #[test]
    fn degenerate_is_an_error() {
        assert_eq!(
            voronoi_dual(&tri(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), Rect::new(0.0, 0.0, 1.0, 1.0)),
            Err(Error::Degenerate)
        );
    }

    #[test]
    fn clip_labels_new_edge() {
        let mut c = Cell::boxed(&Rect::new(0.0, 0.0, 2.0, 2.0));
        c.clip(Coord::new(1.0, 0.0), 1.0, 7);
        assert_eq!(c.pts.len(), 4);
        assert_eq!(c.labels.iter().filter(|&&l| l == 7).count(), 1);
        assert!(c.pts.iter().all(|p| p.x <= 1.0));
    }
}
