//! Incremental Delaunay triangulation with edge flips.
//!
//! Triangles are stored with counter-clockwise vertices and one neighbour
//! per edge (`n[i]` lies across the edge opposite `v[i]`). The outside of
//! the convex hull is tiled by *ghost* triangles that share the vertex
//! [`GHOST`], so every edge has exactly two incident triangles and a point
//! beyond the hull is located like any other: it falls in the ghost
//! triangle of a hull edge that sees it.
//!
//! Points are inserted in a biased randomised order (random rounds, each
//! sorted along a Hilbert curve) drawn from the seeded generator; location
//! walks from the previous insertion. After each split the new vertex's
//! opposite edges are legalised by flips. Cocircular quadruples count as
//! legal, so the result is reproducible per seed but, for cocircular input,
//! depends on insertion order.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::geom::{orient2d, strictly_inside_ccw, CirclePosition, Orientation, Point};
use crate::rng::{derive, MeshRng};
use crate::topology::{Area, Edge, Node, NodeId, NodeSet, Topology};

/// Vertex index of the point at infinity.
pub const GHOST: u32 = u32::MAX;
const NIL: u32 = u32::MAX;
const ORDER_TAG: u64 = 0x7472_6961; // "tria"

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [u32; 3],
    n: [u32; 3],
}

impl Tri {
    fn is_ghost(&self) -> bool {
        self.v.contains(&GHOST)
    }

    fn index_of(&self, v: u32) -> Option<usize> {
        self.v.iter().position(|&x| x == v)
    }
}

#[derive(Debug, Clone, Copy)]
enum Location {
    Inside(u32),
    /// On the edge opposite vertex slot `.1`.
    OnEdge(u32, usize),
    Vertex(u32),
    /// In the ghost triangle of a hull edge that strictly sees the point.
    Outside(u32),
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    ids: Vec<NodeId>,
    pts: Vec<Point>,
    live: Vec<bool>,
    lookup: HashMap<NodeId, u32>,
    /// Some live triangle incident to each vertex, or `NIL`.
    vtri: Vec<u32>,
    tris: Vec<Tri>,
    alive: Vec<bool>,
    free: Vec<u32>,
    hint: u32,
    real_count: usize,
    seed: u64,
}

/// Delaunay triangulation of `nodes`, reproducible per `seed`.
pub fn build_delaunay(nodes: &NodeSet, seed: u64) -> Triangulation {
    Triangulation::build(nodes, seed)
}

impl Triangulation {
    pub fn build(nodes: &NodeSet, seed: u64) -> Self {
        let mut t = Triangulation {
            ids: Vec::with_capacity(nodes.len()),
            pts: Vec::with_capacity(nodes.len()),
            live: Vec::with_capacity(nodes.len()),
            lookup: HashMap::with_capacity(nodes.len()),
            vtri: Vec::with_capacity(nodes.len()),
            tris: Vec::with_capacity(2 * nodes.len() + 4),
            alive: Vec::with_capacity(2 * nodes.len() + 4),
            free: Vec::new(),
            hint: NIL,
            real_count: 0,
            seed,
        };
        for n in nodes.iter() {
            t.push_vertex(n.id, n.point);
        }
        t.construct();
        t
    }

    /// Whether there are no triangles (fewer than three vertices, or all
    /// collinear). Links then form a path in coordinate order.
    pub fn is_degenerate(&self) -> bool {
        self.real_count == 0
    }

    pub fn vertex_count(&self) -> usize {
        self.lookup.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.real_count
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.lookup.contains_key(&id)
    }

    pub fn point(&self, id: NodeId) -> Result<Point> {
        self.vertex(id).map(|v| self.pts[v as usize])
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Live vertices, sorted by id.
    pub fn node_set(&self) -> NodeSet {
        NodeSet::new(self.live_vertices().map(|v| Node {
            id: self.ids[v as usize],
            point: self.pts[v as usize],
        }))
        .expect("vertices are distinct")
    }

    /// Real triangles as counter-clockwise id triples, sorted.
    pub fn triangles(&self) -> Vec<[NodeId; 3]> {
        let mut out: Vec<[NodeId; 3]> = self
            .live_tris()
            .filter(|&t| !self.tris[t as usize].is_ghost())
            .map(|t| {
                let v = self.tris[t as usize].v;
                // Rotate so the smallest id leads; orientation is kept.
                let ids = v.map(|x| self.ids[x as usize]);
                let k = (0..3).min_by_key(|&k| ids[k]).unwrap();
                [ids[k], ids[(k + 1) % 3], ids[(k + 2) % 3]]
            })
            .collect();
        out.sort();
        out
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        if self.is_degenerate() {
            let mut vs: Vec<u32> = self.live_vertices().collect();
            vs.sort_by_key(|&v| self.pts[v as usize]);
            return vs
                .windows(2)
                .map(|w| self.edge_of(w[0], w[1]))
                .collect();
        }
        let mut out = BTreeSet::new();
        for t in self.live_tris() {
            let tri = &self.tris[t as usize];
            if tri.is_ghost() {
                continue;
            }
            for k in 0..3 {
                let a = tri.v[k];
                let b = tri.v[(k + 1) % 3];
                out.insert(self.edge_of(a, b));
            }
        }
        out
    }

    /// The triangulation's edges as mesh links.
    pub fn link_graph(&self, area: Area) -> Topology {
        Topology::new(self.node_set(), area, self.edges()).expect("edges reference live vertices")
    }

    /// Delaunay neighbours of `id`, counter-clockwise. Empty in degenerate mode
    /// unless the path gives it neighbours.
    pub fn neighbors(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let v = self.vertex(id)?;
        if self.is_degenerate() {
            return Ok(self
                .edges()
                .into_iter()
                .filter(|e| e.lo() == id || e.hi() == id)
                .map(|e| e.other(id))
                .collect());
        }
        Ok(self
            .star(v)
            .into_iter()
            .map(|t| {
                let tri = &self.tris[t as usize];
                let i = tri.index_of(v).unwrap();
                tri.v[(i + 1) % 3]
            })
            .filter(|&w| w != GHOST)
            .map(|w| self.ids[w as usize])
            .collect())
    }

    /// Hull vertices in counter-clockwise order, starting from the smallest id.
    pub fn hull(&self) -> Vec<NodeId> {
        let Some(start) = self
            .live_tris()
            .find(|&t| self.tris[t as usize].is_ghost())
        else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut t = start;
        loop {
            let tri = self.tris[t as usize];
            let g = tri.index_of(GHOST).unwrap();
            // Ghost (y, x, G) sits on hull edge x -> y.
            let x = tri.v[(g + 2) % 3];
            out.push(self.ids[x as usize]);
            // Next ghost shares the edge (y, G).
            t = tri.n[(g + 2) % 3];
            if t == start {
                break;
            }
        }
        if let Some(k) = (0..out.len()).min_by_key(|&k| out[k]) {
            out.rotate_left(k);
        }
        out
    }

    pub fn insert_node(&mut self, id: NodeId, p: Point) -> Result<()> {
        if self.lookup.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        if self.is_degenerate() {
            if let Some(w) = self.live_vertices().find(|&w| self.pts[w as usize] == p) {
                return Err(Error::DuplicatePoint(id, self.ids[w as usize]));
            }
            self.push_vertex(id, p);
            self.construct();
            return Ok(());
        }
        let v = self.push_vertex(id, p);
        if let Err(e) = self.insert_vertex(v) {
            self.lookup.remove(&id);
            self.live[v as usize] = false;
            return Err(e);
        }
        Ok(())
    }

    pub fn delete_node(&mut self, id: NodeId) -> Result<()> {
        let v = self.vertex(id)?;
        self.lookup.remove(&id);
        self.live[v as usize] = false;
        if self.is_degenerate() || self.lookup.len() < 3 {
            self.construct();
            return Ok(());
        }
        self.remove_vertex(v);
        if self.real_count == 0 {
            // Everything left is collinear.
            self.construct();
        }
        Ok(())
    }

    /// Whether the internal edge `e` fails the empty-circle test.
    /// Cocircular configurations are legal.
    pub fn is_illegal(&self, e: Edge) -> Result<bool> {
        let (t, k) = self.internal_edge(e)?;
        let tri = self.tris[t as usize];
        let q = self.opposite(t, k);
        let [p, e1, e2] = rot(tri.v, k);
        Ok(strictly_inside_ccw(self.p(p), self.p(e1), self.p(e2), self.p(q)))
    }

    /// Replaces internal edge `e` by the other diagonal of its quadrilateral,
    /// returning the new edge. The quadrilateral must be strictly convex.
    pub fn flip(&mut self, e: Edge) -> Result<Edge> {
        let (t, k) = self.internal_edge(e)?;
        let tri = self.tris[t as usize];
        let q = self.opposite(t, k);
        let [p, e1, e2] = rot(tri.v, k);
        let convex = orient2d(self.p(p), self.p(e1), self.p(q)) == Orientation::Ccw
            && orient2d(self.p(p), self.p(q), self.p(e2)) == Orientation::Ccw;
        if !convex {
            return Err(Error::NonConvexFlip(e));
        }
        self.flip_at(t, k);
        Ok(self.edge_of(p, q))
    }

    /// Flips illegal edges until none remain; returns the number of flips.
    pub fn legalize_all(&mut self) -> usize {
        let mut stack: Vec<(u32, usize)> = self
            .live_tris()
            .flat_map(|t| (0..3).map(move |k| (t, k)))
            .collect();
        self.legalize_edges(&mut stack)
    }

    /// Structural self-check: reciprocal adjacency, counter-clockwise real
    /// triangles, valid vertex back-pointers.
    pub fn check_structure(&self) -> std::result::Result<(), String> {
        let mut reals = 0;
        for t in self.live_tris() {
            let tri = &self.tris[t as usize];
            if !tri.is_ghost() {
                reals += 1;
                let [a, b, c] = tri.v.map(|x| self.p(x));
                if orient2d(a, b, c) != Orientation::Ccw {
                    return Err(format!("triangle {t} is not counter-clockwise"));
                }
            }
            for k in 0..3 {
                let u = tri.n[k];
                if u == NIL || !self.alive[u as usize] {
                    return Err(format!("triangle {t} has a dead neighbour"));
                }
                let a = tri.v[(k + 1) % 3];
                let b = tri.v[(k + 2) % 3];
                let other = &self.tris[u as usize];
                let shares = (0..3).any(|m| {
                    other.v[(m + 1) % 3] == b && other.v[(m + 2) % 3] == a && other.n[m] == t
                });
                if !shares {
                    return Err(format!("adjacency {t} -> {u} is not reciprocal"));
                }
            }
            for &x in &tri.v {
                if x != GHOST && !self.live[x as usize] {
                    return Err(format!("triangle {t} uses dead vertex {x}"));
                }
            }
        }
        if reals != self.real_count {
            return Err(format!("real triangle count {reals} != {}", self.real_count));
        }
        if !self.is_degenerate() {
            for v in self.live_vertices() {
                let t = self.vtri[v as usize];
                if t == NIL || !self.alive[t as usize] || self.tris[t as usize].index_of(v).is_none() {
                    return Err(format!("vertex {v} has a stale triangle pointer"));
                }
            }
        }
        Ok(())
    }

    // ---- internals --------------------------------------------------------

    fn p(&self, v: u32) -> Point {
        self.pts[v as usize]
    }

    fn vertex(&self, id: NodeId) -> Result<u32> {
        self.lookup.get(&id).copied().ok_or(Error::UnknownNode(id))
    }

    fn edge_of(&self, a: u32, b: u32) -> Edge {
        Edge::new(self.ids[a as usize], self.ids[b as usize]).expect("distinct vertices")
    }

    fn live_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.pts.len() as u32).filter(|&v| self.live[v as usize])
    }

    fn live_tris(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.tris.len() as u32).filter(|&t| self.alive[t as usize])
    }

    fn push_vertex(&mut self, id: NodeId, p: Point) -> u32 {
        let v = self.pts.len() as u32;
        self.ids.push(id);
        self.pts.push(p);
        self.live.push(true);
        self.vtri.push(NIL);
        self.lookup.insert(id, v);
        v
    }

    fn alloc(&mut self, tri: Tri) -> u32 {
        if !tri.is_ghost() {
            self.real_count += 1;
        }
        if let Some(t) = self.free.pop() {
            self.tris[t as usize] = tri;
            self.alive[t as usize] = true;
            t
        } else {
            self.tris.push(tri);
            self.alive.push(true);
            (self.tris.len() - 1) as u32
        }
    }

    fn kill(&mut self, t: u32) {
        if !self.tris[t as usize].is_ghost() {
            self.real_count -= 1;
        }
        self.alive[t as usize] = false;
        self.free.push(t);
    }

    /// Overwrites slot `t`, keeping the real-triangle count in step.
    fn set_tri(&mut self, t: u32, tri: Tri) {
        let was_real = !self.tris[t as usize].is_ghost();
        let is_real = !tri.is_ghost();
        self.real_count = self.real_count + is_real as usize - was_real as usize;
        self.tris[t as usize] = tri;
        for &x in &tri.v {
            if x != GHOST {
                self.vtri[x as usize] = t;
            }
        }
    }

    fn replace_neighbor(&mut self, t: u32, old: u32, new: u32) {
        let tri = &mut self.tris[t as usize];
        for k in 0..3 {
            if tri.n[k] == old {
                tri.n[k] = new;
                return;
            }
        }
        panic!("triangle {t} is not adjacent to {old}");
    }

    /// Vertex of the neighbour across the edge opposite slot `k` of `t`.
    fn opposite(&self, t: u32, k: usize) -> u32 {
        let tri = &self.tris[t as usize];
        let e1 = tri.v[(k + 1) % 3];
        let e2 = tri.v[(k + 2) % 3];
        let u = &self.tris[tri.n[k] as usize];
        *u.v.iter().find(|&&x| x != e1 && x != e2).expect("neighbour has an apex")
    }

    /// Throws away all triangles and rebuilds from the live vertices.
    fn construct(&mut self) {
        self.tris.clear();
        self.alive.clear();
        self.free.clear();
        self.real_count = 0;
        self.hint = NIL;
        for t in self.vtri.iter_mut() {
            *t = NIL;
        }
        let live: Vec<u32> = self.live_vertices().collect();
        let order = insertion_order(&self.pts, live, self.seed);
        if order.len() < 3 {
            return;
        }
        let (a, b) = (order[0], order[1]);
        let Some(k) = (2..order.len())
            .find(|&k| orient2d(self.p(a), self.p(b), self.p(order[k])) != Orientation::Collinear)
        else {
            return;
        };
        let c = order[k];
        self.initial_triangle(a, b, c);
        for (i, &v) in order.iter().enumerate() {
            if i < 2 || i == k {
                continue;
            }
            self.insert_vertex(v).expect("node set has distinct points");
        }
    }

    fn initial_triangle(&mut self, a: u32, b: u32, c: u32) {
        let (a, b, c) = if orient2d(self.p(a), self.p(b), self.p(c)) == Orientation::Ccw {
            (a, b, c)
        } else {
            (a, c, b)
        };
        let empty = [NIL; 3];
        let new = [
            self.alloc(Tri { v: [a, b, c], n: empty }),
            self.alloc(Tri { v: [b, a, GHOST], n: empty }),
            self.alloc(Tri { v: [c, b, GHOST], n: empty }),
            self.alloc(Tri { v: [a, c, GHOST], n: empty }),
        ];
        self.glue(&new, &HashMap::new());
        self.hint = new[0];
    }

    /// Sets adjacency for freshly allocated triangles: edges shared among
    /// `new` are paired up, the rest are matched against `boundary`
    /// (directed edge as seen from inside `new` -> outer triangle).
    fn glue(&mut self, new: &[u32], boundary: &HashMap<(u32, u32), u32>) {
        let mut owner: HashMap<(u32, u32), (u32, usize)> = HashMap::with_capacity(new.len() * 3);
        for &t in new {
            let v = self.tris[t as usize].v;
            for k in 0..3 {
                owner.insert((v[(k + 1) % 3], v[(k + 2) % 3]), (t, k));
            }
        }
        for &t in new {
            let v = self.tris[t as usize].v;
            for x in v {
                if x != GHOST {
                    self.vtri[x as usize] = t;
                }
            }
            for k in 0..3 {
                let (a, b) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                if let Some(&(u, _)) = owner.get(&(b, a)) {
                    self.tris[t as usize].n[k] = u;
                } else {
                    let outer = *boundary
                        .get(&(a, b))
                        .unwrap_or_else(|| panic!("unmatched cavity edge ({a}, {b})"));
                    self.tris[t as usize].n[k] = outer;
                    let o = &mut self.tris[outer as usize];
                    let m = (0..3)
                        .find(|&m| o.v[(m + 1) % 3] == b && o.v[(m + 2) % 3] == a)
                        .expect("outer triangle holds the twin edge");
                    o.n[m] = t;
                }
            }
        }
    }

    fn locate(&self, p: Point) -> Location {
        let mut t = self.hint;
        if t == NIL || !self.alive[t as usize] {
            t = self.live_tris().next().expect("non-degenerate");
        }
        if self.tris[t as usize].is_ghost() {
            let g = self.tris[t as usize].index_of(GHOST).unwrap();
            t = self.tris[t as usize].n[g];
        }
        let mut step = 0usize;
        'walk: loop {
            let tri = self.tris[t as usize];
            if tri.is_ghost() {
                return Location::Outside(t);
            }
            let mut zero = [false; 3];
            let start = step % 3;
            step += 1;
            for j in 0..3 {
                let k = (start + j) % 3;
                let a = self.p(tri.v[(k + 1) % 3]);
                let b = self.p(tri.v[(k + 2) % 3]);
                match orient2d(a, b, p) {
                    Orientation::Cw => {
                        t = tri.n[k];
                        continue 'walk;
                    }
                    Orientation::Collinear => zero[k] = true,
                    Orientation::Ccw => {}
                }
            }
            return match zero.iter().filter(|&&z| z).count() {
                0 => Location::Inside(t),
                1 => Location::OnEdge(t, zero.iter().position(|&z| z).unwrap()),
                _ => Location::Vertex(tri.v[zero.iter().position(|&z| !z).unwrap()]),
            };
        }
    }

    fn insert_vertex(&mut self, v: u32) -> Result<()> {
        let p = self.p(v);
        let created = match self.locate(p) {
            Location::Vertex(w) => {
                return Err(Error::DuplicatePoint(self.ids[v as usize], self.ids[w as usize]))
            }
            Location::Inside(t) | Location::Outside(t) => self.split_triangle(t, v).to_vec(),
            Location::OnEdge(t, k) => self.split_edge(t, k, v).to_vec(),
        };
        let mut stack: Vec<u32> = created;
        while let Some(t) = stack.pop() {
            if !self.alive[t as usize] {
                continue;
            }
            let Some(k) = self.tris[t as usize].index_of(v) else {
                continue;
            };
            if self.is_illegal_at(t, k) {
                let (a, b) = self.flip_at(t, k);
                stack.push(a);
                stack.push(b);
            }
        }
        self.hint = self.vtri[v as usize];
        Ok(())
    }

    /// Legality of the edge opposite slot `k` of `t`, with ghost rules:
    /// hull edges are always legal, and a ghost edge is flipped when the
    /// hull would otherwise turn reflex.
    fn is_illegal_at(&self, t: u32, k: usize) -> bool {
        let [p, e1, e2] = rot(self.tris[t as usize].v, k);
        if p == GHOST {
            return false;
        }
        let q = self.opposite(t, k);
        if q == GHOST {
            return false;
        }
        if e1 == GHOST {
            return orient2d(self.p(p), self.p(q), self.p(e2)) == Orientation::Ccw;
        }
        if e2 == GHOST {
            return orient2d(self.p(p), self.p(e1), self.p(q)) == Orientation::Ccw;
        }
        strictly_inside_ccw(self.p(p), self.p(e1), self.p(e2), self.p(q))
    }

    /// Flips the edge opposite slot `k` of `t`. Both slots are reused and
    /// both new triangles contain `t`'s vertex at `k`.
    fn flip_at(&mut self, t: u32, k: usize) -> (u32, u32) {
        let tt = self.tris[t as usize];
        let [p, e1, e2] = rot(tt.v, k);
        let u = tt.n[k];
        let uu = self.tris[u as usize];
        let j = uu.v.iter().position(|&x| x != e1 && x != e2).unwrap();
        let q = uu.v[j];
        debug_assert_eq!(uu.v[(j + 1) % 3], e2);
        let t_ne1 = tt.n[(k + 1) % 3];
        let t_ne2 = tt.n[(k + 2) % 3];
        let u_ne2 = uu.n[(j + 1) % 3];
        let u_ne1 = uu.n[(j + 2) % 3];
        self.set_tri(t, Tri { v: [p, e1, q], n: [u_ne2, u, t_ne2] });
        self.set_tri(u, Tri { v: [p, q, e2], n: [u_ne1, t_ne1, t] });
        self.replace_neighbor(u_ne2, u, t);
        self.replace_neighbor(t_ne1, t, u);
        (t, u)
    }

    fn split_triangle(&mut self, t: u32, v: u32) -> [u32; 3] {
        let tt = self.tris[t as usize];
        let [a, b, c] = tt.v;
        let [na, nb, nc] = tt.n;
        let empty = [NIL; 3];
        let t1 = self.alloc(Tri { v: [v, c, a], n: empty });
        let t2 = self.alloc(Tri { v: [v, a, b], n: empty });
        self.set_tri(t, Tri { v: [v, b, c], n: [na, t1, t2] });
        self.tris[t1 as usize].n = [nb, t2, t];
        self.tris[t2 as usize].n = [nc, t, t1];
        self.replace_neighbor(nb, t, t1);
        self.replace_neighbor(nc, t, t2);
        for x in [c, a] {
            if x != GHOST {
                self.vtri[x as usize] = t1;
            }
        }
        [t, t1, t2]
    }

    fn split_edge(&mut self, t: u32, k: usize, v: u32) -> [u32; 4] {
        let tt = self.tris[t as usize];
        let [a, b, c] = rot(tt.v, k);
        let nb_ = tt.n[(k + 1) % 3];
        let nc_ = tt.n[(k + 2) % 3];
        let u = tt.n[k];
        let uu = self.tris[u as usize];
        let j = uu.v.iter().position(|&x| x != b && x != c).unwrap();
        let d = uu.v[j];
        let uc = uu.n[(j + 1) % 3];
        let ub = uu.n[(j + 2) % 3];
        let empty = [NIL; 3];
        let t2 = self.alloc(Tri { v: [a, v, c], n: empty });
        let u2 = self.alloc(Tri { v: [d, v, b], n: empty });
        self.set_tri(t, Tri { v: [a, b, v], n: [u2, t2, nc_] });
        self.set_tri(u, Tri { v: [d, c, v], n: [t2, u2, ub] });
        self.tris[t2 as usize].n = [u, nb_, t];
        self.tris[u2 as usize].n = [t, uc, u];
        self.replace_neighbor(nb_, t, t2);
        self.replace_neighbor(uc, u, u2);
        for (x, tri) in [(c, t2), (b, u2)] {
            if x != GHOST {
                self.vtri[x as usize] = tri;
            }
        }
        [t, t2, u, u2]
    }

    /// Triangles around `v`, counter-clockwise, ghosts included.
    fn star(&self, v: u32) -> Vec<u32> {
        let start = self.vtri[v as usize];
        let mut out = Vec::with_capacity(8);
        let mut t = start;
        loop {
            out.push(t);
            let tri = &self.tris[t as usize];
            let i = tri.index_of(v).expect("star triangle holds the vertex");
            t = tri.n[(i + 1) % 3];
            if t == start {
                return out;
            }
        }
    }

    /// Finds the triangle holding `e` as a real-real internal edge,
    /// returning it with the slot opposite the edge.
    fn internal_edge(&self, e: Edge) -> Result<(u32, usize)> {
        let a = self.vertex(e.lo())?;
        let b = self.vertex(e.hi())?;
        if self.is_degenerate() {
            return Err(Error::NotAnEdge(e));
        }
        for t in self.star(a) {
            let tri = &self.tris[t as usize];
            let i = tri.index_of(a).unwrap();
            if tri.v[(i + 1) % 3] == b {
                let k = (i + 2) % 3;
                let u = tri.n[k];
                if tri.is_ghost() || self.tris[u as usize].is_ghost() {
                    return Err(Error::BoundaryEdge(e));
                }
                return Ok((t, k));
            }
        }
        Err(Error::NotAnEdge(e))
    }

    fn remove_vertex(&mut self, v: u32) {
        let star = self.star(v);
        let mut link = Vec::with_capacity(star.len());
        let mut boundary = HashMap::with_capacity(star.len());
        for &t in &star {
            let tri = self.tris[t as usize];
            let i = tri.index_of(v).unwrap();
            let (a, b) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
            link.push(a);
            boundary.insert((a, b), tri.n[i]);
        }
        for &t in &star {
            self.kill(t);
        }
        self.vtri[v as usize] = NIL;

        let mut created = Vec::new();
        if let Some(g) = link.iter().position(|&w| w == GHOST) {
            link.rotate_left(g);
            let mut chain: Vec<u32> = link[1..].to_vec();
            while let Some(i) = self.find_ear(&chain, false) {
                created.push(self.alloc(Tri {
                    v: [chain[i - 1], chain[i], chain[i + 1]],
                    n: [NIL; 3],
                }));
                chain.remove(i);
            }
            for w in chain.windows(2) {
                created.push(self.alloc(Tri {
                    v: [w[0], w[1], GHOST],
                    n: [NIL; 3],
                }));
            }
        } else {
            let mut poly = link;
            while poly.len() > 3 {
                let i = self.find_ear(&poly, true).expect("star-shaped cavity has an ear");
                let m = poly.len();
                created.push(self.alloc(Tri {
                    v: [poly[(i + m - 1) % m], poly[i], poly[(i + 1) % m]],
                    n: [NIL; 3],
                }));
                poly.remove(i);
            }
            created.push(self.alloc(Tri {
                v: [poly[0], poly[1], poly[2]],
                n: [NIL; 3],
            }));
        }
        self.glue(&created, &boundary);
        self.hint = created[0];

        let mut stack: Vec<(u32, usize)> = created
            .iter()
            .flat_map(|&t| (0..3).map(move |k| (t, k)))
            .collect();
        self.legalize_edges(&mut stack);
    }

    /// A convex ear of `poly` whose circumcircle holds no other polygon
    /// vertex. For an open chain only interior positions qualify and `None`
    /// means the chain is already convex from outside.
    fn find_ear(&self, poly: &[u32], closed: bool) -> Option<usize> {
        let m = poly.len();
        if m < 3 {
            return None;
        }
        let range = if closed { 0..m } else { 1..m - 1 };
        let mut fallback = None;
        for i in range {
            let a = poly[(i + m - 1) % m];
            let b = poly[i];
            let c = poly[(i + 1) % m];
            let (pa, pb, pc) = (self.p(a), self.p(b), self.p(c));
            if orient2d(pa, pb, pc) != Orientation::Ccw {
                continue;
            }
            fallback.get_or_insert(i);
            let empty = poly
                .iter()
                .filter(|&&w| w != a && w != b && w != c)
                .all(|&w| !strictly_inside_ccw(pa, pb, pc, self.p(w)));
            if empty {
                return Some(i);
            }
        }
        if closed {
            fallback
        } else {
            None
        }
    }

    fn legalize_edges(&mut self, stack: &mut Vec<(u32, usize)>) -> usize {
        let mut flips = 0;
        while let Some((t, k)) = stack.pop() {
            if !self.alive[t as usize] {
                continue;
            }
            let tri = self.tris[t as usize];
            let u = tri.n[k];
            if tri.is_ghost() || self.tris[u as usize].is_ghost() {
                continue;
            }
            if self.is_illegal_at(t, k) {
                let (a, b) = self.flip_at(t, k);
                flips += 1;
                for x in [a, b] {
                    for m in 0..3 {
                        stack.push((x, m));
                    }
                }
            }
        }
        flips
    }
}

fn rot(v: [u32; 3], k: usize) -> [u32; 3] {
    [v[k], v[(k + 1) % 3], v[(k + 2) % 3]]
}

/// Random rounds of doubling size, each sorted along a Hilbert curve.
fn insertion_order(pts: &[Point], mut verts: Vec<u32>, seed: u64) -> Vec<u32> {
    let mut rng = MeshRng::new(derive(seed, &[ORDER_TAG]));
    rng.shuffle(&mut verts);
    if verts.len() < 3 {
        return verts;
    }
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for &v in &verts {
        let p = pts[v as usize];
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1) as i128;
    let key = |v: u32| {
        let p = pts[v as usize];
        let gx = ((p.x - x0) as i128 * 65535 / span) as u32;
        let gy = ((p.y - y0) as i128 * 65535 / span) as u32;
        hilbert_index(gx, gy)
    };
    let mut end = verts.len();
    while end > 0 {
        let start = if end <= 64 { 0 } else { end / 2 };
        verts[start..end].sort_by_cached_key(|&v| (key(v), v));
        end = start;
    }
    verts
}

/// Position along a 2^16 x 2^16 Hilbert curve.
fn hilbert_index(mut x: u32, mut y: u32) -> u64 {
    let n: u32 = 1 << 16;
    let mut d: u64 = 0;
    let mut s = n / 2;
    while s > 0 {
        let rx = (x & s > 0) as u32;
        let ry = (y & s > 0) as u32;
        d += s as u64 * s as u64 * ((3 * rx) ^ ry) as u64;
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

/// Brute-force empty-circumcircle check over all vertices, `O(t n)`.
/// Returns the offending (triangle, vertex) pairs.
pub fn delaunay_violations(t: &Triangulation) -> Vec<([NodeId; 3], NodeId)> {
    let nodes = t.node_set();
    let mut out = Vec::new();
    for tri in t.triangles() {
        let [a, b, c] = tri.map(|id| nodes.point(id).unwrap());
        for n in nodes.iter() {
            if tri.contains(&n.id) {
                continue;
            }
            if crate::geom::in_circle(a, b, c, n.point) == Ok(CirclePosition::Inside) {
                out.push((tri, n.id));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn ns(pts: &[(i64, i64)]) -> NodeSet {
        NodeSet::from_points(pts.iter().map(|&(x, y)| Point::new(x, y))).unwrap()
    }

    fn e(a: u32, b: u32) -> Edge {
        Edge::new(NodeId(a), NodeId(b)).unwrap()
    }

    fn random_points(n: usize, seed: u64) -> NodeSet {
        let mut rng = MeshRng::new(seed);
        let mut pts = BTreeSet::new();
        while pts.len() < n {
            pts.insert(Point::new(
                rng.below(1_000_000_000) as i64,
                rng.below(1_000_000_000) as i64,
            ));
        }
        let mut v: Vec<Point> = pts.into_iter().collect();
        rng.shuffle(&mut v);
        NodeSet::from_points(v).unwrap()
    }

    #[test]
    fn single_triangle() {
        let t = build_delaunay(&ns(&[(0, 0), (10, 0), (0, 10)]), 1);
        assert_eq!(t.triangle_count(), 1);
        assert_eq!(t.edges().len(), 3);
        t.check_structure().unwrap();
        assert_eq!(t.hull().len(), 3);
    }

    #[test]
    fn unit_square_cocircular() {
        let t = build_delaunay(&ns(&[(0, 0), (1, 0), (1, 1), (0, 1)]), 9);
        assert_eq!(t.triangle_count(), 2);
        let edges = t.edges();
        assert_eq!(edges.len(), 5);
        let diag = if edges.contains(&e(0, 2)) { e(0, 2) } else { e(1, 3) };
        assert!(!t.is_illegal(diag).unwrap());
    }

    #[test]
    fn degenerate_inputs() {
        let t = build_delaunay(&ns(&[(0, 0), (5, 5), (2, 2), (9, 9)]), 1);
        assert!(t.is_degenerate());
        let edges: Vec<Edge> = t.edges().into_iter().collect();
        assert_eq!(edges, vec![e(0, 2), e(1, 2), e(1, 3)]);
        assert_eq!(build_delaunay(&ns(&[(0, 0), (1, 0)]), 1).edges().len(), 1);
        assert!(build_delaunay(&ns(&[(0, 0)]), 1).edges().is_empty());
    }

    #[test]
    fn kite_edge_is_illegal_and_flip_fixes_it() {
        // Force the illegal diagonal: build the two triangles by hand via
        // flipping the Delaunay diagonal back.
        let pts = ns(&[(0, 0), (4, 0), (2, 3), (2, -1)]);
        let mut t = build_delaunay(&pts, 3);
        // Delaunay picks 2-3 as the diagonal (the (2,-1) apex sits inside
        // the circle of the upper triangle otherwise).
        assert!(t.edges().contains(&e(2, 3)));
        assert!(!t.is_illegal(e(2, 3)).unwrap());
        let back = t.flip(e(2, 3)).unwrap();
        assert_eq!(back, e(0, 1));
        assert!(t.is_illegal(e(0, 1)).unwrap());
        let again = t.flip(e(0, 1)).unwrap();
        assert_eq!(again, e(2, 3));
        assert!(!t.is_illegal(e(2, 3)).unwrap());
        t.check_structure().unwrap();
    }

    #[test]
    fn flip_is_an_involution_on_cocircular_square() {
        let mut t = build_delaunay(&ns(&[(0, 0), (1, 0), (1, 1), (0, 1)]), 4);
        let before = t.edges();
        let diag = if before.contains(&e(0, 2)) { e(0, 2) } else { e(1, 3) };
        let other = t.flip(diag).unwrap();
        assert_ne!(other, diag);
        assert_eq!(t.hull().len(), 4);
        t.flip(other).unwrap();
        assert_eq!(t.edges(), before);
    }

    #[test]
    fn flip_errors() {
        let mut t = build_delaunay(&ns(&[(0, 0), (10, 0), (0, 10), (3, 3)]), 2);
        // (3,3) is interior: every quadrilateral around it is non-convex.
        assert!(matches!(t.flip(e(0, 3)), Err(Error::NonConvexFlip(_))));
        assert!(matches!(t.flip(e(0, 1)), Err(Error::BoundaryEdge(_))));
        assert!(matches!(t.is_illegal(e(0, 1)), Err(Error::BoundaryEdge(_))));
    }

    #[test]
    fn insert_interior_splits_in_three() {
        let mut t = build_delaunay(&ns(&[(0, 0), (30, 0), (0, 30)]), 1);
        t.insert_node(NodeId(3), Point::new(10, 10)).unwrap();
        assert_eq!(t.triangle_count(), 3);
        assert!(t.triangles().iter().all(|tri| tri.contains(&NodeId(3))));
        t.check_structure().unwrap();
    }

    #[test]
    fn insert_on_shared_edge_splits_in_four() {
        let mut t = build_delaunay(&ns(&[(0, 0), (2, 0), (2, 2), (0, 2)]), 1);
        t.insert_node(NodeId(4), Point::new(1, 1)).unwrap();
        assert_eq!(t.triangle_count(), 4);
        t.check_structure().unwrap();
    }

    #[test]
    fn insert_on_hull_edge_and_outside() {
        let mut t = build_delaunay(&ns(&[(0, 0), (4, 0), (0, 4)]), 1);
        t.insert_node(NodeId(3), Point::new(2, 0)).unwrap();
        t.check_structure().unwrap();
        assert_eq!(t.triangle_count(), 2);
        t.insert_node(NodeId(4), Point::new(10, 10)).unwrap();
        t.check_structure().unwrap();
        // Collinear with a hull edge, beyond its end.
        t.insert_node(NodeId(5), Point::new(-3, 0)).unwrap();
        t.check_structure().unwrap();
        assert!(delaunay_violations(&t).is_empty());
    }

    #[test]
    fn duplicate_insert_rejected() {
        let mut t = build_delaunay(&ns(&[(0, 0), (4, 0), (0, 4)]), 1);
        assert_eq!(
            t.insert_node(NodeId(9), Point::new(4, 0)),
            Err(Error::DuplicatePoint(NodeId(9), NodeId(1)))
        );
        assert_eq!(t.insert_node(NodeId(0), Point::new(7, 7)), Err(Error::DuplicateId(NodeId(0))));
        t.check_structure().unwrap();
        assert_eq!(t.vertex_count(), 3);
    }

    #[test]
    fn delete_hull_vertex_of_square() {
        let mut t = build_delaunay(&ns(&[(0, 0), (1, 0), (1, 1), (0, 1)]), 5);
        t.delete_node(NodeId(2)).unwrap();
        t.check_structure().unwrap();
        assert_eq!(t.triangles(), vec![[NodeId(0), NodeId(1), NodeId(3)]]);
        assert_eq!(t.delete_node(NodeId(2)), Err(Error::UnknownNode(NodeId(2))));
    }

    #[test]
    fn delete_down_to_degenerate() {
        let mut t = build_delaunay(&ns(&[(0, 0), (1, 0), (2, 0), (1, 5)]), 5);
        t.delete_node(NodeId(3)).unwrap();
        assert!(t.is_degenerate());
        assert_eq!(t.edges().len(), 2);
        t.insert_node(NodeId(3), Point::new(1, -5)).unwrap();
        assert_eq!(t.triangle_count(), 2);
        t.check_structure().unwrap();
    }

    #[test]
    fn random_build_is_delaunay() {
        for seed in 0..5 {
            let pts = random_points(300, seed);
            let t = build_delaunay(&pts, seed);
            t.check_structure().unwrap();
            assert!(delaunay_violations(&t).is_empty());
            let h = t.hull().len();
            assert_eq!(t.edges().len(), 3 * 300 - 3 - h);
            assert_eq!(t.triangle_count(), 2 * 300 - 2 - h);
        }
    }

    #[test]
    fn random_deletions_stay_delaunay() {
        let pts = random_points(120, 77);
        let mut t = build_delaunay(&pts, 1);
        let mut rng = MeshRng::new(5);
        let mut ids: Vec<NodeId> = pts.iter().map(|n| n.id).collect();
        rng.shuffle(&mut ids);
        for id in ids.iter().take(100) {
            t.delete_node(*id).unwrap();
            t.check_structure().unwrap();
            assert!(delaunay_violations(&t).is_empty());
        }
        assert_eq!(t.vertex_count(), 20);
    }

    #[test]
    fn hilbert_curve_is_a_bijection_on_a_small_grid() {
        let mut seen = BTreeSet::new();
        for x in 0..16u32 {
            for y in 0..16u32 {
                seen.insert(hilbert_index(x << 12, y << 12));
            }
        }
        assert_eq!(seen.len(), 256);
    }
}
