//! Node sets and undirected link graphs over them.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{dist, Point, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub id: NodeId,
    pub point: Point,
}

/// Deployment rectangle `[0, w] x [0, h]`, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Area {
    pub w: f64,
    pub h: f64,
}

impl Default for Area {
    fn default() -> Self {
        Area { w: 1000.0, h: 1000.0 }
    }
}

/// A set of identified nodes with pairwise distinct ids and coordinates,
/// kept sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    nodes: Vec<Node>,
    index: HashMap<NodeId, usize>,
}

impl NodeSet {
    pub fn new(nodes: impl IntoIterator<Item = Node>) -> Result<Self> {
        let mut nodes: Vec<Node> = nodes.into_iter().collect();
        nodes.sort_by_key(|n| n.id);
        for w in nodes.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateId(w[0].id));
            }
        }
        let mut seen: HashMap<Point, NodeId> = HashMap::with_capacity(nodes.len());
        for n in &nodes {
            if let Some(&other) = seen.get(&n.point) {
                return Err(Error::DuplicatePoint(n.id, other));
            }
            seen.insert(n.point, n.id);
        }
        let index = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        Ok(NodeSet { nodes, index })
    }

    /// Nodes numbered `0..points.len()` in the given order.
    pub fn from_points(points: impl IntoIterator<Item = Point>) -> Result<Self> {
        NodeSet::new(points.into_iter().enumerate().map(|(i, point)| Node {
            id: NodeId(i as u32),
            point,
        }))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn iter(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn point(&self, id: NodeId) -> Result<Point> {
        self.index_of(id)
            .map(|i| self.nodes[i].point)
            .ok_or(Error::UnknownNode(id))
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.nodes.iter().map(|n| n.point)
    }
}

/// An undirected link, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(NodeId, NodeId);

impl Edge {
    pub fn new(a: NodeId, b: NodeId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge(a, b)),
            std::cmp::Ordering::Greater => Ok(Edge(b, a)),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    pub fn lo(self) -> NodeId {
        self.0
    }

    pub fn hi(self) -> NodeId {
        self.1
    }

    pub fn other(self, u: NodeId) -> NodeId {
        if u == self.0 {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Undirected link graph over a [`NodeSet`].
///
/// Adjacency is indexed by position in the node set so that metric and
/// simulation loops avoid hashing.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    area: Area,
    nodes: NodeSet,
    links: BTreeSet<Edge>,
    adj: Vec<BTreeSet<usize>>,
}

impl Topology {
    pub fn empty(nodes: NodeSet, area: Area) -> Self {
        let adj = vec![BTreeSet::new(); nodes.len()];
        Topology {
            area,
            nodes,
            links: BTreeSet::new(),
            adj,
        }
    }

    pub fn new(nodes: NodeSet, area: Area, links: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut t = Topology::empty(nodes, area);
        for e in links {
            t.add_link(e)?;
        }
        Ok(t)
    }

    /// Builds a topology from raw id pairs, rejecting unknown ids and self-loops.
    pub fn from_pairs(
        nodes: NodeSet,
        area: Area,
        pairs: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let mut t = Topology::empty(nodes, area);
        for (a, b) in pairs {
            t.add_link(Edge::new(NodeId(a), NodeId(b))?)?;
        }
        Ok(t)
    }

    pub fn area(&self) -> Area {
        self.area
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn links(&self) -> &BTreeSet<Edge> {
        &self.links
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn has_link(&self, e: Edge) -> bool {
        self.links.contains(&e)
    }

    /// Returns false if the link was already present.
    pub fn add_link(&mut self, e: Edge) -> Result<bool> {
        let a = self.index(e.lo())?;
        let b = self.index(e.hi())?;
        if !self.links.insert(e) {
            return Ok(false);
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(true)
    }

    pub fn remove_link(&mut self, e: Edge) -> Result<()> {
        if !self.links.remove(&e) {
            return Err(Error::UnknownLink(e));
        }
        let a = self.index(e.lo())?;
        let b = self.index(e.hi())?;
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
        Ok(())
    }

    pub fn index(&self, id: NodeId) -> Result<usize> {
        self.nodes.index_of(id).ok_or(Error::UnknownNode(id))
    }

    pub fn id(&self, index: usize) -> NodeId {
        self.nodes.nodes()[index].id
    }

    pub fn point_at(&self, index: usize) -> Point {
        self.nodes.nodes()[index].point
    }

    pub fn point(&self, id: NodeId) -> Result<Point> {
        self.nodes.point(id)
    }

    /// Neighbour indices of the node at `index`, ascending.
    pub fn neighbors_of(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[index].iter().copied()
    }

    pub fn neighbors(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let i = self.index(id)?;
        Ok(self.neighbors_of(i).map(|j| self.id(j)).collect())
    }

    pub fn degree_of(&self, index: usize) -> usize {
        self.adj[index].len()
    }

    pub fn incident_links(&self, id: NodeId) -> Result<Vec<Edge>> {
        let i = self.index(id)?;
        Ok(self
            .neighbors_of(i)
            .map(|j| Edge::new(id, self.id(j)).expect("no self-loops"))
            .collect())
    }

    pub fn link_length(&self, e: Edge) -> Result<f64> {
        Ok(dist(self.point(e.lo())?, self.point(e.hi())?))
    }

    /// Link geometry in `links()` order.
    pub fn segments(&self) -> Vec<Segment> {
        self.links
            .iter()
            .map(|e| {
                Segment::new(
                    self.point(e.lo()).expect("validated"),
                    self.point(e.hi()).expect("validated"),
                )
            })
            .collect()
    }

    pub fn total_link_length(&self) -> f64 {
        self.links
            .iter()
            .map(|&e| self.link_length(e).expect("validated"))
            .sum()
    }

    /// Connected-component label per node index.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors_of(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Whether `a` and `b` stay connected without using the direct link
    /// between them. Bidirectional BFS, so local detours are found fast.
    pub(crate) fn connected_avoiding(&self, a: usize, b: usize) -> bool {
        // 0 = unseen, 1 = reached from a, 2 = reached from b
        let mut mark = HashMap::<usize, u8>::new();
        let mut fa = vec![a];
        let mut fb = vec![b];
        mark.insert(a, 1);
        mark.insert(b, 2);
        let skip = |u: usize, v: usize| (u == a && v == b) || (u == b && v == a);
        while !fa.is_empty() && !fb.is_empty() {
            let (frontier, side, other) = if fa.len() <= fb.len() {
                (&mut fa, 1u8, 2u8)
            } else {
                (&mut fb, 2u8, 1u8)
            };
            let mut next = Vec::new();
            for &u in frontier.iter() {
                for v in self.neighbors_of(u) {
                    if skip(u, v) {
                        continue;
                    }
                    match mark.get(&v) {
                        Some(&m) if m == other => return true,
                        Some(_) => {}
                        None => {
                            mark.insert(v, side);
                            next.push(v);
                        }
                    }
                }
            }
            *frontier = next;
        }
        false
    }
}
