use std::collections::VecDeque;

use meshtopo_core::topology::{NodeId, Topology};

pub const UNREACHABLE: u32 = u32::MAX;

/// Minimum-hop next hops toward a set of destinations.
///
/// Ties between equally short next hops go to the smaller node id. Entries
/// are indexed by node position in the topology.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTable {
    dests: Vec<usize>,
    // Per destination slot: (next hop, hop count) per node.
    next: Vec<Vec<u32>>,
    hops: Vec<Vec<u32>>,
}

impl RoutingTable {
    /// Routes toward the given destination indices only.
    pub fn toward(topo: &Topology, dests: impl IntoIterator<Item = usize>) -> Self {
        let mut dests: Vec<usize> = dests.into_iter().collect();
        dests.sort_unstable();
        dests.dedup();
        let mut next = Vec::with_capacity(dests.len());
        let mut hops = Vec::with_capacity(dests.len());
        for &d in &dests {
            let h = bfs(topo, d);
            let nh = (0..topo.node_count())
                .map(|u| {
                    if u == d || h[u] == UNREACHABLE {
                        return UNREACHABLE;
                    }
                    topo.neighbors_of(u)
                        .filter(|&w| h[w] != UNREACHABLE && h[w] + 1 == h[u])
                        .min_by_key(|&w| topo.id(w))
                        .map_or(UNREACHABLE, |w| w as u32)
                })
                .collect();
            next.push(nh);
            hops.push(h);
        }
        RoutingTable { dests, next, hops }
    }

    fn slot(&self, dest: usize) -> Option<usize> {
        self.dests.binary_search(&dest).ok()
    }

    /// Next hop index from `from` toward `dest`, `None` when unreachable,
    /// when `from == dest`, or when `dest` is not covered by this table.
    pub fn next_hop(&self, from: usize, dest: usize) -> Option<usize> {
        let s = self.slot(dest)?;
        let v = self.next[s][from];
        (v != UNREACHABLE).then_some(v as usize)
    }

    pub fn hop_count(&self, from: usize, dest: usize) -> Option<u32> {
        let s = self.slot(dest)?;
        let h = self.hops[s][from];
        (h != UNREACHABLE).then_some(h)
    }

    /// Node-id form of [`RoutingTable::next_hop`].
    pub fn route(&self, topo: &Topology, from: NodeId, dest: NodeId) -> Option<NodeId> {
        let f = topo.index(from).ok()?;
        let d = topo.index(dest).ok()?;
        self.next_hop(f, d).map(|v| topo.id(v))
    }
}

/// All-pairs minimum-hop routing table.
pub fn shortest_paths(topo: &Topology) -> RoutingTable {
    RoutingTable::toward(topo, 0..topo.node_count())
}

fn bfs(topo: &Topology, src: usize) -> Vec<u32> {
    let mut h = vec![UNREACHABLE; topo.node_count()];
    h[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for v in topo.neighbors_of(u) {
            if h[v] == UNREACHABLE {
                h[v] = h[u] + 1;
                q.push_back(v);
            }
        }
    }
    h
}
