use std::collections::{BTreeMap, HashSet};

use meshtopo_core::rng::MeshRng;
use meshtopo_core::topology::{NodeId, Topology};

use crate::error::{Error, Result};

/// A backlogged source-to-destination flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flow {
    pub source: NodeId,
    pub destination: NodeId,
}

impl Flow {
    pub fn new(source: NodeId, destination: NodeId) -> Self {
        Flow { source, destination }
    }
}

/// Ordered pairs `(u, v)`, `u != v`, in the same component.
pub fn connected_pair_count(topo: &Topology) -> usize {
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for c in topo.components() {
        *sizes.entry(c).or_default() += 1;
    }
    sizes.values().map(|&s| s * (s - 1)).sum()
}

// Above this many candidate pairs, sample by rejection instead of listing.
const ENUMERATE_LIMIT: usize = 1 << 22;

/// `count` distinct flows drawn uniformly from the connected ordered pairs.
pub fn generate_flows(topo: &Topology, count: usize, seed: u64) -> Result<Vec<Flow>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let available = connected_pair_count(topo);
    if count > available {
        return Err(Error::TooManyFlows { requested: count, available });
    }
    let comp = topo.components();
    let n = topo.node_count();
    let mut rng = MeshRng::new(seed);
    let pairs: Vec<(usize, usize)> = if available <= ENUMERATE_LIMIT {
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && comp[u] == comp[v])
            .collect();
        // Partial Fisher-Yates from the front.
        for i in 0..count {
            let j = i + rng.below((all.len() - i) as u64) as usize;
            all.swap(i, j);
        }
        all.truncate(count);
        all
    } else {
        let mut seen = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let u = rng.below(n as u64) as usize;
            let v = rng.below(n as u64) as usize;
            if u != v && comp[u] == comp[v] && seen.insert((u, v)) {
                out.push((u, v));
            }
        }
        out
    };
    Ok(pairs.into_iter().map(|(u, v)| Flow::new(topo.id(u), topo.id(v))).collect())
}
