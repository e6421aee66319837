use std::collections::HashSet;

use meshtopo_core::geom::Point;
use meshtopo_core::rng::MeshRng;
use meshtopo_core::topology::{Area, Node, NodeId, NodeSet};
use meshtopo_core::Error as CoreError;

use crate::error::Result;

/// `n` i.i.d. uniform nodes in `area`, ids `0..n`. A draw that snaps onto an
/// existing node is redrawn.
pub fn generate_deployment(n: usize, area: Area, seed: u64) -> Result<NodeSet> {
    if n == 0 {
        return Err(CoreError::InvalidParameter("node count must be at least 1".into()).into());
    }
    if !(area.w.is_finite() && area.w > 0.0 && area.h.is_finite() && area.h > 0.0) {
        return Err(CoreError::InvalidParameter(format!("area must be positive, got {} x {}", area.w, area.h)).into());
    }
    let mut rng = MeshRng::new(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut nodes = Vec::with_capacity(n);
    while nodes.len() < n {
        let p = Point::from_meters(rng.uniform_in(0.0, area.w), rng.uniform_in(0.0, area.h))?;
        if seen.insert(p) {
            nodes.push(Node {
                id: NodeId(nodes.len() as u32),
                point: p,
            });
        }
    }
    Ok(NodeSet::new(nodes)?)
}
