use thiserror::Error;

use crate::topology::{Edge, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate {0} is not finite")]
    NonFinite(f64),
    #[error("coordinate {0} m is outside the supported range of +/-{max} m", max = crate::geom::MAX_COORD_METERS)]
    OutOfRange(f64),
    #[error("points are collinear; no circumcircle exists")]
    Collinear,
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("node {0} duplicates the coordinates of node {1}")]
    DuplicatePoint(NodeId, NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown link {0}")]
    UnknownLink(Edge),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("node {0} has no incident links")]
    IsolatedNode(NodeId),
    #[error("edge {0} is on the triangulation boundary")]
    BoundaryEdge(Edge),
    #[error("edge {0} is not in the triangulation")]
    NotAnEdge(Edge),
    #[error("quadrilateral around edge {0} is not strictly convex; flip undefined")]
    NonConvexFlip(Edge),
    #[error("triangulation is degenerate (fewer than 3 non-collinear vertices)")]
    Degenerate,
    #[error("need at least {need} nodes, got {got}")]
    TooFewNodes { need: usize, got: usize },
    #[error("unknown {kind} strategy `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
