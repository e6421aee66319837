//! Geometric topology control for wireless mesh networks.
//!
//! A deployment of mesh nodes is turned into a low-interference link graph:
//! crossings between links are found with a plane sweep, the graph is
//! rebuilt as a Delaunay triangulation (with its Voronoi dual available for
//! neighbourhood queries), and long links are pruned by comparing each
//! link's length against the mean and standard deviation of its endpoints'
//! incident links. [`interference`] quantifies the result.
//!
//! Interchangeable algorithms (topology builders, crossing detectors,
//! interference models) implement the traits in [`strategy`] and are looked
//! up by name in a [`strategy::Registry`].

pub mod error;
pub mod geom;
pub mod interference;
pub mod pruning;
pub mod rng;
pub mod spatial;
pub mod strategy;
pub mod sweep;
pub mod topology;
pub mod triangulation;
pub mod voronoi;

pub use error::{Error, Result};
pub use geom::{Coord, Orientation, Point, Segment};
pub use topology::{Area, Edge, Node, NodeId, NodeSet, Topology};
pub use triangulation::Triangulation;
