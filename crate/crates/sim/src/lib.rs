//! Slotted-time packet simulator for mesh topologies.
//!
//! Each slot carries one packet per successful transmission. Contention is
//! carrier sense over transmission ranges followed by p-persistence, and a
//! reception fails when the receiver is transmitting or lies inside another
//! transmitter's range.
//!
//! ```
//! use meshtopo_core::geom::Point;
//! use meshtopo_core::topology::{Area, NodeId, NodeSet, Topology};
//! use meshtopo_sim::{run_sim, Flow, SimParams};
//!
//! let nodes = NodeSet::from_points([Point::new(0, 0), Point::new(50_000_000, 0)]).unwrap();
//! let topo = Topology::from_pairs(nodes, Area::default(), [(0, 1)]).unwrap();
//! let flows = [Flow::new(NodeId(0), NodeId(1))];
//! let params = SimParams { p: 1.0, duration_s: 1.0, ..SimParams::default() };
//! let r = run_sim(&topo, &flows, &params).unwrap();
//! assert_eq!(r.throughput_bps, 1_000_000.0);
//! ```

mod engine;
mod error;
mod flows;
mod routing;

pub use engine::{run_sim, FlowStats, SimParams, SimReport};
pub use error::{Error, Result};
pub use flows::{connected_pair_count, generate_flows, Flow};
pub use routing::{shortest_paths, RoutingTable, UNREACHABLE};
