//! File formats, deployment generation, SVG rendering and the experiment
//! pipeline behind the `meshtopo` command.

pub mod deploy;
pub mod error;
pub mod format;
pub mod pipeline;
pub mod rows;
pub mod svg;

pub use deploy::generate_deployment;
pub use error::{Error, Result};
pub use format::{load_topology, save_topology, topology_from_json, topology_to_json, Meta, TopologyFile};
pub use pipeline::{run_pipeline, write_outputs, ExperimentConfig, PipelineOutput, PruneSettings, Scenario};
pub use svg::render_svg;
