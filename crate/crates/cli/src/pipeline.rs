//! Batch experiment: deploy, build the three topology kinds, measure them,
//! simulate the configured scenarios and write CSVs and SVGs.

use std::path::{Path, PathBuf};

use meshtopo_core::interference::InterferenceModel;
use meshtopo_core::pruning::PruneConfig;
use meshtopo_core::rng::derive;
use meshtopo_core::strategy::{interference_models, topology_strategies, BuildContext};
use meshtopo_core::topology::Area;
use meshtopo_core::voronoi::{voronoi_dual, Rect};
use meshtopo_core::Triangulation;
use meshtopo_sim::{generate_flows, run_sim, SimParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deploy::generate_deployment;
use crate::error::{parse_err, read, write, Result};
use crate::rows::{summarize_metrics, write_metrics_csv, write_sim_csv, write_summary_csv, MetricsRow, SimRow, SummaryRow};
use crate::svg::render_svg;

pub const KINDS: [&str; 3] = ["original", "dt", "dt_sd"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub nodes: usize,
    pub flows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PruneSettings {
    pub max_priority: u8,
    pub preserve_connectivity: bool,
    pub tie_seed: Option<u64>,
}

impl Default for PruneSettings {
    fn default() -> Self {
        PruneConfig::default().into()
    }
}

impl From<PruneConfig> for PruneSettings {
    fn from(c: PruneConfig) -> Self {
        PruneSettings {
            max_priority: c.max_priority,
            preserve_connectivity: c.preserve_connectivity,
            tie_seed: c.tie_seed,
        }
    }
}

impl From<PruneSettings> for PruneConfig {
    fn from(s: PruneSettings) -> Self {
        PruneConfig {
            max_priority: s.max_priority,
            preserve_connectivity: s.preserve_connectivity,
            tie_seed: s.tie_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub node_counts: Vec<usize>,
    pub topologies_per_count: usize,
    /// Base seed; every deployment and simulation seed derives from it.
    pub seed: u64,
    pub area_w_m: f64,
    pub area_h_m: f64,
    pub initial_range_m: f64,
    /// Interference model name for the metrics.
    pub model: String,
    pub scenarios: Vec<Scenario>,
    /// Simulation runs per scenario and topology.
    pub sim_runs: usize,
    pub prune: PruneSettings,
    pub sim: SimParams,
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            node_counts: vec![50, 75, 100, 125, 150, 175, 200],
            topologies_per_count: 10,
            seed: 1,
            area_w_m: 1000.0,
            area_h_m: 1000.0,
            initial_range_m: 300.0,
            model: "range".into(),
            scenarios: [(50, 30), (100, 50), (150, 100), (200, 150)]
                .map(|(nodes, flows)| Scenario { nodes, flows })
                .to_vec(),
            sim_runs: 1,
            prune: PruneSettings::default(),
            sim: SimParams::default(),
            svg: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
        cfg.validate(origin)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read("load config", path)?, &path.display().to_string())
    }

    pub fn validate(&self, origin: &str) -> Result<()> {
        if self.node_counts.contains(&0) {
            return Err(parse_err(origin, "node_counts: counts must be positive"));
        }
        if !(self.area_w_m > 0.0 && self.area_h_m > 0.0) {
            return Err(parse_err(origin, "area_w_m, area_h_m: must be positive"));
        }
        if self.initial_range_m.is_nan() || self.initial_range_m < 0.0 {
            return Err(parse_err(origin, "initial_range_m: must be non-negative"));
        }
        PruneConfig::from(self.prune)
            .validate()
            .map_err(|e| parse_err(origin, format!("prune: {e}")))?;
        self.sim.validate().map_err(|e| parse_err(origin, format!("sim: {e}")))?;
        interference_models()
            .get(&self.model)
            .map_err(|e| parse_err(origin, format!("model: {e}")))?;
        Ok(())
    }

    pub fn area(&self) -> Area {
        Area {
            w: self.area_w_m,
            h: self.area_h_m,
        }
    }

    /// Deployment seed of topology `index` at node count `n`.
    pub fn topology_seed(&self, n: usize, index: usize) -> u64 {
        derive(self.seed, &[n as u64, index as u64])
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineOutput {
    pub metrics: Vec<MetricsRow>,
    pub sims: Vec<SimRow>,
    pub summary: Vec<SummaryRow>,
    /// File name and content.
    pub svgs: Vec<(String, String)>,
}

struct Cell {
    metrics: Vec<MetricsRow>,
    sims: Vec<SimRow>,
    svgs: Vec<(String, String)>,
}

fn run_cell(cfg: &ExperimentConfig, model: &dyn InterferenceModel, n: usize, index: usize) -> Result<Cell> {
    let seed = cfg.topology_seed(n, index);
    let area = cfg.area();
    let nodes = generate_deployment(n, area, seed)?;
    let ctx = BuildContext {
        seed,
        initial_range_m: cfg.initial_range_m,
        prune: cfg.prune.into(),
    };
    let registry = topology_strategies();
    let topos = KINDS
        .iter()
        .map(|k| registry.get(k)?.build(&nodes, area, &ctx))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let metrics = KINDS
        .iter()
        .zip(&topos)
        .map(|(k, t)| MetricsRow::measure(k, seed, t, model))
        .collect();

    let mut sims = Vec::new();
    for sc in cfg.scenarios.iter().filter(|s| s.nodes == n) {
        let name = format!("n{}_f{}", sc.nodes, sc.flows);
        for run in 0..cfg.sim_runs {
            let flows = generate_flows(&topos[0], sc.flows, derive(seed, &[1, run as u64]))?;
            let params = SimParams {
                seed: derive(seed, &[2, run as u64]),
                ..cfg.sim.clone()
            };
            for (k, t) in KINDS.iter().zip(&topos) {
                let r = run_sim(t, &flows, &params)?;
                sims.push(SimRow::new(&name, params.seed, k, n, sc.flows, &r));
            }
        }
    }

    let mut svgs = Vec::new();
    if cfg.svg {
        let vor = if nodes.len() >= 2 {
            voronoi_dual(&Triangulation::build(&nodes, seed), Rect::from_area(area)).ok()
        } else {
            None
        };
        for (k, t) in KINDS.iter().zip(&topos) {
            let overlay = if *k == "dt" { vor.as_ref() } else { None };
            svgs.push((format!("n{n}_t{index}_{k}.svg"), render_svg(t, overlay)));
        }
    }
    Ok(Cell { metrics, sims, svgs })
}

/// Runs every (node count, topology) cell in parallel. Rows come back in
/// node-count, topology-index, kind order.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<PipelineOutput> {
    cfg.validate("config")?;
    let models = interference_models();
    let model = models.get(&cfg.model)?;
    let cells: Vec<(usize, usize)> = cfg
        .node_counts
        .iter()
        .flat_map(|&n| (0..cfg.topologies_per_count).map(move |i| (n, i)))
        .collect();
    let done = cells
        .par_iter()
        .map(|&(n, i)| run_cell(cfg, model, n, i))
        .collect::<Result<Vec<_>>>()?;
    let mut out = PipelineOutput::default();
    for c in done {
        out.metrics.extend(c.metrics);
        out.sims.extend(c.sims);
        out.svgs.extend(c.svgs);
    }
    out.summary = summarize_metrics(&out.metrics);
    Ok(out)
}

/// Writes `metrics.csv`, `sim.csv`, `summary.csv` and `svg/*.svg` under
/// `dir`, returning the paths written.
pub fn write_outputs(out: &PipelineOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let p = dir.join("metrics.csv");
    write_metrics_csv(&p, &out.metrics)?;
    written.push(p);
    let p = dir.join("sim.csv");
    write_sim_csv(&p, &out.sims)?;
    written.push(p);
    let p = dir.join("summary.csv");
    write_summary_csv(&p, &out.summary)?;
    written.push(p);
    for (name, svg) in &out.svgs {
        let p = dir.join("svg").join(name);
        write("write svg", &p, svg.as_bytes())?;
        written.push(p);
    }
    Ok(written)
}
