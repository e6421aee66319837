use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use meshtopo_cli::format::{crossings_to_json, prune_log_to_json, report_to_json, voronoi_to_json};
use meshtopo_cli::rows::{write_metrics_csv, write_sim_csv, MetricsRow, SimRow};
use meshtopo_cli::{
    generate_deployment, load_topology, render_svg, run_pipeline, save_topology, write_outputs, ExperimentConfig, Meta,
};
use meshtopo_core::interference::report;
use meshtopo_core::pruning::{prune, PruneConfig};
use meshtopo_core::rng::RNG_NAME;
use meshtopo_core::strategy::{crossing_detectors, interference_models, topology_strategies, BuildContext};
use meshtopo_core::topology::Area;
use meshtopo_core::voronoi::{voronoi_dual, Rect};
use meshtopo_core::Triangulation;
use meshtopo_sim::{generate_flows, run_sim, SimParams};
use serde_json::json;

#[derive(Parser)]
#[command(name = "meshtopo", version, about = "Geometric topology control for wireless mesh networks")]
struct Cli {
    /// Seed for every randomised stage.
    #[arg(long, global = true, env = "MESH_TOPO_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Random uniform deployment (a topology file without links).
    Generate {
        #[arg(short, long)]
        nodes: usize,
        #[arg(long, default_value_t = 1000.0)]
        width: f64,
        #[arg(long, default_value_t = 1000.0)]
        height: f64,
        #[arg(long, default_value_t = 300.0)]
        initial_range: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Report crossing link pairs as JSON.
    Sweep {
        topology: PathBuf,
        #[arg(long, default_value = "sweep")]
        detector: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build a topology from a deployment.
    Build {
        deployment: PathBuf,
        #[arg(long, default_value = "dt")]
        strategy: String,
        /// Overrides the deployment's recorded initial range.
        #[arg(long)]
        initial_range: Option<f64>,
        #[command(flatten)]
        prune: PruneArgs,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the Voronoi diagram of the deployment.
        #[arg(long)]
        voronoi_out: Option<PathBuf>,
    },
    /// Standard-deviation link pruning.
    Prune {
        topology: PathBuf,
        #[command(flatten)]
        prune: PruneArgs,
        #[arg(short, long)]
        out: PathBuf,
        /// Ordered removal log as JSON.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Degree, range and interference metrics.
    Analyze {
        topology: PathBuf,
        #[arg(long, default_value = "range")]
        model: String,
        /// JSON report; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write a one-row metrics CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Kind label for the CSV row; defaults to the file's meta.kind.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Packet simulation with random flows.
    Simulate {
        topology: PathBuf,
        #[arg(long)]
        flows: usize,
        /// Draw flows from this topology's connected pairs instead.
        #[arg(long)]
        flow_topology: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// SVG rendering.
    Render {
        topology: PathBuf,
        /// Overlay Voronoi cells of the nodes.
        #[arg(long)]
        voronoi: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Full experiment driven by a TOML config.
    Pipeline {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// List registered strategies.
    Strategies,
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=5))]
    max_priority: u8,
    #[arg(long)]
    no_preserve_connectivity: bool,
    /// Seeded tie-break among equally ranked links.
    #[arg(long)]
    tie_seed: Option<u64>,
}

impl PruneArgs {
    fn config(&self) -> PruneConfig {
        PruneConfig {
            max_priority: self.max_priority,
            preserve_connectivity: !self.no_preserve_connectivity,
            tie_seed: self.tie_seed,
        }
    }
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 60.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 50)]
    queue: usize,
    #[arg(long, default_value_t = 0.008)]
    slot: f64,
    #[arg(long, default_value_t = 1000)]
    packet_bytes: u32,
}

const DEFAULT_SEED: u64 = 1;

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing stdout"),
                _ => Ok(()),
            }
        }
    }
}

fn meta_f64(meta: &Meta, key: &str) -> Option<f64> {
    meta.get(key).and_then(|v| v.as_f64())
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.cmd {
        Cmd::Generate {
            nodes,
            width,
            height,
            initial_range,
            out,
        } => {
            let area = Area { w: width, h: height };
            let set = generate_deployment(nodes, area, seed)?;
            let topo = meshtopo_core::Topology::empty(set, area);
            let mut meta = Meta::new();
            meta.insert("kind".into(), json!("deployment"));
            meta.insert("seed".into(), json!(seed));
            meta.insert("rng".into(), json!(RNG_NAME));
            meta.insert("initial_range_m".into(), json!(initial_range));
            save_topology(&out, &topo, &meta)?;
        }
        Cmd::Sweep { topology, detector, out } => {
            let f = load_topology(&topology)?;
            let detectors = crossing_detectors();
            let d = detectors.get(&detector)?;
            let set = d.detect(&f.topology.segments());
            write_text(out.as_deref(), &crossings_to_json(&f.topology, &set, d.name()))?;
        }
        Cmd::Build {
            deployment,
            strategy,
            initial_range,
            prune,
            out,
            voronoi_out,
        } => {
            let f = load_topology(&deployment)?;
            let range = initial_range
                .or_else(|| meta_f64(&f.meta, "initial_range_m"))
                .unwrap_or(BuildContext::default().initial_range_m);
            let ctx = BuildContext {
                seed,
                initial_range_m: range,
                prune: prune.config(),
            };
            let area = f.topology.area();
            let nodes = f.topology.nodes();
            let registry = topology_strategies();
            let topo = registry.get(&strategy)?.build(nodes, area, &ctx)?;
            let mut meta = f.meta.clone();
            meta.insert("kind".into(), json!(strategy));
            meta.insert("initial_range_m".into(), json!(range));
            save_topology(&out, &topo, &meta)?;
            if let Some(vp) = voronoi_out {
                let v = voronoi_dual(&Triangulation::build(nodes, seed), Rect::from_area(area))?;
                write_text(Some(&vp), &voronoi_to_json(&v))?;
            }
        }
        Cmd::Prune { topology, prune: args, out, log } => {
            let f = load_topology(&topology)?;
            let cfg = args.config();
            let outcome = prune(&f.topology, &cfg)?;
            let mut meta = f.meta.clone();
            meta.insert("pruned_links".into(), json!(outcome.removed.len()));
            save_topology(&out, &outcome.topology, &meta)?;
            if let Some(lp) = log {
                write_text(Some(&lp), &prune_log_to_json(&cfg, &outcome))?;
            }
        }
        Cmd::Analyze {
            topology,
            model,
            out,
            csv,
            kind,
        } => {
            let f = load_topology(&topology)?;
            let models = interference_models();
            let m = models.get(&model)?;
            write_text(out.as_deref(), &report_to_json(&report(&f.topology, m)))?;
            if let Some(cp) = csv {
                let kind = kind
                    .or_else(|| f.meta.get("kind").and_then(|v| v.as_str()).map(str::to_string))
                    .unwrap_or_else(|| "unknown".into());
                let file_seed = f.meta.get("seed").and_then(|v| v.as_u64()).unwrap_or(seed);
                write_metrics_csv(&cp, &[MetricsRow::measure(&kind, file_seed, &f.topology, m)])?;
            }
        }
        Cmd::Simulate {
            topology,
            flows,
            flow_topology,
            sim,
            out,
        } => {
            let f = load_topology(&topology)?;
            let source = match &flow_topology {
                Some(p) => load_topology(p)?.topology,
                None => f.topology.clone(),
            };
            if source.nodes() != f.topology.nodes() {
                bail!("flow topology must have the same nodes as the simulated topology");
            }
            let flow_list = generate_flows(&source, flows, seed)?;
            let params = SimParams {
                slot_s: sim.slot,
                duration_s: sim.duration,
                packet_bytes: sim.packet_bytes,
                queue_capacity: sim.queue,
                p: sim.p,
                seed,
            };
            let r = run_sim(&f.topology, &flow_list, &params)?;
            let kind = f.meta.get("kind").and_then(|v| v.as_str()).unwrap_or("unknown");
            let n = f.topology.node_count();
            let scenario = format!("n{n}_f{flows}");
            write_sim_csv(&out, &[SimRow::new(&scenario, seed, kind, n, flows, &r)])?;
        }
        Cmd::Render { topology, voronoi, out } => {
            let f = load_topology(&topology)?;
            let v = if voronoi {
                let t = Triangulation::build(f.topology.nodes(), seed);
                Some(voronoi_dual(&t, Rect::from_area(f.topology.area()))?)
            } else {
                None
            };
            write_text(Some(&out), &render_svg(&f.topology, v.as_ref()))?;
        }
        Cmd::Pipeline { config, out_dir } => {
            let mut cfg = match &config {
                Some(p) => ExperimentConfig::load(p)?,
                None => ExperimentConfig::default(),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let result = run_pipeline(&cfg).context("pipeline")?;
            write_outputs(&result, &out_dir)?;
            if let Some(total) = result.summary.last() {
                eprintln!(
                    "dt_sd vs dt: degree -{:.1}%, range -{:.1}%, interference -{:.1}%",
                    total.degree_reduction_pct, total.range_reduction_pct, total.interference_reduction_pct
                );
            }
        }
        Cmd::Strategies => {
            for t in topology_strategies().iter() {
                println!("topology     {:<12} {}", t.name(), t.description());
            }
            for d in crossing_detectors().iter() {
                println!("crossings    {:<12} {}", d.name(), d.description());
            }
            for m in interference_models().iter() {
                println!("interference {:<12} {}", m.name(), m.description());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
