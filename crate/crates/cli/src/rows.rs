use std::path::Path;

use meshtopo_core::interference::{summarize, InterferenceModel};
use meshtopo_core::sweep::count_crossings;
use meshtopo_core::topology::Topology;
use meshtopo_sim::SimReport;
use serde::{Deserialize, Serialize};

use crate::error::{write, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub kind: String,
    pub n: usize,
    pub seed: u64,
    pub total_degree: usize,
    pub avg_degree: f64,
    pub avg_range_m: f64,
    pub avg_interference_rate: f64,
    pub crossings: usize,
}

impl MetricsRow {
    pub fn measure(kind: &str, seed: u64, topo: &Topology, model: &dyn InterferenceModel) -> Self {
        let s = summarize(topo, model);
        MetricsRow {
            kind: kind.to_string(),
            n: s.nodes,
            seed,
            total_degree: s.total_degree,
            avg_degree: s.avg_degree,
            avg_range_m: s.avg_range_m,
            avg_interference_rate: s.avg_interference_rate,
            crossings: count_crossings(topo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub scenario: String,
    pub seed: u64,
    pub topology_kind: String,
    pub n_nodes: usize,
    pub n_flows: usize,
    pub throughput_bps: f64,
    pub loss_rate: f64,
    pub mean_delay_s: f64,
}

impl SimRow {
    pub fn new(scenario: &str, seed: u64, kind: &str, n_nodes: usize, n_flows: usize, r: &SimReport) -> Self {
        SimRow {
            scenario: scenario.to_string(),
            seed,
            topology_kind: kind.to_string(),
            n_nodes,
            n_flows,
            throughput_bps: r.throughput_bps,
            loss_rate: r.loss_rate,
            mean_delay_s: r.mean_delay_s,
        }
    }
}

/// Per node count means for the unpruned and pruned Delaunay topologies,
/// with percentage reductions of the pruned ones. The final row, labelled
/// `mean`, averages the per-count reductions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: String,
    pub topologies: usize,
    pub dt_avg_degree: f64,
    pub dt_sd_avg_degree: f64,
    pub degree_reduction_pct: f64,
    pub dt_avg_range_m: f64,
    pub dt_sd_avg_range_m: f64,
    pub range_reduction_pct: f64,
    pub dt_avg_interference_rate: f64,
    pub dt_sd_avg_interference_rate: f64,
    pub interference_reduction_pct: f64,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        0.0
    } else {
        s / c as f64
    }
}

fn reduction(before: f64, after: f64) -> f64 {
    if before == 0.0 {
        0.0
    } else {
        100.0 * (1.0 - after / before)
    }
}

pub fn summarize_metrics(rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut counts: Vec<usize> = rows.iter().map(|r| r.n).collect();
    counts.sort_unstable();
    counts.dedup();
    let mut out: Vec<SummaryRow> = counts
        .iter()
        .map(|&n| {
            let pick = |kind: &'static str| rows.iter().filter(move |r| r.n == n && r.kind == kind);
            let m = |kind: &'static str, f: fn(&MetricsRow) -> f64| mean(pick(kind).map(f));
            let (dd, sd) = (m("dt", |r| r.avg_degree), m("dt_sd", |r| r.avg_degree));
            let (dr, sr) = (m("dt", |r| r.avg_range_m), m("dt_sd", |r| r.avg_range_m));
            let (di, si) = (m("dt", |r| r.avg_interference_rate), m("dt_sd", |r| r.avg_interference_rate));
            SummaryRow {
                n: n.to_string(),
                topologies: pick("dt").count(),
                dt_avg_degree: dd,
                dt_sd_avg_degree: sd,
                degree_reduction_pct: reduction(dd, sd),
                dt_avg_range_m: dr,
                dt_sd_avg_range_m: sr,
                range_reduction_pct: reduction(dr, sr),
                dt_avg_interference_rate: di,
                dt_sd_avg_interference_rate: si,
                interference_reduction_pct: reduction(di, si),
            }
        })
        .collect();
    if !out.is_empty() {
        let avg = |f: fn(&SummaryRow) -> f64| mean(out.iter().map(f));
        let total = SummaryRow {
            n: "mean".into(),
            topologies: out.iter().map(|r| r.topologies).sum(),
            dt_avg_degree: avg(|r| r.dt_avg_degree),
            dt_sd_avg_degree: avg(|r| r.dt_sd_avg_degree),
            degree_reduction_pct: avg(|r| r.degree_reduction_pct),
            dt_avg_range_m: avg(|r| r.dt_avg_range_m),
            dt_sd_avg_range_m: avg(|r| r.dt_sd_avg_range_m),
            range_reduction_pct: avg(|r| r.range_reduction_pct),
            dt_avg_interference_rate: avg(|r| r.dt_avg_interference_rate),
            dt_sd_avg_interference_rate: avg(|r| r.dt_sd_avg_interference_rate),
            interference_reduction_pct: avg(|r| r.interference_reduction_pct),
        };
        out.push(total);
    }
    out
}

pub fn csv_string<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub const METRICS_HEADER: [&str; 8] =
    ["kind", "n", "seed", "total_degree", "avg_degree", "avg_range_m", "avg_interference_rate", "crossings"];
pub const SIM_HEADER: [&str; 8] =
    ["scenario", "seed", "topology_kind", "n_nodes", "n_flows", "throughput_bps", "loss_rate", "mean_delay_s"];
pub const SUMMARY_HEADER: [&str; 11] = [
    "n",
    "topologies",
    "dt_avg_degree",
    "dt_sd_avg_degree",
    "degree_reduction_pct",
    "dt_avg_range_m",
    "dt_sd_avg_range_m",
    "range_reduction_pct",
    "dt_avg_interference_rate",
    "dt_sd_avg_interference_rate",
    "interference_reduction_pct",
];

pub fn write_metrics_csv(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    write("write metrics csv", path, csv_string(rows, &METRICS_HEADER)?.as_bytes())
}

pub fn write_sim_csv(path: &Path, rows: &[SimRow]) -> Result<()> {
    write("write sim csv", path, csv_string(rows, &SIM_HEADER)?.as_bytes())
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write("write summary csv", path, csv_string(rows, &SUMMARY_HEADER)?.as_bytes())
}
