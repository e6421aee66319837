use std::collections::VecDeque;

use meshtopo_core::geom::dist2;
use meshtopo_core::interference::Ranges;
use meshtopo_core::rng::MeshRng;
use meshtopo_core::topology::Topology;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::Flow;
use crate::routing::RoutingTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// Seconds per slot; one packet crosses one hop per slot.
    pub slot_s: f64,
    pub duration_s: f64,
    pub packet_bytes: u32,
    /// Per-node FIFO capacity in packets.
    pub queue_capacity: usize,
    /// Transmit probability for a node that senses an idle channel.
    pub p: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            slot_s: 0.008,
            duration_s: 60.0,
            packet_bytes: 1000,
            queue_capacity: 50,
            p: 0.5,
            seed: 1,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.slot_s.is_finite() && self.slot_s > 0.0) {
            return bad("slot_s must be positive");
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return bad("duration_s must be positive");
        }
        if self.packet_bytes == 0 {
            return bad("packet_bytes must be positive");
        }
        if self.queue_capacity == 0 {
            return bad("queue_capacity must be positive");
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad("p must be in (0, 1]");
        }
        Ok(())
    }

    pub fn slots(&self) -> u64 {
        ((self.duration_s / self.slot_s).round() as u64).max(1)
    }

    pub fn packet_bits(&self) -> f64 {
        self.packet_bytes as f64 * 8.0
    }

    /// Bits per second of a single hop.
    pub fn link_rate_bps(&self) -> f64 {
        self.packet_bits() / self.slot_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowStats {
    pub flow: Flow,
    pub injected: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub throughput_bps: f64,
    pub mean_delay_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub slots: u64,
    pub throughput_bps: f64,
    /// Throughput divided by the single-hop link rate.
    pub normalized_throughput: f64,
    pub loss_rate: f64,
    /// Zero when nothing was delivered.
    pub mean_delay_s: f64,
    pub injected: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_queue: u64,
    pub flows: Vec<FlowStats>,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    flow: u32,
    born: u64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    injected: u64,
    delivered: u64,
    dropped: u64,
    delay_slots: u64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Runs the slotted simulation.
///
/// Every slot, in order: each flow whose source queue has room injects one
/// packet (flows are backlogged, so a full source queue just holds the
/// application back; a packet with no route is injected and dropped); nodes
/// with a queued packet contend in a seeded random order, deferring when a
/// node already committed this slot lies within their own range and
/// otherwise committing with probability `p`; each committed head packet
/// crosses its next hop unless the receiver is committed or lies within
/// another committed transmitter's range; arrivals are applied after all
/// departures, dropping on a full queue.
///
/// A packet's delay is `(delivery slot - injection slot + 1) * slot_s`.
pub fn run_sim(topo: &Topology, flows: &[Flow], params: &SimParams) -> Result<SimReport> {
    params.validate()?;
    let n = topo.node_count();
    let mut ends = Vec::with_capacity(flows.len());
    for (i, f) in flows.iter().enumerate() {
        let s = topo.index(f.source).map_err(|e| Error::InvalidFlow(i, e.to_string()))?;
        let d = topo.index(f.destination).map_err(|e| Error::InvalidFlow(i, e.to_string()))?;
        if s == d {
            return Err(Error::InvalidFlow(i, "source equals destination".into()));
        }
        ends.push((s, d));
    }
    let routes = RoutingTable::toward(topo, ends.iter().map(|e| e.1));
    let ranges = Ranges::new(topo);
    let pts: Vec<_> = (0..n).map(|i| topo.point_at(i)).collect();
    let mut rng = MeshRng::new(params.seed);

    let mut queues: Vec<VecDeque<Packet>> = vec![VecDeque::new(); n];
    let mut tally = vec![Tally::default(); flows.len()];
    let mut committed = vec![false; n];
    let mut cover = vec![0u32; n];
    let mut order: Vec<usize> = Vec::new();
    let mut senders: Vec<usize> = Vec::new();
    let mut arrivals: Vec<(usize, Packet)> = Vec::new();
    let slots = params.slots();
    let cap = params.queue_capacity;

    for t in 0..slots {
        for (i, &(s, d)) in ends.iter().enumerate() {
            if queues[s].len() >= cap {
                continue;
            }
            tally[i].injected += 1;
            if routes.next_hop(s, d).is_none() {
                tally[i].dropped += 1;
            } else {
                queues[s].push_back(Packet { flow: i as u32, born: t });
            }
        }

        order.clear();
        order.extend((0..n).filter(|&u| !queues[u].is_empty()));
        rng.shuffle(&mut order);
        senders.clear();
        for &u in &order {
            let r2 = ranges.range2(u);
            let busy = senders.iter().any(|&w| dist2(pts[u], pts[w]) <= r2);
            if !busy && rng.bernoulli(params.p) {
                committed[u] = true;
                senders.push(u);
            }
        }
        for &w in &senders {
            ranges.grid().for_each_within(pts[w], ranges.range2(w), |v| {
                if v != w {
                    cover[v] += 1;
                }
            });
        }

        senders.sort_unstable();
        arrivals.clear();
        for &u in &senders {
            let pkt = queues[u][0];
            let d = ends[pkt.flow as usize].1;
            let v = routes.next_hop(u, d).expect("queued packets are routable");
            // u's own range always reaches its link neighbour v.
            if !committed[v] && cover[v] == 1 {
                queues[u].pop_front();
                arrivals.push((v, pkt));
            }
        }
        for &(v, pkt) in &arrivals {
            let f = pkt.flow as usize;
            if v == ends[f].1 {
                tally[f].delivered += 1;
                tally[f].delay_slots += t - pkt.born + 1;
            } else if queues[v].len() >= cap {
                tally[f].dropped += 1;
            } else {
                queues[v].push_back(pkt);
            }
        }

        for &w in &senders {
            committed[w] = false;
            ranges.grid().for_each_within(pts[w], ranges.range2(w), |v| cover[v] = 0);
        }
    }

    let duration = slots as f64 * params.slot_s;
    let bits = params.packet_bits();
    let flow_stats: Vec<FlowStats> = flows
        .iter()
        .zip(&tally)
        .map(|(&flow, t)| FlowStats {
            flow,
            injected: t.injected,
            delivered: t.delivered,
            dropped: t.dropped,
            throughput_bps: t.delivered as f64 * bits / duration,
            mean_delay_s: ratio(t.delay_slots as f64, t.delivered as f64) * params.slot_s,
        })
        .collect();
    let injected: u64 = tally.iter().map(|t| t.injected).sum();
    let delivered: u64 = tally.iter().map(|t| t.delivered).sum();
    let dropped: u64 = tally.iter().map(|t| t.dropped).sum();
    let delay_slots: u64 = tally.iter().map(|t| t.delay_slots).sum();
    let throughput_bps = delivered as f64 * bits / duration;
    Ok(SimReport {
        slots,
        throughput_bps,
        normalized_throughput: throughput_bps / params.link_rate_bps(),
        loss_rate: ratio(dropped as f64, injected as f64),
        mean_delay_s: ratio(delay_slots as f64, delivered as f64) * params.slot_s,
        injected,
        delivered,
        dropped,
        in_queue: queues.iter().map(|q| q.len() as u64).sum(),
        flows: flow_stats,
    })
}
