use std::collections::BTreeMap;

use crate::time::SimTime;
use crate::topology::NodeId;

use super::log::PingRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct LossRow {
    pub node: NodeId,
    pub sent: u64,
    pub lost: u64,
    pub rate: f64,
}

/// Per-origin fraction of pings that timed out. Pings sent while their
/// target was down (per `down`, half-open intervals) are left out entirely.
pub fn compute_loss_rate(pings: &[PingRecord], down: &[(NodeId, SimTime, SimTime)]) -> Vec<LossRow> {
    let target_down = |p: &PingRecord| {
        down.iter()
            .any(|&(n, from, to)| n == p.target && from <= p.sent && p.sent < to)
    };
    let mut counts: BTreeMap<NodeId, (u64, u64)> = BTreeMap::new();
    for p in pings {
        let c = counts.entry(p.origin).or_default();
        if target_down(p) {
            continue;
        }
        c.0 += 1;
        if p.rtt.is_none() {
            c.1 += 1;
        }
    }
    counts
        .into_iter()
        .map(|(node, (sent, lost))| LossRow {
            node,
            sent,
            lost,
            rate: if sent == 0 { 0.0 } else { lost as f64 / sent as f64 },
        })
        .collect()
}

/// Mean of the per-node rates over nodes that sent at least one counted ping.
pub fn mean_loss_rate(rows: &[LossRow]) -> f64 {
    let counted: Vec<&LossRow> = rows.iter().filter(|r| r.sent > 0).collect();
    if counted.is_empty() {
        return 0.0;
    }
    counted.iter().map(|r| r.rate).sum::<f64>() / counted.len() as f64
}
