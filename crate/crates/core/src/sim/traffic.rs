//! Ping traffic: which prefixes each node pings and when each flow starts.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::time::SimTime;
use crate::topology::{NodeId, Topology};

pub(crate) const TRAFFIC_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub origin: NodeId,
    pub target: NodeId,
    /// Time of the first ping; later pings follow at the ping interval.
    pub first_send: SimTime,
}

/// Number of prefixes each node pings: `alpha (N - 1)` rounded.
pub fn targets_per_node(node_count: usize, alpha: f64) -> usize {
    (alpha * node_count.saturating_sub(1) as f64).round() as usize
}

/// Draws each node's target set uniformly without replacement, in node id
/// order, then a start offset for every flow. Depends only on the topology,
/// `alpha`, the timing and `seed`, so runs that differ in routing or strategy
/// share the schedule.
pub fn build_ping_traffic(
    t: &Topology,
    alpha: f64,
    seed: u64,
    start: SimTime,
    spread: SimTime,
) -> Result<Vec<Flow>> {
    let n = t.node_count();
    let k = targets_per_node(n, alpha);
    if k < 1 {
        return Err(Error::InvalidScenario(format!(
            "alpha {alpha} gives no ping targets on {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TRAFFIC_STREAM);
    let ids: Vec<NodeId> = t.nodes().iter().map(|r| r.id).collect();
    let mut flows = Vec::with_capacity(n * k);
    for (i, &origin) in ids.iter().enumerate() {
        let others: Vec<NodeId> = ids
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &id)| id)
            .collect();
        let mut picks: Vec<usize> = index::sample(&mut rng, others.len(), k).into_vec();
        picks.sort_unstable();
        for p in picks {
            flows.push(Flow {
                origin,
                target: others[p],
                first_send: start,
            });
        }
    }
    if spread > SimTime::ZERO {
        for f in &mut flows {
            f.first_send = start + SimTime(rng.gen_range(0..spread.as_micros()));
        }
    }
    Ok(flows)
}
