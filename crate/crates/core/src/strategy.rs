//! Forwarding strategies.
//!
//! [`StrategyKind::Asf`] keeps a smoothed RTT per next hop, splits the next
//! hops of a route entry into three groups (measured, unmeasured, timing
//! out), forwards on the best member of the first non-empty group, and
//! periodically probes an alternative so it can move to a better path when
//! conditions change. [`StrategyKind::BestRoute`] always uses the highest
//! ranked next hop.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forwarder::{FaceId, NextHopStat};
use crate::time::SimTime;

/// RTT variance gain, as in TCP.
const RTTVAR_BETA: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsfParams {
    /// Upper bound of the uniform delay before an entry's first probe, seconds.
    pub t1_max_s: f64,
    /// Period between later probes, seconds.
    pub t2_s: f64,
    /// EWMA weight of a new RTT sample.
    pub srtt_alpha: f64,
    /// Skip probing when the entry has a single next hop and nothing
    /// unmeasured to learn about.
    pub skip_single_hop_probe: bool,
}

impl Default for AsfParams {
    fn default() -> Self {
        Self {
            t1_max_s: 5.0,
            t2_s: 60.0,
            srtt_alpha: 0.125,
            skip_single_hop_probe: true,
        }
    }
}

impl AsfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t1_max_s > 0.0 && self.t1_max_s.is_finite()) {
            return Err(Error::InvalidScenario("asf t1_max_s must be positive".into()));
        }
        if !(self.t2_s > 0.0 && self.t2_s.is_finite()) {
            return Err(Error::InvalidScenario("asf t2_s must be positive".into()));
        }
        if !(self.srtt_alpha > 0.0 && self.srtt_alpha <= 1.0) {
            return Err(Error::InvalidScenario("asf srtt_alpha must be in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    Asf(AsfParams),
    BestRoute,
}

impl StrategyKind {
    pub fn probes(&self) -> bool {
        matches!(self, StrategyKind::Asf(_))
    }

    /// Picks the outgoing face for a regular Interest. `hops` must already
    /// exclude faces known to be down.
    pub fn select(&self, hops: &[NextHopStat], arrival: FaceId) -> Result<FaceId> {
        match self {
            StrategyKind::Asf(_) => select_forwarding_face(hops, arrival),
            StrategyKind::BestRoute => best_route_select(hops, arrival),
        }
    }
}

/// Folds one RTT sample (milliseconds) into a next hop's estimate. The first
/// sample initializes the estimate; later ones are blended with weight
/// `alpha`. A sample also clears the timeout flag.
pub fn update_srtt(stat: &mut NextHopStat, sample_ms: f64, now: SimTime, alpha: f64) {
    match stat.srtt {
        None => {
            stat.srtt = Some(sample_ms);
            stat.rtt_var = Some(sample_ms / 2.0);
        }
        Some(srtt) => {
            let var = stat.rtt_var.unwrap_or(sample_ms / 2.0);
            stat.rtt_var = Some((1.0 - RTTVAR_BETA) * var + RTTVAR_BETA * (srtt - sample_ms).abs());
            stat.srtt = Some((1.0 - alpha) * srtt + alpha * sample_ms);
        }
    }
    stat.timed_out = false;
    stat.last_sample = Some(now);
}

pub fn mark_timeout(stat: &mut NextHopStat) {
    stat.timed_out = true;
}

/// Next hops split into measured (group 1), unmeasured (group 2) and timing
/// out (group 3) faces, each in preference order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupedHops {
    pub group1: Vec<FaceId>,
    pub group2: Vec<FaceId>,
    pub group3: Vec<FaceId>,
}

pub fn classify(hops: &[NextHopStat]) -> GroupedHops {
    let mut g1: Vec<&NextHopStat> = Vec::new();
    let mut g2: Vec<&NextHopStat> = Vec::new();
    let mut g3: Vec<&NextHopStat> = Vec::new();
    for h in hops {
        if h.timed_out {
            g3.push(h);
        } else if h.srtt.is_some() {
            g1.push(h);
        } else {
            g2.push(h);
        }
    }
    g1.sort_by(|a, b| {
        a.srtt
            .unwrap()
            .total_cmp(&b.srtt.unwrap())
            .then(a.face.cmp(&b.face))
    });
    let by_cost = |a: &&NextHopStat, b: &&NextHopStat| {
        a.routing_cost
            .total_cmp(&b.routing_cost)
            .then(a.face.cmp(&b.face))
    };
    g2.sort_by(by_cost);
    g3.sort_by(by_cost);
    let faces = |v: Vec<&NextHopStat>| v.into_iter().map(|h| h.face).collect();
    GroupedHops {
        group1: faces(g1),
        group2: faces(g2),
        group3: faces(g3),
    }
}

/// Lowest SRTT among measured faces, else the cheapest unmeasured face, else
/// the cheapest timing-out face. The arrival face is never chosen.
pub fn select_forwarding_face(hops: &[NextHopStat], arrival: FaceId) -> Result<FaceId> {
    let usable: Vec<NextHopStat> = hops.iter().filter(|h| h.face != arrival).cloned().collect();
    let g = classify(&usable);
    g.group1
        .first()
        .or(g.group2.first())
        .or(g.group3.first())
        .copied()
        .ok_or(Error::NoRoute)
}

/// Highest ranked next hop other than the arrival face.
pub fn best_route_select(hops: &[NextHopStat], arrival: FaceId) -> Result<FaceId> {
    hops.iter()
        .map(|h| h.face)
        .find(|&f| f != arrival)
        .ok_or(Error::NoRoute)
}

/// Integer probing weights for `count` ranked candidates, best first, and
/// their sum: rank `i` has weight `count + 1 - i` out of `count (count + 1) / 2`.
pub fn probe_weights(count: usize) -> (Vec<u64>, u64) {
    let n = count as u64;
    ((1..=n).map(|i| n + 1 - i).collect(), n * (n + 1) / 2)
}

/// Probability of probing the candidate at 1-based `rank` out of `count`:
/// `2 (count + 1 - rank) / (count (count + 1))`.
pub fn probe_probability(rank: usize, count: usize) -> Result<f64> {
    if rank == 0 || rank > count {
        return Err(Error::RankOutOfRange { rank, count });
    }
    let n = count as f64;
    Ok(2.0 * (n + 1.0 - rank as f64) / (n * (n + 1.0)))
}

/// Draws a 1-based rank with the probabilities of [`probe_probability`],
/// using the integer weights of [`probe_weights`] so the distribution is
/// exact.
pub fn sample_rank<R: Rng + ?Sized>(count: usize, rng: &mut R) -> usize {
    debug_assert!(count >= 1);
    let (weights, total) = probe_weights(count);
    let mut k = rng.gen_range(0..total);
    for (i, w) in weights.into_iter().enumerate() {
        if k < w {
            return i + 1;
        }
        k -= w;
    }
    unreachable!("weights sum to total")
}

/// Chooses the face to probe: the cheapest unmeasured face if any, otherwise
/// a draw over measured faces (by SRTT) followed by timing-out faces (by
/// routing cost), weighted toward the front of that list.
///
/// With `skip_single` set, an entry whose only next hop is already measured
/// or timing out is not probed.
pub fn choose_probe_face<R: Rng + ?Sized>(
    hops: &[NextHopStat],
    skip_single: bool,
    rng: &mut R,
) -> Option<FaceId> {
    let g = classify(hops);
    if let Some(&f) = g.group2.first() {
        return Some(f);
    }
    if skip_single && hops.len() < 2 {
        return None;
    }
    let ranked: Vec<FaceId> = g.group1.into_iter().chain(g.group3).collect();
    if ranked.is_empty() {
        return None;
    }
    Some(ranked[sample_rank(ranked.len(), rng) - 1])
}

/// Time of a new entry's first probe: uniform in `[now, now + t1_max]`.
pub fn first_probe_time<R: Rng + ?Sized>(now: SimTime, params: &AsfParams, rng: &mut R) -> SimTime {
    let t1 = SimTime::from_secs_f64(params.t1_max_s).as_micros();
    now + SimTime(rng.gen_range(0..=t1))
}

pub fn next_probe_time(now: SimTime, params: &AsfParams) -> SimTime {
    now + SimTime::from_secs_f64(params.t2_s)
}
