use std::fmt;

use super::packet::{FaceId, Name};
use crate::geometry::HyperbolicCoordinate;
use crate::time::SimTime;

/// Route Cache key: a destination coordinate under hyperbolic routing, a
/// name prefix under link-state routing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RouteKey {
    Coord(HyperbolicCoordinate),
    Prefix(String),
}

impl fmt::Display for RouteKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RouteKey::Coord(c) => write!(f, "({}, {})", c.r(), c.theta()),
            RouteKey::Prefix(p) => write!(f, "/{p}"),
        }
    }
}

/// Per-face measurement state inside a route entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NextHopStat {
    pub face: FaceId,
    /// Link-state path cost or hyperbolic distance to the destination.
    pub routing_cost: f64,
    /// Smoothed RTT, milliseconds.
    pub srtt: Option<f64>,
    pub rtt_var: Option<f64>,
    pub timed_out: bool,
    pub last_sample: Option<SimTime>,
}

impl NextHopStat {
    pub fn new(face: FaceId, routing_cost: f64) -> Self {
        Self {
            face,
            routing_cost,
            srtt: None,
            rtt_var: None,
            timed_out: false,
            last_sample: None,
        }
    }
}

/// What the probe generator needs to re-issue the most recent Interest.
#[derive(Debug, Clone, PartialEq)]
pub struct InterestTemplate {
    pub name: Name,
    pub dest_coord: Option<HyperbolicCoordinate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteEntry {
    pub key: RouteKey,
    /// Ranked by the routing provider; never longer than the multi-path
    /// factor.
    pub next_hops: Vec<NextHopStat>,
    /// Most recent non-probe Interest under this key.
    pub last_interest: Option<InterestTemplate>,
    /// A non-probe Interest was seen since the last probe.
    pub active: bool,
    pub probe_at: Option<SimTime>,
    /// Distinguishes this entry from earlier incarnations under the same key
    /// so stale probe timers can be ignored.
    pub epoch: u64,
    /// Routing provider revision the ranking was computed from.
    pub revision: u64,
    pub last_used: SimTime,
}

impl RouteEntry {
    pub fn new(key: RouteKey, ranked: Vec<(FaceId, f64)>, epoch: u64, revision: u64) -> Self {
        Self {
            key,
            next_hops: ranked
                .into_iter()
                .map(|(f, c)| NextHopStat::new(f, c))
                .collect(),
            last_interest: None,
            active: false,
            probe_at: None,
            epoch,
            revision,
            last_used: SimTime::ZERO,
        }
    }

    pub fn stat_mut(&mut self, face: FaceId) -> Option<&mut NextHopStat> {
        self.next_hops.iter_mut().find(|h| h.face == face)
    }

    pub fn stat(&self, face: FaceId) -> Option<&NextHopStat> {
        self.next_hops.iter().find(|h| h.face == face)
    }

    /// Replaces the ranking, carrying measurement state over for faces that
    /// remain.
    pub fn rerank(&mut self, ranked: Vec<(FaceId, f64)>, revision: u64) {
        let old = std::mem::take(&mut self.next_hops);
        self.next_hops = ranked
            .into_iter()
            .map(|(f, c)| match old.iter().find(|h| h.face == f) {
                Some(h) => NextHopStat {
                    routing_cost: c,
                    ..h.clone()
                },
                None => NextHopStat::new(f, c),
            })
            .collect();
        self.revision = revision;
    }
}
