//! Routing providers fill Route Cache entries with ranked next hops.

pub mod hyperbolic;
pub mod linkstate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::forwarder::{FaceId, RouteKey};

pub use hyperbolic::{compute_hr_nexthops, HrProvider};
pub use linkstate::{
    compute_ls_nexthops, LinkStateModel, LsGraph, LsMessage, LsProvider, LsRouteCache, Lsa, LsaBody, LsaKey,
    LsaKind, LsdbView, Outgoing,
};

/// Upper bound on next hops kept per route entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultipathFactor {
    Limited(usize),
    All,
}

impl MultipathFactor {
    pub fn limit(self) -> usize {
        match self {
            MultipathFactor::Limited(n) => n,
            MultipathFactor::All => usize::MAX,
        }
    }
}

impl fmt::Display for MultipathFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultipathFactor::Limited(n) => write!(f, "{n}"),
            MultipathFactor::All => f.write_str("all"),
        }
    }
}

impl FromStr for MultipathFactor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(MultipathFactor::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(MultipathFactor::Limited(n)),
            _ => Err(format!("multi-path factor must be a positive integer or \"all\", got {s:?}")),
        }
    }
}

impl Serialize for MultipathFactor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MultipathFactor::Limited(n) => s.serialize_u64(*n as u64),
            MultipathFactor::All => s.serialize_str("all"),
        }
    }
}

impl<'de> Deserialize<'de> for MultipathFactor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => MultipathFactor::from_str(&n.to_string()),
            Raw::Text(s) => MultipathFactor::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Source of next-hop rankings for one node.
pub trait RouteProvider {
    /// Changes whenever rankings computed earlier may be stale.
    fn revision(&self) -> u64;

    /// Ranked `(face, routing cost)` pairs toward `key`, restricted to faces
    /// for which `live` holds and truncated to the multi-path factor. Empty
    /// when the destination is unreachable.
    fn next_hops(&mut self, key: &RouteKey, live: &dyn Fn(FaceId) -> bool) -> Vec<(FaceId, f64)>;
}
