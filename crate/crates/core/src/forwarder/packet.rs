use std::fmt;
use std::sync::Arc;

use crate::geometry::HyperbolicCoordinate;
use crate::time::SimTime;
use crate::topology::NodeId;

/// Identifies a face on a node. Network faces use the neighbor's node id;
/// [`FaceId::LOCAL`] is the node's own applications (consumer, producer and
/// the strategy's probe generator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId(pub u32);

impl FaceId {
    pub const LOCAL: FaceId = FaceId(u32::MAX);

    pub fn neighbor(id: NodeId) -> Self {
        FaceId(id)
    }

    pub fn is_local(self) -> bool {
        self == Self::LOCAL
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_local() {
            f.write_str("local")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// A hierarchical name such as `/n7/ping/3/12`. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: impl Into<Arc<str>>) -> Self {
        Name(s.into())
    }

    /// `/<prefix>/ping/<origin>/<seq>`
    pub fn ping(prefix: &str, origin: NodeId, seq: u32) -> Self {
        Name::new(format!("/{prefix}/ping/{origin}/{seq}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The routable prefix label: the first name component.
    pub fn first_component(&self) -> &str {
        self.0
            .trim_start_matches('/')
            .split('/')
            .next()
            .unwrap_or("")
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interest {
    pub name: Name,
    /// Destination coordinate under hyperbolic routing; absent under
    /// link-state routing.
    pub dest_coord: Option<HyperbolicCoordinate>,
    pub nonce: u64,
    pub lifetime: SimTime,
    pub is_probe: bool,
    /// Node that issued this transmission intent (logging only).
    pub origin: NodeId,
    pub send_time: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Data {
    pub name: Name,
    pub producer: NodeId,
    pub payload_size: u32,
    /// How long a cached copy may satisfy later Interests.
    pub freshness: SimTime,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ping_names() {
        let n = Name::ping("n7", 3, 12);
        assert_eq!(n.as_str(), "/n7/ping/3/12");
        assert_eq!(n.first_component(), "n7");
        assert_eq!(Name::new("").first_component(), "");
        assert_eq!(FaceId::LOCAL.to_string(), "local");
    }
}
