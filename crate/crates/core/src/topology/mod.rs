//! Embedded network topologies: nodes carry a hyperbolic coordinate and an
//! optional geographic position, links carry a propagation delay and a
//! routing cost.

mod generate;
mod io;
mod transform;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HyperbolicCoordinate;

pub use generate::{generate_hyperbolic_graph, GeneratorParams};
pub use io::{load_topology, save_topology, topology_from_json, topology_to_json};
pub use transform::{
    assign_geo_delays, haversine_km, perturb_duplicate_coordinates, rescale_topology,
    DEFAULT_KM_PER_MS, DEFAULT_MIN_DELAY_MS,
};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub prefix: String,
    pub coord: HyperbolicCoordinate,
    pub geo: Option<GeoPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkRecord {
    pub a: NodeId,
    pub b: NodeId,
    pub delay_ms: f64,
    pub cost: f64,
}

impl LinkRecord {
    /// Endpoints with the smaller id first.
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.a.min(self.b), self.a.max(self.b))
    }

    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

/// An undirected, simple graph. Nodes are kept sorted by id and links by
/// their endpoint pair, so two topologies with the same content compare
/// and serialize identically.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<NodeRecord>,
    links: Vec<LinkRecord>,
    index: BTreeMap<NodeId, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl Topology {
    pub fn new(mut nodes: Vec<NodeRecord>, mut links: Vec<LinkRecord>) -> Result<Self> {
        nodes.sort_by_key(|n| n.id);
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(Error::DuplicateNode(n.id));
            }
            if n.prefix.is_empty() || n.prefix.contains('/') || n.prefix.contains(char::is_whitespace) {
                return Err(Error::InvalidTopology(format!(
                    "node {} has an invalid prefix {:?}",
                    n.id, n.prefix
                )));
            }
        }
        let mut prefixes = BTreeSet::new();
        for n in &nodes {
            if !prefixes.insert(n.prefix.as_str()) {
                return Err(Error::InvalidTopology(format!(
                    "prefix {} advertised by more than one node",
                    n.prefix
                )));
            }
        }

        for l in links.iter_mut() {
            if l.a == l.b {
                return Err(Error::InvalidTopology(format!("self-loop on node {}", l.a)));
            }
            for end in [l.a, l.b] {
                if !index.contains_key(&end) {
                    return Err(Error::InvalidTopology(format!(
                        "link references unknown node {end}"
                    )));
                }
            }
            if !(l.delay_ms.is_finite() && l.delay_ms > 0.0) {
                return Err(Error::InvalidTopology(format!(
                    "link {}-{} has non-positive delay",
                    l.a, l.b
                )));
            }
            if !(l.cost.is_finite() && l.cost > 0.0) {
                return Err(Error::InvalidTopology(format!(
                    "link {}-{} has non-positive cost",
                    l.a, l.b
                )));
            }
            let (a, b) = l.endpoints();
            l.a = a;
            l.b = b;
        }
        links.sort_by_key(|l| (l.a, l.b));
        for w in links.windows(2) {
            if (w[0].a, w[0].b) == (w[1].a, w[1].b) {
                return Err(Error::InvalidTopology(format!(
                    "duplicate link {}-{}",
                    w[0].a, w[0].b
                )));
            }
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (li, l) in links.iter().enumerate() {
            adjacency[index[&l.a]].push(li);
            adjacency[index[&l.b]].push(li);
        }
        Ok(Self {
            nodes,
            links,
            index,
            adjacency,
        })
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn links(&self) -> &[LinkRecord] {
        &self.links
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Position of a node in [`Topology::nodes`].
    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeRecord> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    /// Indices into [`Topology::links`] of the links incident to the node at
    /// position `idx`.
    pub fn incident_links(&self, idx: usize) -> &[usize] {
        &self.adjacency[idx]
    }

    /// Neighbor ids of `id`, ascending.
    pub fn neighbors(&self, id: NodeId) -> Vec<NodeId> {
        let Some(i) = self.index_of(id) else {
            return Vec::new();
        };
        let mut out: Vec<NodeId> = self.adjacency[i]
            .iter()
            .map(|&li| self.links[li].other(id))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.index_of(id).map_or(0, |i| self.adjacency[i].len())
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.links
            .binary_search_by_key(&key, |l| (l.a, l.b))
            .ok()
    }

    pub fn average_degree(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        2.0 * self.links.len() as f64 / self.nodes.len() as f64
    }

    /// Connected components as sorted id lists, largest first (ties by
    /// smallest member id).
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut comps = Vec::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![self.nodes[start].id];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let uid = self.nodes[u].id;
                for &li in &self.adjacency[u] {
                    let v = self.index[&self.links[li].other(uid)];
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(self.nodes[v].id);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.len() <= 1 || self.components().len() == 1
    }

    pub fn ensure_connected(&self) -> Result<()> {
        let comps = self.components();
        if comps.len() > 1 {
            return Err(Error::Disconnected {
                components: comps.len(),
            });
        }
        Ok(())
    }

    /// Subgraph induced on `keep`.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> Topology {
        let nodes = self
            .nodes
            .iter()
            .filter(|n| keep.contains(&n.id))
            .cloned()
            .collect();
        let links = self
            .links
            .iter()
            .filter(|l| keep.contains(&l.a) && keep.contains(&l.b))
            .cloned()
            .collect();
        Topology::new(nodes, links).expect("subgraph of a valid topology is valid")
    }

    pub fn largest_component(&self) -> Topology {
        match self.components().into_iter().next() {
            Some(c) => self.induced(&c.into_iter().collect()),
            None => self.clone(),
        }
    }

    /// The `count` highest-degree node ids, ties by ascending id.
    pub fn highest_degree(&self, count: usize) -> Vec<NodeId> {
        let mut ids: Vec<(usize, NodeId)> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (self.adjacency[i].len(), n.id))
            .collect();
        ids.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        ids.into_iter().take(count).map(|(_, id)| id).collect()
    }

    pub fn with_links(&self, links: Vec<LinkRecord>) -> Result<Topology> {
        Topology::new(self.nodes.clone(), links)
    }

    pub fn with_nodes(&self, nodes: Vec<NodeRecord>) -> Result<Topology> {
        Topology::new(nodes, self.links.clone())
    }
}


#[cfg(test)]
mod tests {
    use super::test_util::*;
    use super::*;

    fn line(n: u32) -> Topology {
        let nodes = (0..n).map(|i| node(i, 1.0, i as f64)).collect();
        let links = (1..n).map(|i| link(i - 1, i, 1.0)).collect();
        Topology::new(nodes, links).unwrap()
    }

    #[test]
    fn rejects_invariant_violations() {
        let n = vec![node(0, 1.0, 0.0), node(1, 1.0, 1.0)];
        assert!(Topology::new(n.clone(), vec![link(0, 0, 1.0)]).is_err());
        assert!(Topology::new(n.clone(), vec![link(0, 1, 1.0), link(1, 0, 2.0)]).is_err());
        assert!(Topology::new(n.clone(), vec![link(0, 1, 0.0)]).is_err());
        assert!(Topology::new(n.clone(), vec![link(0, 7, 1.0)]).is_err());
        let dup = vec![node(3, 1.0, 0.0), node(3, 2.0, 1.0)];
        assert!(matches!(
            Topology::new(dup, vec![]),
            Err(Error::DuplicateNode(3))
        ));
    }

    #[test]
    fn degree_and_components() {
        let t = line(4);
        assert_eq!(t.average_degree(), 1.5);
        assert_eq!(t.neighbors(1), vec![0, 2]);
        assert!(t.is_connected());
        let cut = t.with_links(vec![link(0, 1, 1.0), link(2, 3, 1.0)]).unwrap();
        assert_eq!(cut.components(), vec![vec![0, 1], vec![2, 3]]);
        assert!(matches!(
            cut.ensure_connected(),
            Err(Error::Disconnected { components: 2 })
        ));
        assert_eq!(cut.largest_component().node_count(), 2);
    }

    #[test]
    fn highest_degree_ties_by_id() {
        let t = line(5);
        assert_eq!(t.highest_degree(3), vec![1, 2, 3]);
        assert_eq!(t.highest_degree(0), Vec::<NodeId>::new());
    }
}
