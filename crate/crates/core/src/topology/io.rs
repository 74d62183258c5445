use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GeoPoint, LinkRecord, NodeId, NodeRecord, Topology};
use crate::error::{Error, Result};
use crate::geometry::HyperbolicCoordinate;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    nodes: Vec<NodeEntry>,
    links: Vec<LinkEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: NodeId,
    prefix: String,
    r: f64,
    theta: f64,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkEntry {
    a: NodeId,
    b: NodeId,
    delay_ms: f64,
    cost: f64,
}

pub fn topology_to_json(t: &Topology) -> String {
    let file = TopologyFile {
        nodes: t
            .nodes()
            .iter()
            .map(|n| NodeEntry {
                id: n.id,
                prefix: n.prefix.clone(),
                r: n.coord.r(),
                theta: n.coord.theta(),
                lat: n.geo.map(|g| g.lat),
                lon: n.geo.map(|g| g.lon),
            })
            .collect(),
        links: t
            .links()
            .iter()
            .map(|l| LinkEntry {
                a: l.a,
                b: l.b,
                delay_ms: l.delay_ms,
                cost: l.cost,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("topology serializes");
    s.push('\n');
    s
}

pub fn topology_from_json(text: &str) -> std::result::Result<Topology, String> {
    let file: TopologyFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut nodes = Vec::with_capacity(file.nodes.len());
    for n in file.nodes {
        let coord = HyperbolicCoordinate::new(n.r, n.theta)
            .ok_or_else(|| format!("node {} has an invalid coordinate", n.id))?;
        let geo = match (n.lat, n.lon) {
            (Some(lat), Some(lon)) => Some(GeoPoint { lat, lon }),
            (None, None) => None,
            _ => return Err(format!("node {} has only one of lat/lon", n.id)),
        };
        nodes.push(NodeRecord {
            id: n.id,
            prefix: n.prefix,
            coord,
            geo,
        });
    }
    let links = file
        .links
        .into_iter()
        .map(|l| LinkRecord {
            a: l.a,
            b: l.b,
            delay_ms: l.delay_ms,
            cost: l.cost,
        })
        .collect();
    Topology::new(nodes, links).map_err(|e| e.to_string())
}

/// Reads a topology file. With `require_connected` a disconnected graph is
/// rejected.
pub fn load_topology(path: &Path, require_connected: bool) -> Result<Topology> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let t = topology_from_json(&text).map_err(|m| Error::parse(path, m))?;
    if require_connected {
        t.ensure_connected()?;
    }
    Ok(t)
}

pub fn save_topology(t: &Topology, path: &Path) -> Result<()> {
    crate::write_atomic(path, topology_to_json(t).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{generate_hyperbolic_graph, GeneratorParams};

    #[test]
    fn save_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let t = generate_hyperbolic_graph(&GeneratorParams::new(20, 4.0, 11)).unwrap();
        save_topology(&t, &path).unwrap();
        assert_eq!(load_topology(&path, true).unwrap(), t);
    }

    #[test]
    fn self_loop_is_rejected() {
        let text = r#"{"nodes":[{"id":0,"prefix":"a","r":1,"theta":0}],
                      "links":[{"a":0,"b":0,"delay_ms":1,"cost":1}]}"#;
        let err = topology_from_json(text).unwrap_err();
        assert!(err.contains("self-loop"), "{err}");
    }

    #[test]
    fn duplicate_id_is_named() {
        let text = r#"{"nodes":[{"id":5,"prefix":"a","r":1,"theta":0},
                                {"id":5,"prefix":"b","r":2,"theta":1}],
                      "links":[]}"#;
        let err = topology_from_json(text).unwrap_err();
        assert!(err.contains("duplicate node id 5"), "{err}");
    }

    #[test]
    fn malformed_and_disconnected() {
        assert!(topology_from_json("{not json").is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        std::fs::write(
            &path,
            r#"{"nodes":[{"id":0,"prefix":"a","r":1,"theta":0},{"id":1,"prefix":"b","r":1,"theta":1}],"links":[]}"#,
        )
        .unwrap();
        assert!(load_topology(&path, false).is_ok());
        assert!(matches!(
            load_topology(&path, true),
            Err(Error::Disconnected { components: 2 })
        ));
    }
}
