//! Checks on the shipped topologies and suite manifests.

use std::path::{Path, PathBuf};

use hypersim::suite::SuiteManifest;
use hypersim::topology::{generate_hyperbolic_graph, load_topology, save_topology, topology_to_json, GeneratorParams};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// The shipped topologies are regenerated exactly from their parameters.
#[test]
fn shipped_topologies_match_the_generator() {
    let cases = [
        ("gen22", 22, 4.55, 50),
        ("gen41", 41, 7.56, 155),
        ("gen58", 58, 8.66, 251),
        ("gen78", 78, 8.85, 345),
        ("gen99", 99, 8.93, 442),
    ];
    for (name, nodes, degree, links) in cases {
        let shipped = load_topology(&data_dir().join(format!("topologies/{name}.json")), true).unwrap();
        let fresh = generate_hyperbolic_graph(&GeneratorParams::new(nodes, degree, 7)).unwrap();
        assert_eq!(shipped.node_count(), nodes, "{name}");
        assert_eq!(shipped.link_count(), links, "{name}");
        assert_eq!(topology_to_json(&shipped), topology_to_json(&fresh), "{name}");
    }
}

#[test]
fn topology_files_round_trip() {
    let t = generate_hyperbolic_graph(&GeneratorParams::new(30, 6.0, 3)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    save_topology(&t, &path).unwrap();
    let back = load_topology(&path, true).unwrap();
    assert_eq!(back, t);
}

#[test]
fn manifests_expand() {
    let suites = data_dir().join("suites");
    let count = |name: &str| SuiteManifest::load(&suites.join(name)).unwrap().members().unwrap().len();
    assert_eq!(count("no_failure.toml"), 6);
    assert_eq!(count("traffic_profile.toml"), 8);
    assert_eq!(count("sequential_failure.toml"), 2);
    assert_eq!(count("scaling.toml"), 10);
}
