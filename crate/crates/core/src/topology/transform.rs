use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GeoPoint, NodeId, Topology};
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, HyperbolicCoordinate};

/// Signal propagation speed in fiber, km per millisecond.
pub const DEFAULT_KM_PER_MS: f64 = 200.0;
pub const DEFAULT_MIN_DELAY_MS: f64 = 1.0;

const EARTH_RADIUS_KM: f64 = 6371.0;

/// Shrinks an embedded topology: keep the `n_top` highest-degree nodes, keep
/// the `floor(kbar_target * n_top / 2)` hyperbolically shortest links among
/// them, and return the largest connected component.
pub fn rescale_topology(input: &Topology, n_top: usize, kbar_target: f64) -> Result<Topology> {
    if n_top > input.node_count() {
        return Err(Error::InvalidTopology(format!(
            "cannot keep {n_top} of {} nodes",
            input.node_count()
        )));
    }
    let keep: BTreeSet<NodeId> = input.highest_degree(n_top).into_iter().collect();
    let sub = input.induced(&keep);

    let budget = (kbar_target * n_top as f64 / 2.0).floor().max(0.0) as usize;
    let mut ranked: Vec<(f64, usize)> = sub
        .links()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let a = sub.node(l.a).expect("endpoint").coord;
            let b = sub.node(l.b).expect("endpoint").coord;
            (hyperbolic_distance(&a, &b), i)
        })
        .collect();
    // links are already sorted by endpoint pair, so index order is the
    // lexicographic tie-break
    ranked.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let links = ranked
        .iter()
        .take(budget)
        .map(|&(_, i)| sub.links()[i].clone())
        .collect();

    let out = sub.with_links(links)?.largest_component();
    if out.link_count() == 0 {
        return Err(Error::EmptyTopology);
    }
    Ok(out)
}

/// Great-circle distance in kilometers.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dp = p2 - p1;
    let dl = (b.lon - a.lon).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Sets every link's delay from the great-circle distance of its endpoints
/// (floored at `min_delay_ms`) and its cost equal to that delay.
pub fn assign_geo_delays(t: &Topology, km_per_ms: f64, min_delay_ms: f64) -> Result<Topology> {
    if !(km_per_ms > 0.0 && min_delay_ms > 0.0) {
        return Err(Error::InvalidTopology(
            "delay model constants must be positive".into(),
        ));
    }
    let geo = |id: NodeId| -> Result<GeoPoint> {
        t.node(id)
            .and_then(|n| n.geo)
            .ok_or(Error::MissingGeo(id))
    };
    let mut links = Vec::with_capacity(t.link_count());
    for l in t.links() {
        let km = haversine_km(geo(l.a)?, geo(l.b)?);
        let delay = (km / km_per_ms).max(min_delay_ms);
        let mut l = l.clone();
        l.delay_ms = delay;
        l.cost = delay;
        links.push(l);
    }
    t.with_links(links)
}

/// Makes coordinates unique: every node whose coordinate is shared with
/// another node is moved by a seeded offset in `(0, epsilon)` on both `r`
/// and `theta`. Nodes with unique coordinates are untouched.
pub fn perturb_duplicate_coordinates(t: &Topology, epsilon: f64, seed: u64) -> Result<Topology> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidTopology("epsilon must be positive".into()));
    }
    let mut groups: BTreeMap<HyperbolicCoordinate, Vec<usize>> = BTreeMap::new();
    for (i, n) in t.nodes().iter().enumerate() {
        groups.entry(n.coord).or_default().push(i);
    }
    let mut taken: BTreeSet<HyperbolicCoordinate> = groups.keys().copied().collect();
    let mut nodes = t.nodes().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for members in groups.values().filter(|m| m.len() > 1) {
        for &i in members {
            let base = nodes[i].coord;
            let moved = loop {
                let dr = rng.gen_range(f64::MIN_POSITIVE..1.0) * epsilon;
                let dt = rng.gen_range(f64::MIN_POSITIVE..1.0) * epsilon;
                let c = HyperbolicCoordinate::new(base.r() + dr, base.theta() + dt)
                    .expect("finite coordinate");
                if taken.insert(c) {
                    break c;
                }
            };
            nodes[i].coord = moved;
        }
    }
    t.with_nodes(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::test_util::{link, node};
    use crate::topology::{generate_hyperbolic_graph, GeneratorParams};
    use proptest::prelude::*;

    fn geo_node(id: NodeId, lat: f64, lon: f64) -> crate::topology::NodeRecord {
        let mut n = node(id, 1.0, id as f64);
        n.geo = Some(GeoPoint { lat, lon });
        n
    }

    #[test]
    fn coincident_endpoints_get_the_floor() {
        let t = Topology::new(
            vec![geo_node(0, 10.0, 10.0), geo_node(1, 10.0, 10.0)],
            vec![link(0, 1, 5.0)],
        )
        .unwrap();
        let out = assign_geo_delays(&t, 200.0, 1.0).unwrap();
        assert_eq!(out.links()[0].delay_ms, 1.0);
        assert_eq!(out.links()[0].cost, 1.0);
    }

    #[test]
    fn two_thousand_km_is_ten_ms() {
        // along the equator, 2000 km spans 2000 / R radians of longitude
        let dlon = (2000.0 / EARTH_RADIUS_KM).to_degrees();
        let t = Topology::new(
            vec![geo_node(0, 0.0, 0.0), geo_node(1, 0.0, dlon)],
            vec![link(0, 1, 5.0)],
        )
        .unwrap();
        let out = assign_geo_delays(&t, 200.0, 1.0).unwrap();
        assert!((out.links()[0].delay_ms - 10.0).abs() < 1e-9);
    }

    #[test]
    fn missing_geo_names_the_node() {
        let t = Topology::new(
            vec![geo_node(0, 0.0, 0.0), node(4, 1.0, 1.0)],
            vec![link(0, 4, 5.0)],
        )
        .unwrap();
        assert!(matches!(
            assign_geo_delays(&t, 200.0, 1.0),
            Err(Error::MissingGeo(4))
        ));
    }

    /// Chord-length route to the same great-circle distance.
    fn chord_km(a: GeoPoint, b: GeoPoint) -> f64 {
        let v = |p: GeoPoint| {
            let (la, lo) = (p.lat.to_radians(), p.lon.to_radians());
            [la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()]
        };
        let (x, y) = (v(a), v(b));
        let chord = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
        2.0 * EARTH_RADIUS_KM * (chord / 2.0).asin()
    }

    proptest! {
        #[test]
        fn haversine_matches_chord_formula(
            la in -89.0f64..89.0, lo in -180.0f64..180.0,
            lb in -89.0f64..89.0, lob in -180.0f64..180.0,
        ) {
            let a = GeoPoint { lat: la, lon: lo };
            let b = GeoPoint { lat: lb, lon: lob };
            let h = haversine_km(a, b);
            let c = chord_km(a, b);
            prop_assume!(c > 1.0);
            prop_assert!(((h - c) / c).abs() < 1e-6);
        }
    }

    #[test]
    fn rescale_keeps_the_shortest_links() {
        let t = generate_hyperbolic_graph(&GeneratorParams::new(10, 4.0, 5)).unwrap();
        let n = t.node_count();
        let kbar = t.average_degree() * 0.8;
        let out = rescale_topology(&t, n, kbar).unwrap();
        let budget = (kbar * n as f64 / 2.0).floor() as usize;

        // brute force: sort all links by length, cut at the budget
        let len = |a: NodeId, b: NodeId| {
            hyperbolic_distance(&t.node(a).unwrap().coord, &t.node(b).unwrap().coord)
        };
        let mut all: Vec<(f64, NodeId, NodeId)> =
            t.links().iter().map(|l| (len(l.a, l.b), l.a, l.b)).collect();
        all.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let kept: BTreeSet<(NodeId, NodeId)> = all[..budget].iter().map(|x| (x.1, x.2)).collect();
        let expected = t
            .with_links(t.links().iter().filter(|l| kept.contains(&(l.a, l.b))).cloned().collect())
            .unwrap()
            .largest_component();
        assert_eq!(out, expected);
        assert!(out.link_count() <= budget);
        assert!(out.is_connected());
    }

    #[test]
    fn rescale_identity_when_budget_is_ample() {
        let t = generate_hyperbolic_graph(&GeneratorParams::new(12, 4.0, 8)).unwrap();
        let out = rescale_topology(&t, t.node_count(), 100.0).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn rescale_picks_high_degree_nodes() {
        let t = generate_hyperbolic_graph(&GeneratorParams::new(60, 6.0, 2)).unwrap();
        let out = rescale_topology(&t, 20, 5.22).unwrap();
        let top: BTreeSet<NodeId> = t.highest_degree(20).into_iter().collect();
        assert!(out.nodes().iter().all(|n| top.contains(&n.id)));
        assert!(out.link_count() <= (5.22f64 * 20.0 / 2.0).floor() as usize);
        assert!(out.is_connected());
        assert!(rescale_topology(&t, 1000, 5.0).is_err());
        assert!(matches!(rescale_topology(&t, 20, 0.0), Err(Error::EmptyTopology)));
    }

    #[test]
    fn perturb_identity_without_duplicates() {
        let t = Topology::new(vec![node(0, 1.0, 0.0), node(1, 1.0, 1.0)], vec![link(0, 1, 1.0)]).unwrap();
        assert_eq!(perturb_duplicate_coordinates(&t, 0.01, 1).unwrap(), t);
    }

    #[test]
    fn perturb_separates_duplicates() {
        let t = Topology::new(
            vec![node(0, 2.0, 1.0), node(1, 2.0, 1.0), node(2, 2.0, 1.0), node(3, 5.0, 0.5)],
            vec![link(0, 1, 1.0), link(1, 2, 1.0), link(2, 3, 1.0)],
        )
        .unwrap();
        let eps = 1e-3;
        let out = perturb_duplicate_coordinates(&t, eps, 42).unwrap();
        let coords: BTreeSet<HyperbolicCoordinate> = out.nodes().iter().map(|n| n.coord).collect();
        assert_eq!(coords.len(), 4);
        for (before, after) in t.nodes().iter().zip(out.nodes()) {
            let dr = after.coord.r() - before.coord.r();
            let dt = after.coord.theta() - before.coord.theta();
            if before.id == 3 {
                assert_eq!(after.coord, before.coord);
            } else {
                assert!(dr > 0.0 && dr < eps, "dr {dr}");
                assert!(dt > 0.0 && dt < eps, "dt {dt}");
            }
        }
        assert_eq!(out, perturb_duplicate_coordinates(&t, eps, 42).unwrap());
    }
}
