use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    assign_geo_delays, GeoPoint, LinkRecord, NodeId, NodeRecord, Topology, DEFAULT_KM_PER_MS,
    DEFAULT_MIN_DELAY_MS,
};
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, HyperbolicCoordinate};

/// Inputs of the random hyperbolic graph generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub nodes: usize,
    pub avg_degree: f64,
    /// Exponent of the radial density `∝ sinh(radial_exponent · r)`. Smaller
    /// values give heavier-tailed degree distributions.
    #[serde(default = "default_radial_exponent")]
    pub radial_exponent: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_radial_exponent() -> f64 {
    0.75
}

impl GeneratorParams {
    pub fn new(nodes: usize, avg_degree: f64, seed: u64) -> Self {
        Self {
            nodes,
            avg_degree,
            radial_exponent: default_radial_exponent(),
            seed,
        }
    }
}

/// Generates a random hyperbolic graph: nodes on a hyperbolic disk with
/// jittered-uniform angles and exponential radial density, joined when their
/// distance falls under a connection radius. The radius is searched so that
/// the largest connected component, which is what gets returned, has an
/// average degree within 10% of the target.
///
/// Geographic positions follow the angular coordinate (longitude) with a
/// random latitude, and link delays come from [`assign_geo_delays`].
pub fn generate_hyperbolic_graph(params: &GeneratorParams) -> Result<Topology> {
    let n = params.nodes;
    if n < 2 {
        return Err(Error::InvalidTopology("need at least two nodes".into()));
    }
    if !(params.avg_degree >= 2.0) {
        return Err(Error::InvalidTopology(
            "target average degree must be at least 2".into(),
        ));
    }
    if !(params.radial_exponent > 0.0) {
        return Err(Error::InvalidTopology(
            "radial exponent must be positive".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let beta = params.radial_exponent;
    let disk = 2.0 * (n as f64).ln().max(1.0);
    let spread = (beta * disk).cosh() - 1.0;

    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let theta = TAU * (i as f64 + rng.gen::<f64>()) / n as f64;
        let u: f64 = rng.gen();
        let r = (1.0 + spread * u).acosh() / beta;
        let lon = wrap_lon(theta.to_degrees() - 180.0 + rng.gen_range(-10.0..10.0));
        let lat = rng.gen_range(-40.0..60.0);
        nodes.push(NodeRecord {
            id: i as NodeId,
            prefix: format!("n{i}"),
            coord: HyperbolicCoordinate::new(r, theta).expect("finite coordinate"),
            geo: Some(GeoPoint { lat, lon }),
        });
    }

    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((hyperbolic_distance(&nodes[i].coord, &nodes[j].coord), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    // A complete graph is the densest possible outcome.
    let target = params.avg_degree.min((n - 1) as f64);

    // Bisection over the number of shortest pairs kept; the realized
    // component degree is non-decreasing in it up to component-size jumps.
    let (mut lo, mut hi) = (1usize, pairs.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if component_degree(n, &pairs[..mid]) < target {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let mut best = lo;
    if lo > 1 {
        let below = component_degree(n, &pairs[..lo - 1]);
        let at = component_degree(n, &pairs[..lo]);
        if (target - below).abs() < (at - target).abs() {
            best = lo - 1;
        }
    }
    let achieved = component_degree(n, &pairs[..best]);
    if (achieved - target).abs() > 0.1 * target {
        return Err(Error::DegreeUnattainable {
            target: params.avg_degree,
            achieved,
        });
    }

    let links = pairs[..best]
        .iter()
        .map(|&(_, i, j)| LinkRecord {
            a: i as NodeId,
            b: j as NodeId,
            delay_ms: 1.0,
            cost: 1.0,
        })
        .collect();
    let topo = Topology::new(nodes, links)?.largest_component();
    assign_geo_delays(&topo, DEFAULT_KM_PER_MS, DEFAULT_MIN_DELAY_MS)
}

fn wrap_lon(lon: f64) -> f64 {
    (lon + 180.0).rem_euclid(360.0) - 180.0
}

/// Average degree of the largest component formed by `links`.
fn component_degree(n: usize, links: &[(f64, usize, usize)]) -> f64 {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(_, a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut size = vec![0usize; n];
    let mut edges = vec![0usize; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        size[r] += 1;
    }
    for &(_, a, _) in links {
        let r = find(&mut parent, a);
        edges[r] += 1;
    }
    let root = (0..n)
        .max_by(|&x, &y| size[x].cmp(&size[y]).then(y.cmp(&x)))
        .unwrap_or(0);
    2.0 * edges[root] as f64 / size[root] as f64
}
