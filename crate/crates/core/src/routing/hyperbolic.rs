//! Greedy hyperbolic routing: neighbors ranked by their distance to the
//! destination coordinate. Neighbors farther from the destination than this
//! node are kept; the strategy deals with local minima.

use super::{MultipathFactor, RouteProvider};
use crate::error::Result;
use crate::forwarder::{FaceId, RouteKey};
use crate::geometry::{rank_by_distance, HyperbolicCoordinate};

pub fn compute_hr_nexthops(
    neighbors: &[(FaceId, HyperbolicCoordinate)],
    dest: &HyperbolicCoordinate,
    mpf: MultipathFactor,
) -> Result<Vec<(FaceId, f64)>> {
    let mut ranked = rank_by_distance(dest, neighbors)?;
    ranked.truncate(mpf.limit());
    Ok(ranked)
}

/// Hyperbolic routing for one node. Coordinates never change at runtime, so
/// the revision is constant; face liveness is applied per query.
pub struct HrProvider<'a> {
    pub neighbors: &'a [(FaceId, HyperbolicCoordinate)],
    pub mpf: MultipathFactor,
}

impl RouteProvider for HrProvider<'_> {
    fn revision(&self) -> u64 {
        0
    }

    fn next_hops(&mut self, key: &RouteKey, live: &dyn Fn(FaceId) -> bool) -> Vec<(FaceId, f64)> {
        let RouteKey::Coord(dest) = key else {
            return Vec::new();
        };
        let up: Vec<(FaceId, HyperbolicCoordinate)> = self
            .neighbors
            .iter()
            .filter(|(f, _)| live(*f))
            .copied()
            .collect();
        compute_hr_nexthops(&up, dest, self.mpf).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::hyperbolic_distance;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn c(r: f64, t: f64) -> HyperbolicCoordinate {
        HyperbolicCoordinate::new(r, t).unwrap()
    }

    #[test]
    fn destination_neighbor_ranks_first() {
        let dest = c(3.0, 1.0);
        let nbrs = [(FaceId(4), c(1.0, 2.0)), (FaceId(9), dest), (FaceId(2), c(2.0, 0.5))];
        let out = compute_hr_nexthops(&nbrs, &dest, MultipathFactor::All).unwrap();
        assert_eq!(out[0], (FaceId(9), 0.0));
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn top_two_of_three() {
        let dest = c(4.0, 0.3);
        let nbrs = [(FaceId(1), c(4.0, 2.0)), (FaceId(2), c(1.0, 0.2)), (FaceId(3), c(3.5, 0.4))];
        let out = compute_hr_nexthops(&nbrs, &dest, MultipathFactor::Limited(2)).unwrap();
        // brute force
        let mut all: Vec<(f64, u32)> = nbrs
            .iter()
            .map(|(f, p)| (hyperbolic_distance(p, &dest), f.0))
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want: Vec<u32> = all.iter().take(2).map(|x| x.1).collect();
        assert_eq!(out.iter().map(|x| x.0 .0).collect::<Vec<_>>(), want);
    }

    #[test]
    fn empty_neighbor_set_is_no_route() {
        let r = compute_hr_nexthops(&[], &c(1.0, 0.0), MultipathFactor::All);
        assert!(matches!(r, Err(Error::NoNeighbors)));
    }

    #[test]
    fn provider_skips_dead_faces_and_prefix_keys() {
        let nbrs = [(FaceId(1), c(1.0, 0.0)), (FaceId(2), c(1.0, 1.0))];
        let mut p = HrProvider {
            neighbors: &nbrs,
            mpf: MultipathFactor::All,
        };
        let out = p.next_hops(&RouteKey::Coord(c(1.0, 0.0)), &|f| f != FaceId(1));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, FaceId(2));
        assert!(p.next_hops(&RouteKey::Prefix("x".into()), &|_| true).is_empty());
        assert!(p.next_hops(&RouteKey::Coord(c(1.0, 0.0)), &|_| false).is_empty());
    }

    proptest! {
        #[test]
        fn length_and_shift_invariance(
            pts in prop::collection::vec((0.0f64..10.0, 0.0f64..TAU), 1..10),
            dest in (0.0f64..10.0, 0.0f64..TAU),
            k in 1usize..6,
        ) {
            let nbrs: Vec<(FaceId, HyperbolicCoordinate)> =
                pts.iter().enumerate().map(|(i, p)| (FaceId(i as u32), c(p.0, p.1))).collect();
            let dest = c(dest.0, dest.1);
            let out = compute_hr_nexthops(&nbrs, &dest, MultipathFactor::Limited(k)).unwrap();
            prop_assert_eq!(out.len(), k.min(nbrs.len()));
            // adding a constant to every distance leaves the order unchanged
            let mut shifted: Vec<(f64, FaceId)> =
                nbrs.iter().map(|(f, p)| (hyperbolic_distance(p, &dest) + 3.0, *f)).collect();
            shifted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (o, s) in out.iter().zip(shifted.iter()) {
                prop_assert_eq!(o.0, s.1);
            }
        }
    }
}
