//! Hyperbolic plane geometry in native polar coordinates (curvature -1).

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(r, theta)` on the hyperbolic plane.
///
/// `theta` is kept normalized to `[0, 2π)`. Equality, ordering and hashing
/// use the bit patterns of the normalized fields, so a coordinate can key a
/// route cache directly.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HyperbolicCoordinate {
    r: f64,
    theta: f64,
}

impl HyperbolicCoordinate {
    /// Builds a coordinate, normalizing the angle. Negative or non-finite
    /// radii are rejected.
    pub fn new(r: f64, theta: f64) -> Option<Self> {
        if !(r.is_finite() && theta.is_finite()) || r < 0.0 {
            return None;
        }
        Some(Self {
            // -0.0 would break bitwise equality with 0.0
            r: r + 0.0,
            theta: normalize_angle(theta),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn key(&self) -> (u64, u64) {
        (self.r.to_bits(), self.theta.to_bits())
    }
}

impl PartialEq for HyperbolicCoordinate {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for HyperbolicCoordinate {}

impl Hash for HyperbolicCoordinate {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for HyperbolicCoordinate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HyperbolicCoordinate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.r
            .total_cmp(&other.r)
            .then(self.theta.total_cmp(&other.theta))
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t + 0.0
    }
}

/// Angular separation in `[0, π]`.
pub fn angular_separation(a: f64, b: f64) -> f64 {
    PI - (PI - (a - b).abs()).abs()
}

/// Hyperbolic distance from the law of cosines
/// `cosh d = cosh r1 cosh r2 - sinh r1 sinh r2 cos Δθ`.
///
/// Evaluated in the equivalent half-angle form
/// `sinh²(d/2) = sinh²((r1-r2)/2) + sinh r1 sinh r2 sin²(Δθ/2)`, whose terms
/// are all non-negative, so nearby points at large radius do not cancel.
pub fn hyperbolic_distance(a: &HyperbolicCoordinate, b: &HyperbolicCoordinate) -> f64 {
    if a == b {
        return 0.0;
    }
    let dtheta = angular_separation(a.theta, b.theta);
    let radial = ((a.r - b.r) / 2.0).sinh();
    let angular = (dtheta / 2.0).sin();
    let s2 = radial * radial + a.r.sinh() * b.r.sinh() * angular * angular;
    2.0 * s2.max(0.0).sqrt().asinh()
}

/// Plain law-of-cosines evaluation with the acosh argument clamped to 1.
/// Kept as a second route for cross-checking.
pub fn hyperbolic_distance_cosh(a: &HyperbolicCoordinate, b: &HyperbolicCoordinate) -> f64 {
    let dtheta = angular_separation(a.theta, b.theta);
    let x = a.r.cosh() * b.r.cosh() - a.r.sinh() * b.r.sinh() * dtheta.cos();
    x.max(1.0).acosh()
}

/// Sorts candidates by distance to `dest`, ascending, ties by id.
pub fn rank_by_distance<F: Copy + Ord>(
    dest: &HyperbolicCoordinate,
    candidates: &[(F, HyperbolicCoordinate)],
) -> Result<Vec<(F, f64)>> {
    if candidates.is_empty() {
        return Err(Error::NoNeighbors);
    }
    let mut ranked: Vec<(F, f64)> = candidates
        .iter()
        .map(|(id, c)| (*id, hyperbolic_distance(c, dest)))
        .collect();
    ranked.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(r: f64, t: f64) -> HyperbolicCoordinate {
        HyperbolicCoordinate::new(r, t).unwrap()
    }

    #[test]
    fn closed_form_identities() {
        assert!((hyperbolic_distance(&c(0.0, 1.0), &c(2.0, 0.3)) - 2.0).abs() < 1e-12);
        assert!((hyperbolic_distance(&c(1.5, 0.7), &c(3.0, 0.7)) - 1.5).abs() < 1e-12);
        assert!((hyperbolic_distance(&c(1.0, 0.0), &c(1.0, PI)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn general_pair_matches_high_precision_value() {
        // acosh(cosh 2.3 cosh 3.1 - sinh 2.3 sinh 3.1 cos 2.5), evaluated
        // with 50-digit arithmetic (mpmath)
        let expected = 5.296_602_862_110_425;
        let d = hyperbolic_distance(&c(2.3, 0.4), &c(3.1, 2.9));
        assert!((d - expected).abs() < 1e-12, "{d}");
    }

    #[test]
    fn angle_normalization() {
        let a = c(1.0, -0.5);
        assert!((a.theta() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(c(1.0, TAU).theta(), 0.0);
        assert_eq!(c(1.0, 0.25 + 3.0 * TAU), c(1.0, 0.25 + 3.0 * TAU));
        assert!(HyperbolicCoordinate::new(-1.0, 0.0).is_none());
        assert!(HyperbolicCoordinate::new(f64::NAN, 0.0).is_none());
        assert_eq!(c(-0.0, 0.0), c(0.0, 0.0));
    }

    #[test]
    fn ranking_by_origin_distance() {
        let dest = c(0.0, 0.0);
        let cands = [(10u32, c(3.0, 1.0)), (11, c(1.0, 2.0)), (12, c(2.0, 3.0))];
        let ranked = rank_by_distance(&dest, &cands).unwrap();
        let ids: Vec<u32> = ranked.iter().map(|x| x.0).collect();
        assert_eq!(ids, vec![11, 12, 10]);
    }

    #[test]
    fn ranking_ties_broken_by_id() {
        let p = c(2.0, 1.0);
        let ranked = rank_by_distance(&c(1.0, 0.0), &[(7u32, p), (2, p)]).unwrap();
        assert_eq!(ranked[0].0, 2);
        assert_eq!(ranked[1].0, 7);
    }

    #[test]
    fn ranking_empty_is_error() {
        let r = rank_by_distance::<u32>(&c(1.0, 0.0), &[]);
        assert!(matches!(r, Err(Error::NoNeighbors)));
    }

    fn coord() -> impl Strategy<Value = HyperbolicCoordinate> {
        (0.0f64..20.0, 0.0f64..TAU).prop_map(|(r, t)| c(r, t))
    }

    proptest! {
        #[test]
        fn ranking_matches_brute_force(dest in coord(), pts in prop::collection::vec(coord(), 1..8)) {
            let cands: Vec<(usize, HyperbolicCoordinate)> = pts.iter().copied().enumerate().collect();
            let ranked = rank_by_distance(&dest, &cands).unwrap();
            // brute force: every earlier element is no farther than every later one
            for i in 0..ranked.len() {
                for j in i + 1..ranked.len() {
                    let di = hyperbolic_distance(&pts[ranked[i].0], &dest);
                    let dj = hyperbolic_distance(&pts[ranked[j].0], &dest);
                    prop_assert!(di < dj || (di == dj && ranked[i].0 < ranked[j].0));
                }
            }
        }

        #[test]
        fn symmetric_and_periodic(a in coord(), b in coord()) {
            let d = hyperbolic_distance(&a, &b);
            prop_assert!(d >= 0.0);
            prop_assert!((d - hyperbolic_distance(&b, &a)).abs() <= 1e-12);
            let a2 = c(a.r(), a.theta() + TAU);
            prop_assert!((d - hyperbolic_distance(&a2, &b)).abs() <= 1e-9);
            prop_assert_eq!(hyperbolic_distance(&a, &a), 0.0);
        }

        #[test]
        fn half_angle_form_agrees_with_cosh_form(
            a in (0.0f64..8.0, 0.0f64..TAU), b in (0.0f64..8.0, 0.0f64..TAU)
        ) {
            let (a, b) = (c(a.0, a.1), c(b.0, b.1));
            let d = hyperbolic_distance(&a, &b);
            // the cosh form loses precision for short distances
            prop_assume!(d > 0.1);
            prop_assert!((d - hyperbolic_distance_cosh(&a, &b)).abs() < 1e-9 * (1.0 + d));
        }
    }
}
