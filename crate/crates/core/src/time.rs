//! Simulation clock values.
//!
//! Time is kept as integer microseconds so that event ordering and log output
//! are exact and platform independent.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A point in simulated time (or a span), in microseconds.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn from_micros(us: u64) -> Self {
        SimTime(us)
    }

    /// Rounds to the nearest microsecond; negative inputs clamp to zero.
    pub fn from_millis_f64(ms: f64) -> Self {
        SimTime((ms * 1_000.0).round().max(0.0) as u64)
    }

    pub fn from_secs_f64(s: f64) -> Self {
        SimTime((s * 1_000_000.0).round().max(0.0) as u64)
    }

    pub fn from_secs(s: u64) -> Self {
        SimTime(s * 1_000_000)
    }

    pub fn as_micros(self) -> u64 {
        self.0
    }

    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / 1_000.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1_000_000.0
    }

    /// Whole seconds, rounded down.
    pub fn whole_secs(self) -> u64 {
        self.0 / 1_000_000
    }

    pub fn saturating_sub(self, other: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(other.0))
    }

    /// Parses the `millis.micros` form written by [`fmt::Display`].
    pub fn parse_millis(s: &str) -> Option<SimTime> {
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s, ""),
        };
        if frac.len() > 3 || whole.is_empty() {
            return None;
        }
        let ms: u64 = whole.parse().ok()?;
        let mut us = 0u64;
        for (i, c) in frac.chars().enumerate() {
            let d = c.to_digit(10)? as u64;
            us += d * 10u64.pow(2 - i as u32);
        }
        Some(SimTime(ms * 1_000 + us))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

/// Milliseconds with exactly three decimals.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1_000, self.0 % 1_000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_agree() {
        for us in [0u64, 1, 999, 1_000, 1_234_567, 86_400_000_001] {
            let t = SimTime(us);
            assert_eq!(SimTime::parse_millis(&t.to_string()), Some(t));
        }
        assert_eq!(SimTime(12_345).to_string(), "12.345");
        assert_eq!(SimTime::parse_millis("7"), Some(SimTime(7_000)));
        assert_eq!(SimTime::parse_millis("1.5"), Some(SimTime(1_500)));
        assert_eq!(SimTime::parse_millis("1.2345"), None);
        assert_eq!(SimTime::parse_millis("x"), None);
    }

    #[test]
    fn conversions() {
        assert_eq!(SimTime::from_secs_f64(1.5), SimTime(1_500_000));
        assert_eq!(SimTime::from_millis_f64(4000.0), SimTime::from_secs(4));
        assert_eq!(SimTime::from_secs(61).whole_secs(), 61);
    }
}
