use std::collections::BTreeMap;

use super::log::{ControlKind, Record};

#[derive(Debug, Clone, PartialEq)]
pub struct OverheadRow {
    pub second: u64,
    pub kind: ControlKind,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overhead {
    pub total: u64,
    pub by_kind: BTreeMap<ControlKind, u64>,
    /// Transmissions per node per second over the whole run.
    pub per_node_pps: f64,
    /// Sparse per-second counts by kind, ordered by second then kind.
    pub series: Vec<OverheadRow>,
}

impl Overhead {
    /// Dense per-second totals over `[0, seconds)`.
    pub fn per_second(&self, seconds: u64) -> Vec<u64> {
        let mut v = vec![0; seconds as usize];
        for r in &self.series {
            if let Some(slot) = v.get_mut(r.second as usize) {
                *slot += r.count;
            }
        }
        v
    }
}

/// Counts every control transmission in `records`. Each record is one link
/// transmission and lands in exactly one kind bucket.
pub fn compute_message_overhead(records: &[Record], node_count: usize, duration_s: f64) -> Overhead {
    let mut by_kind: BTreeMap<ControlKind, u64> = ControlKind::ALL.iter().map(|k| (*k, 0)).collect();
    let mut series: BTreeMap<(u64, ControlKind), u64> = BTreeMap::new();
    let mut total = 0;
    for r in records {
        if let Record::Control { time, kind, .. } = r {
            total += 1;
            *by_kind.entry(*kind).or_default() += 1;
            *series.entry((time.whole_secs(), *kind)).or_default() += 1;
        }
    }
    let denom = node_count as f64 * duration_s;
    Overhead {
        total,
        by_kind,
        per_node_pps: if denom > 0.0 { total as f64 / denom } else { 0.0 },
        series: series
            .into_iter()
            .map(|((second, kind), count)| OverheadRow { second, kind, count })
            .collect(),
    }
}

/// Ratio of cumulative transmissions, first run over second, at the end of
/// each second. Seconds where the second run has sent nothing yet give
/// `None`.
pub fn cumulative_ratio(hr: &[u64], ls: &[u64]) -> Vec<Option<f64>> {
    let (mut a, mut b) = (0u64, 0u64);
    hr.iter()
        .zip(ls)
        .map(|(x, y)| {
            a += x;
            b += y;
            (b > 0).then(|| a as f64 / b as f64)
        })
        .collect()
}
