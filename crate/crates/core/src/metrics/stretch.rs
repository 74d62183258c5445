use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::topology::NodeId;

use super::log::PingRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct StretchRow {
    pub second: u64,
    pub median: f64,
    pub p75: f64,
    pub p95: f64,
    pub n_pairs: usize,
}

/// Percentile of sorted data by linear interpolation between closest ranks
/// (the "type 7" definition). `q` is in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

type PingKey = (NodeId, NodeId, u32);

fn index(pings: &[PingRecord]) -> HashMap<PingKey, &PingRecord> {
    pings.iter().map(|p| ((p.origin, p.target, p.seq), p)).collect()
}

/// Per-second percentiles of the ratio of each ping's RTT in the first run
/// to the same ping's RTT in the second. Pings that timed out in either run
/// are left out. Seconds are those of the send time.
pub fn compute_delay_stretch(hr: &[PingRecord], ls: &[PingRecord]) -> Result<Vec<StretchRow>> {
    if hr.len() != ls.len() {
        return Err(Error::ScheduleMismatch(format!(
            "{} pings against {}",
            hr.len(),
            ls.len()
        )));
    }
    let other = index(ls);
    let mut buckets: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for p in hr {
        let key = (p.origin, p.target, p.seq);
        let q = other.get(&key).ok_or_else(|| {
            Error::ScheduleMismatch(format!("ping {}->{} #{} missing from the baseline", key.0, key.1, key.2))
        })?;
        if q.sent != p.sent {
            return Err(Error::ScheduleMismatch(format!(
                "ping {}->{} #{} sent at {} and {}",
                key.0, key.1, key.2, p.sent, q.sent
            )));
        }
        if let (Some(a), Some(b)) = (p.rtt, q.rtt) {
            if b.as_micros() > 0 {
                buckets
                    .entry(p.sent.whole_secs())
                    .or_default()
                    .push(a.as_micros() as f64 / b.as_micros() as f64);
            }
        }
    }
    Ok(buckets
        .into_iter()
        .map(|(second, mut v)| {
            v.sort_by(f64::total_cmp);
            StretchRow {
                second,
                median: percentile(&v, 0.5),
                p75: percentile(&v, 0.75),
                p95: percentile(&v, 0.95),
                n_pairs: v.len(),
            }
        })
        .collect())
}

/// Averages of the median and 95th percentile over rows with
/// `from <= second < to`.
pub fn window_means(rows: &[StretchRow], from: u64, to: u64) -> Option<(f64, f64)> {
    let sel: Vec<&StretchRow> = rows.iter().filter(|r| r.second >= from && r.second < to).collect();
    if sel.is_empty() {
        return None;
    }
    let n = sel.len() as f64;
    Some((
        sel.iter().map(|r| r.median).sum::<f64>() / n,
        sel.iter().map(|r| r.p95).sum::<f64>() / n,
    ))
}
