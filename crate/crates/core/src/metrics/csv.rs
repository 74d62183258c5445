//! CSV renderings of the metrics and the readers the summaries need.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::loss::LossRow;
use super::log::ControlKind;
use super::overhead::{Overhead, OverheadRow};
use super::stretch::StretchRow;

pub fn stretch_csv(rows: &[StretchRow]) -> String {
    let mut s = String::from("second,median,p75,p95,n_pairs\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{}", r.second, r.median, r.p75, r.p95, r.n_pairs).unwrap();
    }
    s
}

pub fn loss_csv(rows: &[LossRow]) -> String {
    let mut s = String::from("node,sent,lost,rate\n");
    for r in rows {
        writeln!(s, "{},{},{},{}", r.node, r.sent, r.lost, r.rate).unwrap();
    }
    s
}

pub fn overhead_csv(o: &Overhead) -> String {
    let mut s = String::from("second,kind,count\n");
    for r in &o.series {
        writeln!(s, "{},{},{}", r.second, r.kind.as_str(), r.count).unwrap();
    }
    s
}

pub fn overhead_summary_csv(rows: &[(String, f64)]) -> String {
    let mut s = String::from("mode,per_node_pps\n");
    for (mode, pps) in rows {
        writeln!(s, "{mode},{pps}").unwrap();
    }
    s
}

pub fn write_csv(path: &Path, text: &str) -> Result<()> {
    crate::write_atomic(path, text.as_bytes())
}

/// Rows of a CSV file as string fields, after checking the header.
pub fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let got: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    if got != header {
        return Err(Error::parse(path, format!("expected header {}", header.join(","))));
    }
    Ok(lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

pub fn read_loss_csv(path: &Path) -> Result<Vec<LossRow>> {
    read_rows(path, &["node", "sent", "lost", "rate"])?
        .into_iter()
        .map(|r| {
            let bad = || Error::parse(path, format!("bad row {}", r.join(",")));
            if r.len() != 4 {
                return Err(bad());
            }
            Ok(LossRow {
                node: r[0].parse().map_err(|_| bad())?,
                sent: r[1].parse().map_err(|_| bad())?,
                lost: r[2].parse().map_err(|_| bad())?,
                rate: r[3].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn read_stretch_csv(path: &Path) -> Result<Vec<StretchRow>> {
    read_rows(path, &["second", "median", "p75", "p95", "n_pairs"])?
        .into_iter()
        .map(|r| {
            let bad = || Error::parse(path, format!("bad row {}", r.join(",")));
            if r.len() != 5 {
                return Err(bad());
            }
            Ok(StretchRow {
                second: r[0].parse().map_err(|_| bad())?,
                median: r[1].parse().map_err(|_| bad())?,
                p75: r[2].parse().map_err(|_| bad())?,
                p95: r[3].parse().map_err(|_| bad())?,
                n_pairs: r[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn read_overhead_csv(path: &Path) -> Result<Vec<OverheadRow>> {
    read_rows(path, &["second", "kind", "count"])?
        .into_iter()
        .map(|r| {
            let bad = || Error::parse(path, format!("bad row {}", r.join(",")));
            if r.len() != 3 {
                return Err(bad());
            }
            Ok(OverheadRow {
                second: r[0].parse().map_err(|_| bad())?,
                kind: r[1].parse::<ControlKind>().map_err(|_| bad())?,
                count: r[2].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn read_overhead_summary_csv(path: &Path) -> Result<Vec<(String, f64)>> {
    read_rows(path, &["mode", "per_node_pps"])?
        .into_iter()
        .map(|r| {
            let bad = || Error::parse(path, format!("bad row {}", r.join(",")));
            if r.len() != 2 {
                return Err(bad());
            }
            Ok((r[0].clone(), r[1].parse().map_err(|_| bad())?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let loss = vec![LossRow {
            node: 3,
            sent: 100,
            lost: 5,
            rate: 0.05,
        }];
        let p = dir.path().join("loss.csv");
        write_csv(&p, &loss_csv(&loss)).unwrap();
        assert_eq!(read_loss_csv(&p).unwrap(), loss);

        let stretch = vec![StretchRow {
            second: 7,
            median: 1.0,
            p75: 1.25,
            p95: 2.95,
            n_pairs: 4,
        }];
        let p = dir.path().join("stretch.csv");
        write_csv(&p, &stretch_csv(&stretch)).unwrap();
        assert_eq!(read_stretch_csv(&p).unwrap(), stretch);

        let recs = vec![crate::metrics::Record::Control {
            time: crate::time::SimTime::from_millis_f64(1500.0),
            kind: ControlKind::LsaData,
            from: 1,
            to: 2,
            name: crate::forwarder::Name::new("/x"),
        }];
        let o = crate::metrics::compute_message_overhead(&recs, 2, 2.0);
        let p = dir.path().join("overhead.csv");
        write_csv(&p, &overhead_csv(&o)).unwrap();
        assert_eq!(read_overhead_csv(&p).unwrap(), o.series);

        let p = dir.path().join("overhead_summary.csv");
        write_csv(&p, &overhead_summary_csv(&[("hr".into(), 0.5)])).unwrap();
        assert_eq!(read_overhead_summary_csv(&p).unwrap(), vec![("hr".to_string(), 0.5)]);
    }

    #[test]
    fn wrong_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(read_loss_csv(&p).is_err());
    }
}
