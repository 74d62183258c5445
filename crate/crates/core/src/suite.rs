//! Experiment suites: a declarative matrix of topologies, traffic levels and
//! routing variants, run as independent jobs and written to one directory
//! tree.
//!
//! ```toml
//! name = "scaling"
//! topologies = ["t22.json", "t41.json"]
//! alphas = [0.1]
//!
//! [base]
//! duration_s = 1800
//! seed = 42
//! sequential_failures = {}
//!
//! [[variants]]
//! label = "ls"
//! routing = "ls"
//! strategy = "best-route"
//! multipath_factor = 2
//!
//! [[variants]]
//! label = "hr"
//! routing = "hr"
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::csv::{loss_csv, overhead_csv, overhead_summary_csv, stretch_csv, write_csv};
use crate::metrics::{
    compute_delay_stretch, compute_loss_rate, compute_message_overhead, mean_loss_rate, window_means, EventLog,
};
use crate::routing::MultipathFactor;
use crate::sim::{run, RoutingMode, Scenario, StrategyName};
use crate::topology::{load_topology, Topology};

pub const LOG_FILE: &str = "events.log";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub label: String,
    pub routing: RoutingMode,
    #[serde(default = "default_strategy")]
    pub strategy: StrategyName,
    #[serde(default = "default_mpf")]
    pub multipath_factor: MultipathFactor,
}

fn default_strategy() -> StrategyName {
    StrategyName::Asf
}

fn default_mpf() -> MultipathFactor {
    MultipathFactor::Limited(4)
}

fn default_alphas() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteManifest {
    pub name: String,
    /// Relative paths are resolved against the manifest's directory.
    pub topologies: Vec<PathBuf>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    pub variants: Vec<Variant>,
    /// Scenario fields shared by every member. Per-member fields
    /// (topology, routing, strategy, multipath factor, alpha) are filled in.
    #[serde(default)]
    pub base: toml::Table,
}

/// One scenario of the matrix and where its outputs go, relative to the
/// suite directory.
#[derive(Debug, Clone)]
pub struct Member {
    pub topology_label: String,
    pub alpha: f64,
    pub variant: Variant,
    pub scenario: Scenario,
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub topology: String,
    pub nodes: usize,
    pub links: usize,
    pub alpha: f64,
    pub label: String,
    pub mode: RoutingMode,
    pub strategy: StrategyName,
    pub mpf: MultipathFactor,
    pub per_node_pps: f64,
    pub mean_loss: f64,
    /// Mean per-second median and p95 stretch against the group's
    /// link-state member, from one probing period in to the end.
    pub stretch: Option<(f64, f64)>,
}

impl SuiteManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: SuiteManifest = toml::from_str(&text).map_err(|e| Error::parse(path, e))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        for t in &mut m.topologies {
            if t.is_relative() {
                *t = dir.join(&*t);
            }
        }
        m.members()?;
        Ok(m)
    }

    /// Expands the matrix in a fixed order: topology, then alpha, then
    /// variant.
    pub fn members(&self) -> Result<Vec<Member>> {
        let bad = |m: String| Error::InvalidScenario(m);
        if self.topologies.is_empty() || self.variants.is_empty() || self.alphas.is_empty() {
            return Err(bad("suite needs at least one topology, alpha and variant".into()));
        }
        let mut labels: Vec<&str> = self.variants.iter().map(|v| v.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("variant labels must be unique".into()));
        }
        for v in &self.variants {
            if v.label.is_empty() || !v.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(bad(format!("variant label {:?} must be alphanumeric", v.label)));
            }
        }
        let mut topo_labels: Vec<String> = Vec::new();
        for t in &self.topologies {
            let stem = t
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| bad(format!("topology path {} has no file name", t.display())))?;
            if topo_labels.contains(&stem) {
                return Err(bad(format!("two topologies share the name {stem}")));
            }
            topo_labels.push(stem);
        }

        let mut out = Vec::new();
        for (topo, tl) in self.topologies.iter().zip(&topo_labels) {
            for &alpha in &self.alphas {
                for v in &self.variants {
                    let mut table = self.base.clone();
                    for key in ["topology", "routing", "strategy", "multipath_factor"] {
                        if table.contains_key(key) {
                            return Err(bad(format!("base may not set {key}; it comes from the matrix")));
                        }
                    }
                    table.insert("topology".into(), topo.to_string_lossy().into_owned().into());
                    table.insert("routing".into(), v.routing.as_str().into());
                    table.insert("strategy".into(), v.strategy.as_str().into());
                    table.insert(
                        "multipath_factor".into(),
                        match v.multipath_factor {
                            MultipathFactor::All => "all".into(),
                            MultipathFactor::Limited(k) => toml::Value::Integer(k as i64),
                        },
                    );
                    let traffic = table
                        .entry("traffic")
                        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
                    let toml::Value::Table(traffic) = traffic else {
                        return Err(bad("base.traffic must be a table".into()));
                    };
                    traffic.insert("alpha".into(), alpha.into());
                    let scenario: Scenario = toml::Value::Table(table)
                        .try_into()
                        .map_err(|e: toml::de::Error| bad(e.to_string()))?;
                    scenario.validate()?;
                    out.push(Member {
                        topology_label: tl.clone(),
                        alpha,
                        variant: v.clone(),
                        dir: PathBuf::from(tl).join(format!("alpha-{alpha}")).join(&v.label),
                        scenario,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Writes a run's event log and metric CSVs into `dir`.
pub fn write_run_outputs(dir: &Path, scenario: &Scenario, topo: &Topology, log: &EventLog) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    crate::write_atomic(&dir.join(LOG_FILE), log.to_text().as_bytes())?;
    let pings = log.ping_records();
    let down = log.node_down_intervals();
    write_csv(&dir.join("loss.csv"), &loss_csv(&compute_loss_rate(&pings, &down)))?;
    let o = compute_message_overhead(&log.records, topo.node_count(), scenario.duration_s);
    write_csv(&dir.join("overhead.csv"), &overhead_csv(&o))?;
    write_csv(
        &dir.join("overhead_summary.csv"),
        &overhead_summary_csv(&[(scenario.routing.to_string(), o.per_node_pps)]),
    )?;
    Ok(())
}

/// Reads a run's event log from a run directory or a log file path.
pub fn read_run_log(path: &Path) -> Result<EventLog> {
    let file = if path.is_dir() { path.join(LOG_FILE) } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
    EventLog::parse(&text).map_err(|e| match e {
        Error::MalformedLog { line, reason } => Error::parse(&file, format!("line {line}: {reason}")),
        other => other,
    })
}

/// Runs every member, `jobs` at a time, and writes the per-run outputs, the
/// stretch of each non-link-state member against the first link-state member
/// of its group, and `summary.csv`.
pub fn run_suite(manifest: &SuiteManifest, out: &Path, jobs: usize) -> Result<Vec<SummaryRow>> {
    let members = manifest.members()?;
    let mut topologies = Vec::new();
    for t in &manifest.topologies {
        topologies.push(load_topology(t, true)?);
    }
    let topo_of = |m: &Member| {
        let i = manifest
            .topologies
            .iter()
            .position(|p| *p == m.scenario.topology)
            .expect("member topology is in the manifest");
        &topologies[i]
    };

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<EventLog>>>> = Mutex::new((0..members.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, members.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(m) = members.get(i) else { break };
                log::info!("running {}", m.dir.display());
                let topo = topo_of(m);
                let r = run(&m.scenario, topo)
                    .and_then(|log| write_run_outputs(&out.join(&m.dir), &m.scenario, topo, &log).map(|_| log));
                results.lock().expect("no panics while holding the lock")[i] = Some(r);
            });
        }
    });
    let mut logs = Vec::with_capacity(members.len());
    for r in results.into_inner().expect("workers finished") {
        logs.push(r.expect("every member ran")?);
    }

    let mut rows = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let topo = topo_of(m);
        let log = &logs[i];
        let pings = log.ping_records();
        let baseline = members.iter().position(|o| {
            o.scenario.routing == RoutingMode::Ls && o.topology_label == m.topology_label && o.alpha == m.alpha
        });
        let stretch = match baseline {
            Some(b) if b != i => {
                let srows = compute_delay_stretch(&pings, &logs[b].ping_records())?;
                write_csv(&out.join(&m.dir).join("stretch.csv"), &stretch_csv(&srows))?;
                let from = m.scenario.asf.t2_s.ceil() as u64;
                window_means(&srows, from, m.scenario.duration_s.ceil() as u64)
            }
            _ => None,
        };
        let o = compute_message_overhead(&log.records, topo.node_count(), m.scenario.duration_s);
        rows.push(SummaryRow {
            topology: m.topology_label.clone(),
            nodes: topo.node_count(),
            links: topo.link_count(),
            alpha: m.alpha,
            label: m.variant.label.clone(),
            mode: m.scenario.routing,
            strategy: m.scenario.strategy,
            mpf: m.scenario.multipath_factor,
            per_node_pps: o.per_node_pps,
            mean_loss: mean_loss_rate(&compute_loss_rate(&pings, &log.node_down_intervals())),
            stretch,
        });
    }
    write_csv(&out.join(SUMMARY_FILE), &summary_csv(&rows))?;
    Ok(rows)
}

const SUMMARY_HEADER: [&str; 13] = [
    "topology",
    "nodes",
    "links",
    "alpha",
    "label",
    "mode",
    "strategy",
    "mpf",
    "per_node_pps",
    "mean_loss",
    "stretch_median",
    "stretch_p95",
    "stretch_window",
];

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = SUMMARY_HEADER.join(",");
    s.push('\n');
    for r in rows {
        let (med, p95, window) = match r.stretch {
            Some((m, p)) => (m.to_string(), p.to_string(), "after-first-probe-period"),
            None => (String::new(), String::new(), ""),
        };
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.topology, r.nodes, r.links, r.alpha, r.label, r.mode, r.strategy, r.mpf, r.per_node_pps, r.mean_loss,
            med, p95, window
        )
        .unwrap();
    }
    s
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    crate::metrics::csv::read_rows(path, &SUMMARY_HEADER)?
        .into_iter()
        .map(|r| {
            let bad = || Error::parse(path, format!("bad row {}", r.join(",")));
            if r.len() != SUMMARY_HEADER.len() {
                return Err(bad());
            }
            let stretch = if r[10].is_empty() {
                None
            } else {
                Some((r[10].parse().map_err(|_| bad())?, r[11].parse().map_err(|_| bad())?))
            };
            Ok(SummaryRow {
                topology: r[0].clone(),
                nodes: r[1].parse().map_err(|_| bad())?,
                links: r[2].parse().map_err(|_| bad())?,
                alpha: r[3].parse().map_err(|_| bad())?,
                label: r[4].clone(),
                mode: r[5].parse().map_err(|_| bad())?,
                strategy: r[6].parse().map_err(|_| bad())?,
                mpf: r[7].parse().map_err(|_| bad())?,
                per_node_pps: r[8].parse().map_err(|_| bad())?,
                mean_loss: r[9].parse().map_err(|_| bad())?,
                stretch,
            })
        })
        .collect()
}

/// Per-node overhead by variant, one row per topology and alpha, in the
/// order the rows appear.
pub fn overhead_table(rows: &[SummaryRow]) -> String {
    let mut labels: Vec<&str> = Vec::new();
    let mut groups: Vec<(&str, usize, f64)> = Vec::new();
    for r in rows {
        if !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
        if !groups.iter().any(|g| g.0 == r.topology && g.2 == r.alpha) {
            groups.push((&r.topology, r.nodes, r.alpha));
        }
    }
    let mut s = format!("topology,nodes,alpha,{}\n", labels.join(","));
    for (topo, nodes, alpha) in groups {
        let cells: Vec<String> = labels
            .iter()
            .map(|l| {
                rows.iter()
                    .find(|r| r.topology == topo && r.alpha == alpha && r.label == *l)
                    .map(|r| format!("{:.2}", r.per_node_pps))
                    .unwrap_or_default()
            })
            .collect();
        writeln!(s, "{topo},{nodes},{alpha},{}", cells.join(",")).unwrap();
    }
    s
}

/// Per-node overhead of each routing mode against network size, with the
/// link-state to hyperbolic ratio. Each mode is represented by its first
/// variant, preferring an adaptive one for hyperbolic routing.
pub fn scaling_table(rows: &[SummaryRow]) -> String {
    let first = |mode: RoutingMode| rows.iter().find(|r| r.mode == mode).map(|r| r.label.clone());
    let hr = rows
        .iter()
        .find(|r| r.mode == RoutingMode::Hr && r.strategy == StrategyName::Asf)
        .map(|r| r.label.clone())
        .or_else(|| first(RoutingMode::Hr));
    let ls = first(RoutingMode::Ls);
    let mut s = String::from("nodes,alpha,hr_pps,ls_pps,ls_over_hr\n");
    let mut keys: Vec<(usize, f64)> = rows.iter().map(|r| (r.nodes, r.alpha)).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.dedup();
    for (nodes, alpha) in keys {
        let pps = |label: &Option<String>| {
            rows.iter()
                .find(|r| r.nodes == nodes && r.alpha == alpha && Some(&r.label) == label.as_ref())
                .map(|r| r.per_node_pps)
        };
        let (h, l) = (pps(&hr), pps(&ls));
        let fmt = |v: Option<f64>| v.map(|v| format!("{v:.3}")).unwrap_or_default();
        let ratio = match (h, l) {
            (Some(h), Some(l)) if h > 0.0 => format!("{:.2}", l / h),
            _ => String::new(),
        };
        writeln!(s, "{nodes},{alpha},{},{},{ratio}", fmt(h), fmt(l)).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(text: &str) -> SuiteManifest {
        toml::from_str(text).unwrap()
    }

    const BASIC: &str = r#"
        name = "t"
        topologies = ["a.json", "b.json"]
        alphas = [0.5, 1.0]
        [base]
        duration_s = 30
        seed = 9
        [base.traffic]
        ping_interval_s = 2
        [[variants]]
        label = "ls"
        routing = "ls"
        strategy = "best-route"
        multipath_factor = 2
        [[variants]]
        label = "hr-all"
        routing = "hr"
        multipath_factor = "all"
    "#;

    #[test]
    fn matrix_order_and_fields() {
        let ms = manifest(BASIC).members().unwrap();
        assert_eq!(ms.len(), 8);
        assert_eq!(ms[0].dir, PathBuf::from("a/alpha-0.5/ls"));
        assert_eq!(ms[3].dir, PathBuf::from("a/alpha-1/hr-all"));
        assert_eq!(ms[7].dir, PathBuf::from("b/alpha-1/hr-all"));
        let s = &ms[3].scenario;
        assert_eq!(s.routing, RoutingMode::Hr);
        assert_eq!(s.multipath_factor, MultipathFactor::All);
        assert_eq!(s.traffic.alpha, 1.0);
        assert_eq!(s.traffic.ping_interval_s, 2.0);
        assert_eq!(s.seed, 9);
        assert_eq!(ms[0].scenario.strategy, StrategyName::BestRoute);
    }

    #[test]
    fn rejects_bad_manifests() {
        let dup = BASIC.replace("hr-all", "ls");
        assert!(manifest(&dup).members().is_err());
        let fixed = BASIC.replace("seed = 9", "seed = 9\nrouting = \"hr\"");
        assert!(manifest(&fixed).members().is_err());
        let unknown = BASIC.replace("seed = 9", "seed = 9\nbogus = 1");
        assert!(manifest(&unknown).members().is_err());
        let alpha = BASIC.replace("[0.5, 1.0]", "[0.0]");
        assert!(manifest(&alpha).members().is_err());
    }

    #[test]
    fn summary_round_trip() {
        let rows = vec![
            SummaryRow {
                topology: "t22".into(),
                nodes: 22,
                links: 50,
                alpha: 0.1,
                label: "ls".into(),
                mode: RoutingMode::Ls,
                strategy: StrategyName::BestRoute,
                mpf: MultipathFactor::Limited(2),
                per_node_pps: 2.8,
                mean_loss: 0.01,
                stretch: None,
            },
            SummaryRow {
                topology: "t22".into(),
                nodes: 22,
                links: 50,
                alpha: 0.1,
                label: "hr".into(),
                mode: RoutingMode::Hr,
                strategy: StrategyName::Asf,
                mpf: MultipathFactor::Limited(4),
                per_node_pps: 0.35,
                mean_loss: 0.02,
                stretch: Some((1.0, 1.5)),
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(SUMMARY_FILE);
        write_csv(&p, &summary_csv(&rows)).unwrap();
        assert_eq!(read_summary(&p).unwrap(), rows);
        assert_eq!(overhead_table(&rows), "topology,nodes,alpha,ls,hr\nt22,22,0.1,2.80,0.35\n");
        assert_eq!(scaling_table(&rows), "nodes,alpha,hr_pps,ls_pps,ls_over_hr\n22,0.1,0.350,2.800,8.00\n");
    }
}
