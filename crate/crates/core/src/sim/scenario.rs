//! Scenario description: which topology, which routing and strategy, what
//! traffic and which failures.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forwarder::ForwarderConfig;
use crate::routing::MultipathFactor;
use crate::strategy::{AsfParams, StrategyKind};
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoutingMode {
    Hr,
    Ls,
}

impl RoutingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RoutingMode::Hr => "hr",
            RoutingMode::Ls => "ls",
        }
    }
}

impl fmt::Display for RoutingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoutingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hr" => Ok(RoutingMode::Hr),
            "ls" => Ok(RoutingMode::Ls),
            _ => Err(format!("routing mode must be hr or ls, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    Asf,
    BestRoute,
}

impl StrategyName {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::Asf => "asf",
            StrategyName::BestRoute => "best-route",
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "asf" => Ok(StrategyName::Asf),
            "best-route" => Ok(StrategyName::BestRoute),
            _ => Err(format!("strategy must be asf or best-route, got {s:?}")),
        }
    }
}

/// How probe Interests count toward overhead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeAccounting {
    /// Every link transmission of a probe counts.
    #[default]
    PerLink,
    /// Only the probe's emission at the node that generated it counts.
    Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    /// Fraction of the other nodes' prefixes each node pings.
    pub alpha: f64,
    pub ping_interval_s: f64,
    pub start_s: f64,
    /// Pings stop being issued at this time; defaults to the run duration.
    pub stop_s: Option<f64>,
    /// Each flow starts at a uniformly drawn offset in `[start, start + spread)`.
    pub start_spread_s: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            ping_interval_s: 1.0,
            start_s: 0.0,
            stop_s: None,
            start_spread_s: 60.0,
        }
    }
}

/// One scripted failure. Exactly one of `node` and `link` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<[NodeId; 2]>,
    pub fail_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recover_s: Option<f64>,
}

/// The most connected nodes fail one after another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequentialPlan {
    pub count: usize,
    pub first_s: f64,
    pub period_s: f64,
    pub downtime_s: f64,
}

impl Default for SequentialPlan {
    fn default() -> Self {
        Self {
            count: 10,
            first_s: 60.0,
            period_s: 180.0,
            downtime_s: 90.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    /// Delay before the endpoints of a link notice a state change.
    pub detection_delay_ms: f64,
    /// Per-direction link rate in packets per second; `None` means
    /// pure propagation delay with no queueing.
    pub link_rate_pps: Option<f64>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            detection_delay_ms: 100.0,
            link_rate_pps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkStateConfig {
    /// Period of the steady-state sync refresh; zero disables it.
    pub refresh_period_s: f64,
}

impl Default for LinkStateConfig {
    fn default() -> Self {
        Self { refresh_period_s: 4.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Relative paths are resolved against the scenario file's directory.
    pub topology: PathBuf,
    pub routing: RoutingMode,
    #[serde(default = "default_strategy")]
    pub strategy: StrategyName,
    #[serde(default = "default_mpf")]
    pub multipath_factor: MultipathFactor,
    pub duration_s: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub asf: AsfParams,
    #[serde(default)]
    pub traffic: TrafficConfig,
    #[serde(default)]
    pub failures: Vec<FailureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequential_failures: Option<SequentialPlan>,
    #[serde(default)]
    pub network: NetworkConfig,
    #[serde(default)]
    pub forwarder: ForwarderConfig,
    #[serde(default)]
    pub linkstate: LinkStateConfig,
    #[serde(default)]
    pub probe_accounting: ProbeAccounting,
}

fn default_strategy() -> StrategyName {
    StrategyName::Asf
}

fn default_mpf() -> MultipathFactor {
    MultipathFactor::Limited(4)
}

impl Scenario {
    /// A scenario with defaults for everything but the essentials.
    pub fn new(topology: impl Into<PathBuf>, routing: RoutingMode, duration_s: f64) -> Self {
        Self {
            topology: topology.into(),
            routing,
            strategy: default_strategy(),
            multipath_factor: default_mpf(),
            duration_s,
            seed: 0,
            asf: AsfParams::default(),
            traffic: TrafficConfig::default(),
            failures: Vec::new(),
            sequential_failures: None,
            network: NetworkConfig::default(),
            forwarder: ForwarderConfig::default(),
            linkstate: LinkStateConfig::default(),
            probe_accounting: ProbeAccounting::default(),
        }
    }

    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut s: Scenario = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?
        } else {
            toml::from_str(&text).map_err(|e| Error::parse(path, e))?
        };
        if s.topology.is_relative() {
            if let Some(dir) = path.parent() {
                s.topology = dir.join(&s.topology);
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn strategy_kind(&self) -> StrategyKind {
        match self.strategy {
            StrategyName::Asf => StrategyKind::Asf(self.asf.clone()),
            StrategyName::BestRoute => StrategyKind::BestRoute,
        }
    }

    pub fn stop_s(&self) -> f64 {
        self.traffic.stop_s.unwrap_or(self.duration_s)
    }

    /// Checks everything that can be checked without the topology.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return bad(format!("duration_s must be positive, got {}", self.duration_s));
        }
        let t = &self.traffic;
        if !(t.alpha > 0.0 && t.alpha <= 1.0) {
            return bad(format!("traffic.alpha must be in (0, 1], got {}", t.alpha));
        }
        if !(t.ping_interval_s > 0.0 && t.ping_interval_s.is_finite()) {
            return bad("traffic.ping_interval_s must be positive".into());
        }
        if !(t.start_s >= 0.0 && t.start_spread_s >= 0.0) {
            return bad("traffic.start_s and traffic.start_spread_s must be non-negative".into());
        }
        if self.stop_s() < t.start_s {
            return bad("traffic.stop_s precedes traffic.start_s".into());
        }
        self.asf.validate()?;
        if !(self.forwarder.interest_lifetime_ms > 0.0) {
            return bad("forwarder.interest_lifetime_ms must be positive".into());
        }
        if !(self.forwarder.data_freshness_ms >= 0.0) {
            return bad("forwarder.data_freshness_ms must be non-negative".into());
        }
        if !(self.network.detection_delay_ms >= 0.0) {
            return bad("network.detection_delay_ms must be non-negative".into());
        }
        if self.network.link_rate_pps.is_some_and(|r| !(r > 0.0)) {
            return bad("network.link_rate_pps must be positive".into());
        }
        if !(self.linkstate.refresh_period_s >= 0.0) {
            return bad("linkstate.refresh_period_s must be non-negative".into());
        }
        for f in &self.failures {
            if f.node.is_some() == f.link.is_some() {
                return bad("each failure names exactly one of node or link".into());
            }
            if !(f.fail_s >= 0.0) {
                return bad(format!("failure time {} is negative", f.fail_s));
            }
            if let Some(r) = f.recover_s {
                if !(f.fail_s < r && r <= self.duration_s) {
                    return bad(format!(
                        "failure at {} must recover after failing and by the end of the run, got {r}",
                        f.fail_s
                    ));
                }
            }
        }
        if let Some(p) = &self.sequential_failures {
            if !(p.first_s >= 0.0 && p.period_s > 0.0 && p.downtime_s > 0.0) {
                return bad("sequential_failures needs first_s >= 0 and positive period and downtime".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_with_defaults() {
        let s: Scenario = toml::from_str(
            r#"
            topology = "t.json"
            routing = "ls"
            strategy = "best-route"
            multipath_factor = 2
            duration_s = 30

            [traffic]
            alpha = 0.5

            [[failures]]
            node = 3
            fail_s = 5
            recover_s = 10
            "#,
        )
        .unwrap();
        assert_eq!(s.routing, RoutingMode::Ls);
        assert_eq!(s.strategy, StrategyName::BestRoute);
        assert_eq!(s.multipath_factor, MultipathFactor::Limited(2));
        assert_eq!(s.traffic.ping_interval_s, 1.0);
        assert_eq!(s.asf, AsfParams::default());
        s.validate().unwrap();
        let back: Scenario = toml::from_str(&s.to_toml()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: std::result::Result<Scenario, _> =
            toml::from_str("topology = \"t\"\nrouting = \"hr\"\nduration_s = 1\nbogus = 2\n");
        assert!(r.is_err());
    }

    #[test]
    fn validation() {
        let mut s = Scenario::new("t.json", RoutingMode::Hr, 100.0);
        s.validate().unwrap();
        s.traffic.alpha = 0.0;
        assert!(s.validate().is_err());
        s.traffic.alpha = 1.0;
        s.failures.push(FailureSpec {
            node: Some(1),
            link: None,
            fail_s: 50.0,
            recover_s: Some(40.0),
        });
        assert!(s.validate().is_err());
        s.failures[0].recover_s = Some(200.0);
        assert!(s.validate().is_err());
        s.failures[0].recover_s = Some(90.0);
        s.validate().unwrap();
        s.failures[0].link = Some([1, 2]);
        assert!(s.validate().is_err());
    }
}
