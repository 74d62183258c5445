//! The event log: a few header lines followed by one record per line,
//!
//! ```text
//! time_ms kind origin target name field=value...
//! ```
//!
//! Header lines start with `#`: `# run key=value...` describes the run and
//! `# prefix <node> <label>` lists each node's prefix.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forwarder::{DropReason, Name};
use crate::time::SimTime;
use crate::topology::NodeId;

const MAGIC: &str = "# hypersim-log v1";

/// Control traffic counted as routing or probing overhead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ControlKind {
    Probe,
    SyncNotify,
    LsaInterest,
    LsaData,
}

impl ControlKind {
    pub const ALL: [ControlKind; 4] = [
        ControlKind::Probe,
        ControlKind::SyncNotify,
        ControlKind::LsaInterest,
        ControlKind::LsaData,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ControlKind::Probe => "probe",
            ControlKind::SyncNotify => "sync-notify",
            ControlKind::LsaInterest => "lsa-interest",
            ControlKind::LsaData => "lsa-data",
        }
    }
}

impl FromStr for ControlKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        ControlKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

/// One ping from `origin` to the prefix of `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PingRecord {
    pub origin: NodeId,
    pub target: NodeId,
    pub seq: u32,
    pub sent: SimTime,
    /// `None` when the ping timed out.
    pub rtt: Option<SimTime>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    /// Logged when the ping resolves.
    Ping { time: SimTime, ping: PingRecord },
    /// One transmission over the link `from -> to`.
    Control {
        time: SimTime,
        kind: ControlKind,
        from: NodeId,
        to: NodeId,
        name: Name,
    },
    Drop {
        time: SimTime,
        node: NodeId,
        /// Neighbor the packet was headed to or came from, if any.
        peer: Option<NodeId>,
        name: Name,
        reason: DropReason,
        is_data: bool,
        is_probe: bool,
    },
    CsHit { time: SimTime, node: NodeId, name: Name },
    Unsolicited {
        time: SimTime,
        node: NodeId,
        face: NodeId,
        name: Name,
    },
    NodeState { time: SimTime, node: NodeId, up: bool },
    LinkState {
        time: SimTime,
        a: NodeId,
        b: NodeId,
        up: bool,
    },
}

impl Record {
    pub fn time(&self) -> SimTime {
        match self {
            Record::Ping { time, .. }
            | Record::Control { time, .. }
            | Record::Drop { time, .. }
            | Record::CsHit { time, .. }
            | Record::Unsolicited { time, .. }
            | Record::NodeState { time, .. }
            | Record::LinkState { time, .. } => *time,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    /// `# run` header fields.
    pub info: BTreeMap<String, String>,
    pub prefixes: BTreeMap<NodeId, String>,
    pub records: Vec<Record>,
}

impl EventLog {
    pub fn pings(&self) -> impl Iterator<Item = &PingRecord> + '_ {
        self.records.iter().filter_map(|r| match r {
            Record::Ping { ping, .. } => Some(ping),
            _ => None,
        })
    }

    pub fn ping_records(&self) -> Vec<PingRecord> {
        self.pings().copied().collect()
    }

    pub fn node_count(&self) -> usize {
        self.prefixes.len()
    }

    pub fn duration_s(&self) -> Option<f64> {
        self.info.get("duration_s").and_then(|v| v.parse().ok())
    }

    /// Intervals during which each node was down, from the node state
    /// records. A node still down at the end has an open interval.
    pub fn node_down_intervals(&self) -> Vec<(NodeId, SimTime, SimTime)> {
        let mut open: BTreeMap<NodeId, SimTime> = BTreeMap::new();
        let mut out = Vec::new();
        for r in &self.records {
            if let Record::NodeState { time, node, up } = r {
                if *up {
                    if let Some(start) = open.remove(node) {
                        out.push((*node, start, *time));
                    }
                } else {
                    open.entry(*node).or_insert(*time);
                }
            }
        }
        out.extend(open.into_iter().map(|(n, s)| (n, s, SimTime(u64::MAX))));
        out.sort();
        out
    }

    fn ping_name(&self, p: &PingRecord) -> String {
        let prefix = self.prefixes.get(&p.target).map(String::as_str).unwrap_or("?");
        format!("/{prefix}/ping/{}/{}", p.origin, p.seq)
    }

    pub fn write_to(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        let mut buf = String::with_capacity(1 << 16);
        writeln!(buf, "{MAGIC}").unwrap();
        buf.push_str("# run");
        for (k, v) in &self.info {
            write!(buf, " {k}={v}").unwrap();
        }
        buf.push('\n');
        for (id, p) in &self.prefixes {
            writeln!(buf, "# prefix {id} {p}").unwrap();
        }
        for r in &self.records {
            self.format_record(r, &mut buf);
            if buf.len() > (1 << 16) {
                out.write_all(buf.as_bytes())?;
                buf.clear();
            }
        }
        out.write_all(buf.as_bytes())
    }

    pub fn to_text(&self) -> String {
        let mut v = Vec::new();
        self.write_to(&mut v).expect("writing to memory");
        String::from_utf8(v).expect("log is utf-8")
    }

    fn format_record(&self, r: &Record, buf: &mut String) {
        let _ = match r {
            Record::Ping { time, ping } => {
                let name = self.ping_name(ping);
                write!(
                    buf,
                    "{time} ping {} {} {name} seq={} sent={} rtt=",
                    ping.origin, ping.target, ping.seq, ping.sent
                )
                .unwrap();
                match ping.rtt {
                    Some(rtt) => writeln!(buf, "{rtt}"),
                    None => writeln!(buf, "timeout"),
                }
            }
            Record::Control {
                time,
                kind,
                from,
                to,
                name,
            } => writeln!(buf, "{time} {} {from} {to} {name}", kind.as_str()),
            Record::Drop {
                time,
                node,
                peer,
                name,
                reason,
                is_data,
                is_probe,
            } => {
                let peer = peer.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
                writeln!(
                    buf,
                    "{time} drop {node} {peer} {name} reason={} pkt={} probe={}",
                    reason.as_str(),
                    if *is_data { "data" } else { "interest" },
                    u8::from(*is_probe)
                )
            }
            Record::CsHit { time, node, name } => writeln!(buf, "{time} cs-hit {node} - {name}"),
            Record::Unsolicited {
                time,
                node,
                face,
                name,
            } => writeln!(buf, "{time} unsolicited {node} {face} {name}"),
            Record::NodeState { time, node, up } => {
                writeln!(buf, "{time} {} {node} - -", if *up { "node-up" } else { "node-down" })
            }
            Record::LinkState { time, a, b, up } => {
                writeln!(buf, "{time} {} {a} {b} -", if *up { "link-up" } else { "link-down" })
            }
        };
    }

    pub fn parse(text: &str) -> Result<EventLog> {
        let mut log = EventLog::default();
        let mut saw_magic = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let bad = |reason: &str| Error::MalformedLog {
                line: lineno,
                reason: reason.to_string(),
            };
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if line == MAGIC {
                    saw_magic = true;
                } else if let Some(fields) = rest.strip_prefix("run") {
                    for kv in fields.split_whitespace() {
                        let (k, v) = kv.split_once('=').ok_or_else(|| bad("run field without '='"))?;
                        log.info.insert(k.to_string(), v.to_string());
                    }
                } else if let Some(p) = rest.strip_prefix("prefix") {
                    let mut it = p.split_whitespace();
                    let id = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad("prefix line needs a node id"))?;
                    let label = it.next().ok_or_else(|| bad("prefix line needs a label"))?;
                    log.prefixes.insert(id, label.to_string());
                }
                continue;
            }
            if !saw_magic {
                return Err(bad("missing log header"));
            }
            let rec = parse_record(line).map_err(|r| bad(&r))?;
            log.records.push(rec);
        }
        if !saw_magic {
            return Err(Error::MalformedLog {
                line: 0,
                reason: "missing log header".into(),
            });
        }
        Ok(log)
    }
}

fn parse_record(line: &str) -> std::result::Result<Record, String> {
    let mut it = line.split_whitespace();
    let mut field = |what: &str| it.next().ok_or_else(|| format!("missing {what}"));
    let time = SimTime::parse_millis(field("time")?).ok_or("bad time")?;
    let kind = field("kind")?.to_string();
    let origin = field("origin")?.to_string();
    let target = field("target")?.to_string();
    let name = field("name")?.to_string();
    let rest: BTreeMap<&str, &str> = it
        .map(|kv| kv.split_once('=').ok_or_else(|| format!("field {kv:?} lacks '='")))
        .collect::<std::result::Result<_, _>>()?;
    let id = |s: &str| s.parse::<NodeId>().map_err(|_| format!("bad node id {s:?}"));
    let get = |k: &str| rest.get(k).copied().ok_or_else(|| format!("missing {k}="));
    let ms = |s: &str| SimTime::parse_millis(s).ok_or_else(|| format!("bad time {s:?}"));
    Ok(match kind.as_str() {
        "ping" => {
            let rtt = match get("rtt")? {
                "timeout" => None,
                v => Some(ms(v)?),
            };
            Record::Ping {
                time,
                ping: PingRecord {
                    origin: id(&origin)?,
                    target: id(&target)?,
                    seq: get("seq")?.parse().map_err(|_| "bad seq")?,
                    sent: ms(get("sent")?)?,
                    rtt,
                },
            }
        }
        "drop" => Record::Drop {
            time,
            node: id(&origin)?,
            peer: if target == "-" { None } else { Some(id(&target)?) },
            name: Name::new(name),
            reason: match get("reason")? {
                "no-route" => DropReason::NoRoute,
                "loop" => DropReason::Loop,
                "link-down" => DropReason::LinkDown,
                other => return Err(format!("unknown drop reason {other:?}")),
            },
            is_data: get("pkt")? == "data",
            is_probe: get("probe")? == "1",
        },
        "cs-hit" => Record::CsHit {
            time,
            node: id(&origin)?,
            name: Name::new(name),
        },
        "unsolicited" => Record::Unsolicited {
            time,
            node: id(&origin)?,
            face: id(&target)?,
            name: Name::new(name),
        },
        "node-up" | "node-down" => Record::NodeState {
            time,
            node: id(&origin)?,
            up: kind == "node-up",
        },
        "link-up" | "link-down" => Record::LinkState {
            time,
            a: id(&origin)?,
            b: id(&target)?,
            up: kind == "link-up",
        },
        other => match other.parse::<ControlKind>() {
            Ok(kind) => Record::Control {
                time,
                kind,
                from: id(&origin)?,
                to: id(&target)?,
                name: Name::new(name),
            },
            Err(()) => return Err(format!("unknown record kind {other:?}")),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EventLog {
        let mut log = EventLog::default();
        log.info.insert("mode".into(), "hr".into());
        log.info.insert("duration_s".into(), "10".into());
        log.prefixes.insert(0, "n0".into());
        log.prefixes.insert(1, "n1".into());
        let t = SimTime::from_millis_f64;
        log.records = vec![
            Record::Ping {
                time: t(20.5),
                ping: PingRecord {
                    origin: 0,
                    target: 1,
                    seq: 0,
                    sent: t(0.0),
                    rtt: Some(t(20.5)),
                },
            },
            Record::Ping {
                time: t(4001.0),
                ping: PingRecord {
                    origin: 1,
                    target: 0,
                    seq: 1,
                    sent: t(1.0),
                    rtt: None,
                },
            },
            Record::Control {
                time: t(3.25),
                kind: ControlKind::Probe,
                from: 0,
                to: 1,
                name: Name::new("/n1/ping/0/0"),
            },
            Record::Drop {
                time: t(5.0),
                node: 1,
                peer: None,
                name: Name::new("/n0/ping/1/1"),
                reason: DropReason::NoRoute,
                is_data: false,
                is_probe: true,
            },
            Record::CsHit {
                time: t(6.0),
                node: 1,
                name: Name::new("/x"),
            },
            Record::Unsolicited {
                time: t(6.0),
                node: 1,
                face: 0,
                name: Name::new("/x"),
            },
            Record::NodeState {
                time: t(7.0),
                node: 1,
                up: false,
            },
            Record::LinkState {
                time: t(7.0),
                a: 0,
                b: 1,
                up: false,
            },
            Record::NodeState {
                time: t(9.0),
                node: 1,
                up: true,
            },
        ];
        log
    }

    #[test]
    fn text_round_trip() {
        let log = sample();
        let text = log.to_text();
        assert!(text.contains("20.500 ping 0 1 /n1/ping/0/0 seq=0 sent=0.000 rtt=20.500\n"));
        assert!(text.contains("rtt=timeout"));
        let back = EventLog::parse(&text).unwrap();
        assert_eq!(back, log);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn down_intervals() {
        let log = sample();
        let t = SimTime::from_millis_f64;
        assert_eq!(log.node_down_intervals(), vec![(1, t(7.0), t(9.0))]);
    }

    #[test]
    fn malformed_lines_are_reported() {
        let err = EventLog::parse("# hypersim-log v1\n1.000 ping 0 1 /x seq=1\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLog { line: 2, .. }), "{err}");
        assert!(EventLog::parse("1.000 ping 0 1 /x\n").is_err());
        assert!(EventLog::parse("# hypersim-log v1\n1.000 bogus 0 1 /x\n").is_err());
    }
}
