//! The event loop. Events run in `(time, insertion order)` order; every
//! link transmission takes the link's propagation delay and processing is
//! instantaneous.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::failure::{build_sequential_failure_plan, FailureEvent, FailureTarget};
use super::scenario::{ProbeAccounting, RoutingMode, Scenario};
use super::traffic::build_ping_traffic;
use crate::error::{Error, Result};
use crate::forwarder::{Action, Data, DropReason, FaceId, Forwarder, Interest, Name, RouteKey};
use crate::geometry::HyperbolicCoordinate;
use crate::metrics::{ControlKind, EventLog, PingRecord, Record};
use crate::routing::{HrProvider, LinkStateModel, LsMessage, MultipathFactor, Outgoing, RouteProvider};
use crate::time::SimTime;
use crate::topology::{NodeId, Topology};

const NODE_STREAM_BASE: u64 = 1 << 32;
const REFRESH_STREAM: u64 = 2;
const NONCE_STREAM: u64 = 3;

#[derive(Debug)]
enum Packet {
    Interest(Interest),
    Data(Data),
    Ls(LsMessage),
}

#[derive(Debug)]
enum Event {
    Arrival {
        link: usize,
        epoch: u32,
        to: usize,
        from: NodeId,
        packet: Packet,
    },
    PitExpiry { node: usize, name: Name },
    ProbeTimer { node: usize, key: RouteKey, epoch: u64 },
    PingTick { flow: usize, seq: u32 },
    PingTimeout { name: Name },
    NodeChange { node: usize, up: bool },
    LinkChange { link: usize, up: bool },
    Detect { node: usize, neighbor: NodeId, up: bool },
    Refresh { node: usize },
}

impl Event {
    /// Events that start new activity; they are not run past the end of
    /// the experiment, while in-flight work is allowed to finish.
    fn generates(&self) -> bool {
        matches!(
            self,
            Event::ProbeTimer { .. }
                | Event::PingTick { .. }
                | Event::NodeChange { .. }
                | Event::LinkChange { .. }
                | Event::Refresh { .. }
        )
    }
}

struct Scheduled {
    time: SimTime,
    seq: u64,
    event: Event,
}

impl PartialEq for Scheduled {
    fn eq(&self, o: &Self) -> bool {
        (self.time, self.seq) == (o.time, o.seq)
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Scheduled {
    // reversed: the heap pops the earliest event
    fn cmp(&self, o: &Self) -> Ordering {
        (o.time, o.seq).cmp(&(self.time, self.seq))
    }
}

struct PendingPing {
    origin: NodeId,
    target: NodeId,
    seq: u32,
    sent: SimTime,
}

struct Engine<'a> {
    sc: &'a Scenario,
    topo: &'a Topology,
    now: SimTime,
    end: SimTime,
    stop: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Scheduled>,
    fwd: Vec<Forwarder>,
    node_up: Vec<bool>,
    link_failed: Vec<bool>,
    link_up: Vec<bool>,
    link_epoch: Vec<u32>,
    link_delay: Vec<SimTime>,
    /// Per link and direction (`a -> b`, `b -> a`), when the transmitter
    /// is next free. Only used with a finite link rate.
    link_free: Vec<[SimTime; 2]>,
    coords: Vec<HyperbolicCoordinate>,
    hr_neighbors: Vec<Vec<(FaceId, HyperbolicCoordinate)>>,
    ls: Option<LinkStateModel>,
    mpf: MultipathFactor,
    flows: Vec<(usize, NodeId)>,
    pending: HashMap<Name, PendingPing>,
    nonce_rng: ChaCha8Rng,
    log: EventLog,
    refresh_name: Name,
}

/// Loads the scenario's topology and runs it.
pub fn run_scenario(sc: &Scenario) -> Result<EventLog> {
    let topo = crate::topology::load_topology(&sc.topology, true)?;
    run(sc, &topo)
}

/// Runs `sc` on `topo` and returns the complete event log.
pub fn run(sc: &Scenario, topo: &Topology) -> Result<EventLog> {
    sc.validate()?;
    topo.ensure_connected()?;
    let plan = failure_plan(sc, topo)?;
    let mut e = Engine::new(sc, topo)?;
    for ev in &plan {
        e.schedule_failure(ev)?;
    }
    e.run_loop();
    Ok(e.log)
}

/// Explicit failures followed by the sequential plan, if any.
pub fn failure_plan(sc: &Scenario, topo: &Topology) -> Result<Vec<FailureEvent>> {
    let mut plan = Vec::new();
    for f in &sc.failures {
        let target = match (f.node, f.link) {
            (Some(n), None) => FailureTarget::Node(n),
            (None, Some([a, b])) => FailureTarget::Link(a.min(b), a.max(b)),
            _ => return Err(Error::InvalidScenario("failure must name a node or a link".into())),
        };
        plan.push(FailureEvent {
            target,
            fail: SimTime::from_secs_f64(f.fail_s),
            recover: f.recover_s.map(SimTime::from_secs_f64),
        });
    }
    if let Some(p) = &sc.sequential_failures {
        plan.extend(build_sequential_failure_plan(
            topo,
            p.count,
            SimTime::from_secs_f64(p.first_s),
            SimTime::from_secs_f64(p.period_s),
            SimTime::from_secs_f64(p.downtime_s),
        )?);
    }
    Ok(plan)
}

fn node_rng(seed: u64, id: NodeId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(NODE_STREAM_BASE + id as u64);
    rng
}

impl<'a> Engine<'a> {
    fn new(sc: &'a Scenario, topo: &'a Topology) -> Result<Self> {
        let n = topo.node_count();
        let strategy = sc.strategy_kind();
        let fwd: Vec<Forwarder> = topo
            .nodes()
            .iter()
            .map(|r| {
                Forwarder::new(
                    r.id,
                    r.prefix.clone(),
                    topo.neighbors(r.id),
                    strategy.clone(),
                    sc.forwarder.clone(),
                    node_rng(sc.seed, r.id),
                )
            })
            .collect();
        let coords: Vec<HyperbolicCoordinate> = topo.nodes().iter().map(|r| r.coord).collect();
        let hr_neighbors = topo
            .nodes()
            .iter()
            .map(|r| {
                topo.neighbors(r.id)
                    .into_iter()
                    .map(|nb| (FaceId::neighbor(nb), topo.node(nb).expect("neighbor").coord))
                    .collect()
            })
            .collect();
        let ls = (sc.routing == RoutingMode::Ls).then(|| {
            LinkStateModel::converged(topo, |id| topo.node(id).expect("node").prefix.clone())
        });

        let mut log = EventLog::default();
        let info = [
            ("mode", sc.routing.to_string()),
            ("strategy", sc.strategy.to_string()),
            ("mpf", sc.multipath_factor.to_string()),
            ("seed", sc.seed.to_string()),
            ("nodes", n.to_string()),
            ("links", topo.link_count().to_string()),
            ("duration_s", sc.duration_s.to_string()),
            ("alpha", sc.traffic.alpha.to_string()),
        ];
        for (k, v) in info {
            log.info.insert(k.to_string(), v);
        }
        for r in topo.nodes() {
            log.prefixes.insert(r.id, r.prefix.clone());
        }

        let mut nonce_rng = ChaCha8Rng::seed_from_u64(sc.seed);
        nonce_rng.set_stream(NONCE_STREAM);

        let mut e = Engine {
            sc,
            topo,
            now: SimTime::ZERO,
            end: SimTime::from_secs_f64(sc.duration_s),
            stop: SimTime::from_secs_f64(sc.stop_s()),
            next_seq: 0,
            queue: BinaryHeap::new(),
            fwd,
            node_up: vec![true; n],
            link_failed: vec![false; topo.link_count()],
            link_up: vec![true; topo.link_count()],
            link_epoch: vec![0; topo.link_count()],
            link_delay: topo
                .links()
                .iter()
                .map(|l| SimTime::from_millis_f64(l.delay_ms))
                .collect(),
            link_free: vec![[SimTime::ZERO; 2]; topo.link_count()],
            coords,
            hr_neighbors,
            ls,
            mpf: sc.multipath_factor,
            flows: Vec::new(),
            pending: HashMap::new(),
            nonce_rng,
            log,
            refresh_name: Name::new("/localhop/sync/0"),
        };

        let flows = build_ping_traffic(
            topo,
            sc.traffic.alpha,
            sc.seed,
            SimTime::from_secs_f64(sc.traffic.start_s),
            SimTime::from_secs_f64(sc.traffic.start_spread_s),
        )?;
        for (i, f) in flows.iter().enumerate() {
            let origin = topo.index_of(f.origin).expect("flow origin");
            e.flows.push((origin, f.target));
            if f.first_send < e.stop {
                e.schedule(f.first_send, Event::PingTick { flow: i, seq: 0 });
            }
        }

        if e.ls.is_some() && sc.linkstate.refresh_period_s > 0.0 {
            let period = SimTime::from_secs_f64(sc.linkstate.refresh_period_s);
            let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
            rng.set_stream(REFRESH_STREAM);
            for node in 0..n {
                let phase = SimTime(rng.gen_range(0..period.as_micros().max(1)));
                e.schedule(phase, Event::Refresh { node });
            }
        }
        Ok(e)
    }

    fn schedule(&mut self, time: SimTime, event: Event) {
        debug_assert!(time >= self.now, "event scheduled in the past");
        self.queue.push(Scheduled {
            time,
            seq: self.next_seq,
            event,
        });
        self.next_seq += 1;
    }

    fn idx(&self, id: NodeId) -> usize {
        self.topo.index_of(id).expect("known node")
    }

    fn id(&self, idx: usize) -> NodeId {
        self.topo.nodes()[idx].id
    }

    fn schedule_failure(&mut self, f: &FailureEvent) -> Result<()> {
        let (fail, recover) = match f.target {
            FailureTarget::Node(id) => {
                let node = self
                    .topo
                    .index_of(id)
                    .ok_or_else(|| Error::InvalidScenario(format!("failure names unknown node {id}")))?;
                (Event::NodeChange { node, up: false }, Event::NodeChange { node, up: true })
            }
            FailureTarget::Link(a, b) => {
                let link = self
                    .topo
                    .link_between(a, b)
                    .ok_or_else(|| Error::InvalidScenario(format!("failure names unknown link {a}-{b}")))?;
                (Event::LinkChange { link, up: false }, Event::LinkChange { link, up: true })
            }
        };
        self.schedule(f.fail, fail);
        if let Some(r) = f.recover {
            self.schedule(r, recover);
        }
        Ok(())
    }

    fn run_loop(&mut self) {
        let mut processed: u64 = 0;
        while let Some(Scheduled { time, event, .. }) = self.queue.pop() {
            if time >= self.end && event.generates() {
                continue;
            }
            self.now = time;
            processed += 1;
            self.dispatch(event);
        }
        // Anything still pending never got an answer.
        let mut rest: Vec<(Name, PendingPing)> = self.pending.drain().collect();
        rest.sort_by_key(|(_, p)| (p.sent, p.origin, p.target, p.seq));
        for (_, p) in rest {
            self.log_ping(p, None);
        }
        log::debug!(
            "{} {} run: {processed} events, {} records",
            self.sc.routing,
            self.sc.strategy,
            self.log.records.len()
        );
    }

    fn dispatch(&mut self, event: Event) {
        match event {
            Event::Arrival {
                link,
                epoch,
                to,
                from,
                packet,
            } => self.on_arrival(link, epoch, to, from, packet),
            Event::PitExpiry { node, name } => {
                if self.node_up[node] {
                    self.fwd[node].on_pit_expiry(&name, self.now);
                }
            }
            Event::ProbeTimer { node, key, epoch } => {
                if self.node_up[node] {
                    let now = self.now;
                    let actions = self.with_provider(node, |f, p| f.on_probe_timer(&key, epoch, now, p));
                    self.apply(node, actions, true);
                }
            }
            Event::PingTick { flow, seq } => self.on_ping_tick(flow, seq),
            Event::PingTimeout { name } => {
                if let Some(p) = self.pending.remove(&name) {
                    self.log_ping(p, None);
                }
            }
            Event::NodeChange { node, up } => self.set_node(node, up),
            Event::LinkChange { link, up } => {
                self.link_failed[link] = !up;
                self.update_link(link);
            }
            Event::Detect { node, neighbor, up } => self.on_detect(node, neighbor, up),
            Event::Refresh { node } => {
                let period = SimTime::from_secs_f64(self.sc.linkstate.refresh_period_s);
                if self.node_up[node] {
                    let id = self.id(node);
                    let out = self.ls.as_ref().map(|ls| ls.refresh(id)).unwrap_or_default();
                    for o in out {
                        // counted, not delivered: an empty notification
                        // changes nothing at the receiver
                        self.log.records.push(Record::Control {
                            time: self.now,
                            kind: ControlKind::SyncNotify,
                            from: o.from,
                            to: o.to,
                            name: self.refresh_name.clone(),
                        });
                    }
                }
                self.schedule(self.now + period, Event::Refresh { node });
            }
        }
    }

    fn with_provider<R>(&mut self, node: usize, f: impl FnOnce(&mut Forwarder, &mut dyn RouteProvider) -> R) -> R {
        let fwd = &mut self.fwd[node];
        match &mut self.ls {
            Some(ls) => {
                let mut p = ls.provider(fwd.id(), self.mpf);
                f(fwd, &mut p)
            }
            None => {
                let mut p = HrProvider {
                    neighbors: &self.hr_neighbors[node],
                    mpf: self.mpf,
                };
                f(fwd, &mut p)
            }
        }
    }

    fn on_ping_tick(&mut self, flow: usize, seq: u32) {
        let (origin, target) = self.flows[flow];
        let next = self.now + SimTime::from_secs_f64(self.sc.traffic.ping_interval_s);
        if next < self.stop {
            self.schedule(next, Event::PingTick { flow, seq: seq + 1 });
        }
        if !self.node_up[origin] {
            return;
        }
        let origin_id = self.id(origin);
        let t = self.idx(target);
        let name = Name::ping(&self.topo.nodes()[t].prefix, origin_id, seq);
        let interest = Interest {
            name: name.clone(),
            dest_coord: (self.sc.routing == RoutingMode::Hr).then_some(self.coords[t]),
            nonce: self.nonce_rng.gen(),
            lifetime: self.sc.forwarder.interest_lifetime(),
            is_probe: false,
            origin: origin_id,
            send_time: self.now,
        };
        self.pending.insert(
            name.clone(),
            PendingPing {
                origin: origin_id,
                target,
                seq,
                sent: self.now,
            },
        );
        self.schedule(self.now + interest.lifetime, Event::PingTimeout { name });
        let now = self.now;
        let actions = self.with_provider(origin, |f, p| f.on_interest(FaceId::LOCAL, interest, now, p));
        self.apply(origin, actions, false);
    }

    fn log_ping(&mut self, p: PendingPing, rtt: Option<SimTime>) {
        self.log.records.push(Record::Ping {
            time: self.now,
            ping: PingRecord {
                origin: p.origin,
                target: p.target,
                seq: p.seq,
                sent: p.sent,
                rtt,
            },
        });
    }

    fn apply(&mut self, node: usize, actions: Vec<Action>, probe_origin: bool) {
        let me = self.id(node);
        for a in actions {
            match a {
                Action::SendInterest { face, interest } => {
                    if interest.is_probe
                        && (probe_origin || self.sc.probe_accounting == ProbeAccounting::PerLink)
                    {
                        self.log.records.push(Record::Control {
                            time: self.now,
                            kind: ControlKind::Probe,
                            from: me,
                            to: face.0,
                            name: interest.name.clone(),
                        });
                    }
                    self.transmit(node, face.0, Packet::Interest(interest));
                }
                Action::SendData { face, data } => self.transmit(node, face.0, Packet::Data(data)),
                Action::DeliverLocal { data } => {
                    let mine = self.pending.get(&data.name).is_some_and(|p| p.origin == me);
                    if mine {
                        let p = self.pending.remove(&data.name).expect("checked");
                        let rtt = self.now - p.sent;
                        self.log_ping(p, Some(rtt));
                    }
                }
                Action::ArmPitTimer { name, at } => self.schedule(at, Event::PitExpiry { node, name }),
                Action::ArmProbeTimer { key, epoch, at } => {
                    self.schedule(at, Event::ProbeTimer { node, key, epoch })
                }
                Action::Drop {
                    reason,
                    name,
                    is_probe,
                } => self.log.records.push(Record::Drop {
                    time: self.now,
                    node: me,
                    peer: None,
                    name,
                    reason,
                    is_data: false,
                    is_probe,
                }),
                Action::CsHit { name } => self.log.records.push(Record::CsHit {
                    time: self.now,
                    node: me,
                    name,
                }),
                Action::Unsolicited { name, face } => self.log.records.push(Record::Unsolicited {
                    time: self.now,
                    node: me,
                    face: face.0,
                    name,
                }),
            }
        }
    }

    fn log_link_drop(&mut self, node: NodeId, peer: NodeId, packet: &Packet) {
        let (name, is_data, is_probe) = match packet {
            Packet::Interest(i) => (i.name.clone(), false, i.is_probe),
            Packet::Data(d) => (d.name.clone(), true, false),
            Packet::Ls(_) => return,
        };
        self.log.records.push(Record::Drop {
            time: self.now,
            node,
            peer: Some(peer),
            name,
            reason: DropReason::LinkDown,
            is_data,
            is_probe,
        });
    }

    fn transmit(&mut self, from: usize, to: NodeId, packet: Packet) {
        let from_id = self.id(from);
        let link = self.topo.link_between(from_id, to).expect("faces map to links");
        if !self.link_up[link] {
            self.log_link_drop(from_id, to, &packet);
            return;
        }
        let mut depart = self.now;
        if let Some(rate) = self.sc.network.link_rate_pps {
            let dir = usize::from(from_id != self.topo.links()[link].a);
            let slot = &mut self.link_free[link][dir];
            depart = depart.max(*slot) + SimTime::from_secs_f64(1.0 / rate);
            *slot = depart;
        }
        let at = depart + self.link_delay[link];
        let to_idx = self.idx(to);
        self.schedule(
            at,
            Event::Arrival {
                link,
                epoch: self.link_epoch[link],
                to: to_idx,
                from: from_id,
                packet,
            },
        );
    }

    fn on_arrival(&mut self, link: usize, epoch: u32, to: usize, from: NodeId, packet: Packet) {
        if self.link_epoch[link] != epoch || !self.link_up[link] || !self.node_up[to] {
            let me = self.id(to);
            self.log_link_drop(me, from, &packet);
            return;
        }
        let now = self.now;
        match packet {
            Packet::Interest(i) => {
                let actions = self.with_provider(to, |f, p| f.on_interest(FaceId::neighbor(from), i, now, p));
                self.apply(to, actions, false);
            }
            Packet::Data(d) => {
                let actions = self.fwd[to].on_data(FaceId::neighbor(from), d, now);
                self.apply(to, actions, false);
            }
            Packet::Ls(msg) => {
                let me = self.id(to);
                let out = self.ls.as_mut().expect("link-state mode").on_message(me, from, msg);
                self.send_ls(out);
            }
        }
    }

    fn send_ls(&mut self, out: Vec<Outgoing>) {
        for o in out {
            let name = match &o.msg {
                LsMessage::SyncNotify(entries) => Name::new(format!("/localhop/sync/{}", entries.len())),
                LsMessage::LsaInterest { key, version } => Name::new(format!(
                    "/localhop/lsa/{}/{}/{version}",
                    key.originator,
                    key.kind.as_str()
                )),
                LsMessage::LsaData(lsa) => Name::new(format!(
                    "/localhop/lsa/{}/{}/{}",
                    lsa.originator,
                    lsa.kind.as_str(),
                    lsa.version
                )),
            };
            let kind = match &o.msg {
                LsMessage::SyncNotify(_) => ControlKind::SyncNotify,
                LsMessage::LsaInterest { .. } => ControlKind::LsaInterest,
                LsMessage::LsaData(_) => ControlKind::LsaData,
            };
            self.log.records.push(Record::Control {
                time: self.now,
                kind,
                from: o.from,
                to: o.to,
                name,
            });
            let from = self.idx(o.from);
            self.transmit(from, o.to, Packet::Ls(o.msg));
        }
    }

    fn set_node(&mut self, node: usize, up: bool) {
        if self.node_up[node] == up {
            return;
        }
        self.node_up[node] = up;
        let id = self.id(node);
        self.log.records.push(Record::NodeState {
            time: self.now,
            node: id,
            up,
        });
        if up {
            // back from a reboot with no soft state; faces come up as the
            // links are detected
            let f = &mut self.fwd[node];
            f.reset();
            for nb in self.topo.neighbors(id) {
                f.set_face(FaceId::neighbor(nb), false);
            }
            if let Some(ls) = &mut self.ls {
                ls.node_reset(id);
            }
        }
        let idx = self.topo.index_of(id).expect("node");
        for &l in self.topo.incident_links(idx).to_vec().iter() {
            self.update_link(l);
        }
    }

    fn update_link(&mut self, link: usize) {
        let l = &self.topo.links()[link];
        let (a, b) = (self.idx(l.a), self.idx(l.b));
        let phys = !self.link_failed[link] && self.node_up[a] && self.node_up[b];
        if phys == self.link_up[link] {
            return;
        }
        self.link_up[link] = phys;
        if !phys {
            self.link_epoch[link] += 1;
        }
        self.log.records.push(Record::LinkState {
            time: self.now,
            a: l.a,
            b: l.b,
            up: phys,
        });
        let at = self.now + SimTime::from_millis_f64(self.sc.network.detection_delay_ms);
        for (me, other) in [(a, l.b), (b, l.a)] {
            if self.node_up[me] {
                self.schedule(
                    at,
                    Event::Detect {
                        node: me,
                        neighbor: other,
                        up: phys,
                    },
                );
            }
        }
    }

    fn on_detect(&mut self, node: usize, neighbor: NodeId, up: bool) {
        if !self.node_up[node] {
            return;
        }
        let id = self.id(node);
        let link = self.topo.link_between(id, neighbor).expect("link");
        if self.link_up[link] != up {
            return;
        }
        self.fwd[node].set_face(FaceId::neighbor(neighbor), up);
        let out = match &mut self.ls {
            Some(ls) if up => ls.link_up(id, neighbor),
            Some(ls) => ls.link_down(id, neighbor),
            None => Vec::new(),
        };
        self.send_ls(out);
    }
}
