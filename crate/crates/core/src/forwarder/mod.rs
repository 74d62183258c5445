//! Per-node NDN forwarding: Content Store, PIT, Route Cache and faces.
//!
//! A [`Forwarder`] reacts to packets and timers by returning [`Action`]s;
//! the simulation engine carries them out. Next hops come from a
//! [`RouteProvider`] passed in with each call.

mod packet;
mod route;
mod tables;

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use packet::{Data, FaceId, Interest, Name};
pub use route::{InterestTemplate, NextHopStat, RouteEntry, RouteKey};
pub use tables::{ContentStore, DeadNonceList, InRecord, OutRecord, Pit, PitEntry};

use crate::routing::RouteProvider;
use crate::strategy::{self, AsfParams, StrategyKind};
use crate::time::SimTime;
use crate::topology::NodeId;

/// Marks a route entry whose ranking must be recomputed before use.
const STALE: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForwarderConfig {
    pub interest_lifetime_ms: f64,
    pub cs_capacity: usize,
    /// Freshness period stamped on produced Data. Zero keeps probes (which
    /// reuse the name of an answered Interest) from being served by caches.
    pub data_freshness_ms: f64,
    /// Route Cache size bound; `None` is unbounded.
    pub route_cache_limit: Option<usize>,
}

impl Default for ForwarderConfig {
    fn default() -> Self {
        Self {
            interest_lifetime_ms: 4000.0,
            cs_capacity: 65536,
            data_freshness_ms: 0.0,
            route_cache_limit: None,
        }
    }
}

impl ForwarderConfig {
    pub fn interest_lifetime(&self) -> SimTime {
        SimTime::from_millis_f64(self.interest_lifetime_ms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    NoRoute,
    Loop,
    LinkDown,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::NoRoute => "no-route",
            DropReason::Loop => "loop",
            DropReason::LinkDown => "link-down",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    SendInterest { face: FaceId, interest: Interest },
    SendData { face: FaceId, data: Data },
    /// Data for the node's own consumer.
    DeliverLocal { data: Data },
    ArmPitTimer { name: Name, at: SimTime },
    ArmProbeTimer { key: RouteKey, epoch: u64, at: SimTime },
    Drop { reason: DropReason, name: Name, is_probe: bool },
    CsHit { name: Name },
    Unsolicited { name: Name, face: FaceId },
}

pub struct Forwarder {
    id: NodeId,
    prefix: String,
    faces: BTreeMap<FaceId, bool>,
    pit: Pit,
    cs: ContentStore,
    dead_nonces: DeadNonceList,
    routes: BTreeMap<RouteKey, RouteEntry>,
    strategy: StrategyKind,
    rng: ChaCha8Rng,
    cfg: ForwarderConfig,
    next_epoch: u64,
}

impl Forwarder {
    pub fn new(
        id: NodeId,
        prefix: impl Into<String>,
        neighbors: impl IntoIterator<Item = NodeId>,
        strategy: StrategyKind,
        cfg: ForwarderConfig,
        rng: ChaCha8Rng,
    ) -> Self {
        Self {
            id,
            prefix: prefix.into(),
            faces: neighbors.into_iter().map(|n| (FaceId::neighbor(n), true)).collect(),
            pit: Pit::default(),
            cs: ContentStore::new(cfg.cs_capacity),
            dead_nonces: DeadNonceList::default(),
            routes: BTreeMap::new(),
            strategy,
            rng,
            cfg,
            next_epoch: 0,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn pit(&self) -> &Pit {
        &self.pit
    }

    pub fn route(&self, key: &RouteKey) -> Option<&RouteEntry> {
        self.routes.get(key)
    }

    pub fn route_count(&self) -> usize {
        self.routes.len()
    }

    pub fn face_is_up(&self, face: FaceId) -> bool {
        self.faces.get(&face).copied().unwrap_or(false)
    }

    pub fn faces(&self) -> impl Iterator<Item = (FaceId, bool)> + '_ {
        self.faces.iter().map(|(f, up)| (*f, *up))
    }

    /// Applies a detected face state change. A face going down leaves every
    /// route entry at once; a face coming up makes every ranking stale so it
    /// is recomputed on next use.
    pub fn set_face(&mut self, face: FaceId, up: bool) {
        let Some(state) = self.faces.get_mut(&face) else {
            return;
        };
        if *state == up {
            return;
        }
        *state = up;
        for entry in self.routes.values_mut() {
            if up {
                entry.revision = STALE;
            } else {
                entry.next_hops.retain(|h| h.face != face);
            }
        }
    }

    /// Forgets all soft state, as after a reboot. Face states are kept.
    pub fn reset(&mut self) {
        self.pit.clear();
        self.cs.clear();
        self.dead_nonces.clear();
        self.routes.clear();
    }

    fn asf_params(&self) -> AsfParams {
        match &self.strategy {
            StrategyKind::Asf(p) => p.clone(),
            StrategyKind::BestRoute => AsfParams::default(),
        }
    }

    fn reply(&self, face: FaceId, data: Data, out: &mut Vec<Action>) {
        if face.is_local() {
            out.push(Action::DeliverLocal { data });
        } else {
            out.push(Action::SendData { face, data });
        }
    }

    fn route_key(interest: &Interest) -> RouteKey {
        match interest.dest_coord {
            Some(c) => RouteKey::Coord(c),
            None => RouteKey::Prefix(interest.name.first_component().to_string()),
        }
    }

    /// Looks up (or creates) the route entry for `key`, re-ranking it if the
    /// provider has moved on.
    fn prepare_route(
        &mut self,
        key: &RouteKey,
        now: SimTime,
        provider: &mut dyn RouteProvider,
        out: &mut Vec<Action>,
    ) {
        let faces = &self.faces;
        let live = |f: FaceId| faces.get(&f).copied().unwrap_or(false);
        match self.routes.get_mut(key) {
            Some(entry) => {
                if entry.revision != provider.revision() {
                    let ranked = provider.next_hops(key, &live);
                    entry.rerank(ranked, provider.revision());
                }
            }
            None => {
                let ranked = provider.next_hops(key, &live);
                let mut entry = RouteEntry::new(key.clone(), ranked, self.next_epoch, provider.revision());
                self.next_epoch += 1;
                if let StrategyKind::Asf(params) = &self.strategy {
                    let at = strategy::first_probe_time(now, params, &mut self.rng);
                    entry.probe_at = Some(at);
                    out.push(Action::ArmProbeTimer {
                        key: key.clone(),
                        epoch: entry.epoch,
                        at,
                    });
                }
                self.routes.insert(key.clone(), entry);
                self.enforce_cache_limit(key);
            }
        }
    }

    fn enforce_cache_limit(&mut self, keep: &RouteKey) {
        let Some(limit) = self.cfg.route_cache_limit else {
            return;
        };
        while self.routes.len() > limit.max(1) {
            let victim = self
                .routes
                .iter()
                .filter(|(k, _)| *k != keep)
                .min_by_key(|(_, e)| e.last_used)
                .map(|(k, _)| k.clone());
            match victim {
                Some(k) => {
                    self.routes.remove(&k);
                }
                None => break,
            }
        }
    }

    pub fn on_interest(
        &mut self,
        face: FaceId,
        interest: Interest,
        now: SimTime,
        provider: &mut dyn RouteProvider,
    ) -> Vec<Action> {
        let mut out = Vec::new();
        let name = interest.name.clone();

        if let Some(data) = self.cs.lookup(&name, now) {
            let data = data.clone();
            out.push(Action::CsHit { name });
            self.reply(face, data, &mut out);
            return out;
        }

        let looping = self.pit.get(&name).is_some_and(|e| e.has_nonce(interest.nonce))
            || self.dead_nonces.contains(&name, interest.nonce, now);
        if looping {
            out.push(Action::Drop {
                reason: DropReason::Loop,
                name,
                is_probe: interest.is_probe,
            });
            return out;
        }

        if name.first_component() == self.prefix {
            let data = Data {
                name,
                producer: self.id,
                payload_size: 0,
                freshness: SimTime::from_millis_f64(self.cfg.data_freshness_ms),
            };
            self.cs.insert(data.clone(), now);
            self.reply(face, data, &mut out);
            return out;
        }

        let existing = self.pit.get(&name).is_some();
        let pit_entry = self.pit.get_or_insert(&name);
        let expiry = pit_entry.insert_in_record(face, interest.nonce, now, interest.lifetime);
        out.push(Action::ArmPitTimer {
            name: name.clone(),
            at: expiry,
        });
        if existing && !interest.is_probe {
            return out;
        }

        let key = Self::route_key(&interest);
        if let Some(e) = self.pit.get_mut(&name) {
            e.route_key = Some(key.clone());
        }
        self.prepare_route(&key, now, provider, &mut out);
        let entry = self.routes.get_mut(&key).expect("route entry just prepared");
        entry.last_used = now;
        if !interest.is_probe {
            entry.active = true;
            entry.last_interest = Some(InterestTemplate {
                name: name.clone(),
                dest_coord: interest.dest_coord,
            });
        }

        match self.strategy.select(&entry.next_hops, face) {
            Ok(next) => {
                self.pit
                    .get_mut(&name)
                    .expect("pit entry")
                    .insert_out_record(next, interest.nonce, now);
                out.push(Action::SendInterest {
                    face: next,
                    interest,
                });
            }
            Err(_) => out.push(Action::Drop {
                reason: DropReason::NoRoute,
                name,
                is_probe: interest.is_probe,
            }),
        }
        out
    }

    pub fn on_data(&mut self, face: FaceId, data: Data, now: SimTime) -> Vec<Action> {
        let mut out = Vec::new();
        let sent = self
            .pit
            .get(&data.name)
            .and_then(|e| e.out_record(face).map(|r| (r.sent, e.route_key.clone())));
        let Some((sent, key)) = sent else {
            out.push(Action::Unsolicited {
                name: data.name,
                face,
            });
            return out;
        };
        let alpha = self.asf_params().srtt_alpha;
        if let Some(stat) = key
            .as_ref()
            .and_then(|k| self.routes.get_mut(k))
            .and_then(|r| r.stat_mut(face))
        {
            let rtt = (now - sent).as_millis_f64();
            strategy::update_srtt(stat, rtt, now, alpha);
        }
        self.cs.insert(data.clone(), now);
        let entry = self.pit.remove(&data.name).expect("pit entry checked above");
        self.bury_nonces(&entry, now);
        for rec in &entry.in_records {
            if rec.face != face {
                self.reply(rec.face, data.clone(), &mut out);
            }
        }
        out
    }

    fn bury_nonces(&mut self, entry: &PitEntry, now: SimTime) {
        let until = now + self.cfg.interest_lifetime();
        for n in entry
            .in_records
            .iter()
            .map(|r| r.nonce)
            .chain(entry.out_records.iter().map(|r| r.nonce))
        {
            self.dead_nonces.insert(entry.name.clone(), n, until);
        }
    }

    /// Called when a PIT timer fires. Every face the Interest went out on
    /// is marked as timing out.
    pub fn on_pit_expiry(&mut self, name: &Name, now: SimTime) -> Vec<FaceId> {
        match self.pit.get(name) {
            Some(e) if e.expiry <= now => {}
            _ => return Vec::new(),
        }
        let entry = self.pit.remove(name).expect("checked above");
        self.bury_nonces(&entry, now);
        let faces: Vec<FaceId> = entry.out_records.iter().map(|r| r.face).collect();
        if let Some(route) = entry.route_key.as_ref().and_then(|k| self.routes.get_mut(k)) {
            for f in &faces {
                if let Some(stat) = route.stat_mut(*f) {
                    strategy::mark_timeout(stat);
                }
            }
        }
        faces
    }

    /// Called when a probe timer fires. Re-arms the timer and, if the entry
    /// saw traffic since the last probe, sends one probe Interest.
    pub fn on_probe_timer(
        &mut self,
        key: &RouteKey,
        epoch: u64,
        now: SimTime,
        provider: &mut dyn RouteProvider,
    ) -> Vec<Action> {
        let mut out = Vec::new();
        let StrategyKind::Asf(params) = self.strategy.clone() else {
            return out;
        };
        match self.routes.get(key) {
            Some(e) if e.epoch == epoch => {}
            _ => return out,
        }
        self.prepare_route(key, now, provider, &mut out);
        let entry = self.routes.get_mut(key).expect("route entry exists");
        let at = strategy::next_probe_time(now, &params);
        entry.probe_at = Some(at);
        out.push(Action::ArmProbeTimer {
            key: key.clone(),
            epoch,
            at,
        });
        if !std::mem::replace(&mut entry.active, false) {
            return out;
        }
        let Some(template) = entry.last_interest.clone() else {
            return out;
        };
        let Some(face) = strategy::choose_probe_face(&entry.next_hops, params.skip_single_hop_probe, &mut self.rng)
        else {
            return out;
        };
        let interest = Interest {
            name: template.name.clone(),
            dest_coord: template.dest_coord,
            nonce: self.rng.gen(),
            lifetime: self.cfg.interest_lifetime(),
            is_probe: true,
            origin: self.id,
            send_time: now,
        };
        let pit_entry = self.pit.get_or_insert(&template.name);
        let expiry = pit_entry.insert_in_record(FaceId::LOCAL, interest.nonce, now, interest.lifetime);
        pit_entry.insert_out_record(face, interest.nonce, now);
        pit_entry.route_key = Some(key.clone());
        out.push(Action::ArmPitTimer {
            name: template.name,
            at: expiry,
        });
        out.push(Action::SendInterest { face, interest });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HyperbolicCoordinate;
    use crate::routing::{HrProvider, MultipathFactor};
    use rand_chacha::rand_core::SeedableRng;

    struct Fixed(Vec<(FaceId, f64)>);

    impl RouteProvider for Fixed {
        fn revision(&self) -> u64 {
            0
        }
        fn next_hops(&mut self, _: &RouteKey, live: &dyn Fn(FaceId) -> bool) -> Vec<(FaceId, f64)> {
            self.0.iter().filter(|(f, _)| live(*f)).copied().collect()
        }
    }

    fn fwd(strategy: StrategyKind) -> Forwarder {
        Forwarder::new(
            0,
            "n0",
            [1, 2, 3],
            strategy,
            ForwarderConfig::default(),
            ChaCha8Rng::seed_from_u64(1),
        )
    }

    fn interest(name: &str, nonce: u64) -> Interest {
        Interest {
            name: Name::new(name),
            dest_coord: None,
            nonce,
            lifetime: SimTime::from_secs(4),
            is_probe: false,
            origin: 9,
            send_time: SimTime::ZERO,
        }
    }

    fn data(name: &str) -> Data {
        Data {
            name: Name::new(name),
            producer: 5,
            payload_size: 0,
            freshness: SimTime::from_secs(10),
        }
    }

    fn sends(actions: &[Action]) -> Vec<FaceId> {
        actions
            .iter()
            .filter_map(|a| match a {
                Action::SendInterest { face, .. } => Some(*face),
                _ => None,
            })
            .collect()
    }

    fn provider() -> Fixed {
        Fixed(vec![(FaceId(1), 1.0), (FaceId(2), 2.0), (FaceId(3), 3.0)])
    }

    #[test]
    fn cs_hit_answers_on_arrival_face() {
        let mut f = fwd(StrategyKind::BestRoute);
        let mut p = provider();
        let t = SimTime::ZERO;
        f.on_interest(FaceId(2), interest("/n5/x", 1), t, &mut p);
        f.on_data(FaceId(1), data("/n5/x"), t);
        let acts = f.on_interest(FaceId(3), interest("/n5/x", 2), t, &mut p);
        assert_eq!(acts.len(), 2);
        assert!(matches!(acts[0], Action::CsHit { .. }));
        assert!(matches!(&acts[1], Action::SendData { face, .. } if *face == FaceId(3)));
    }

    #[test]
    fn duplicate_nonce_is_dropped() {
        let mut f = fwd(StrategyKind::BestRoute);
        let mut p = provider();
        f.on_interest(FaceId(2), interest("/n5/x", 7), SimTime::ZERO, &mut p);
        let acts = f.on_interest(FaceId(3), interest("/n5/x", 7), SimTime::ZERO, &mut p);
        assert!(matches!(acts[..], [Action::Drop { reason: DropReason::Loop, .. }]));
    }

    #[test]
    fn second_consumer_is_aggregated() {
        let mut f = fwd(StrategyKind::BestRoute);
        let mut p = provider();
        let a = f.on_interest(FaceId(2), interest("/n5/x", 1), SimTime::ZERO, &mut p);
        let b = f.on_interest(FaceId(3), interest("/n5/x", 2), SimTime::ZERO, &mut p);
        assert_eq!(sends(&a), vec![FaceId(1)]);
        assert!(sends(&b).is_empty());
        let e = f.pit().get(&Name::new("/n5/x")).unwrap();
        assert_eq!(e.in_records.len(), 2);
        assert_eq!(e.out_records.len(), 1);
        let acts = f.on_data(FaceId(1), data("/n5/x"), SimTime(10));
        let back: Vec<FaceId> = acts
            .iter()
            .filter_map(|a| match a {
                Action::SendData { face, .. } => Some(*face),
                _ => None,
            })
            .collect();
        assert_eq!(back, vec![FaceId(2), FaceId(3)]);
        assert!(f.pit().is_empty());
    }

    #[test]
    fn probe_for_aggregated_name_is_forwarded() {
        let mut f = fwd(StrategyKind::Asf(AsfParams::default()));
        let mut p = provider();
        f.on_interest(FaceId(2), interest("/n5/x", 1), SimTime::ZERO, &mut p);
        let mut probe = interest("/n5/x", 2);
        probe.is_probe = true;
        let acts = f.on_interest(FaceId(2), probe, SimTime(5), &mut p);
        assert_eq!(sends(&acts), vec![FaceId(1)]);
    }

    #[test]
    fn unsolicited_data() {
        let mut f = fwd(StrategyKind::BestRoute);
        let acts = f.on_data(FaceId(1), data("/n5/none"), SimTime::ZERO);
        assert!(matches!(acts[..], [Action::Unsolicited { .. }]));
        // Data on a face the Interest never went out on
        let mut p = provider();
        f.on_interest(FaceId(2), interest("/n5/x", 1), SimTime::ZERO, &mut p);
        let acts = f.on_data(FaceId(3), data("/n5/x"), SimTime::ZERO);
        assert!(matches!(acts[..], [Action::Unsolicited { .. }]));
    }

    #[test]
    fn rtt_sample_updates_only_the_returning_face() {
        let mut f = fwd(StrategyKind::Asf(AsfParams::default()));
        let mut p = provider();
        f.on_interest(FaceId::LOCAL, interest("/n5/x", 1), SimTime::ZERO, &mut p);
        let acts = f.on_data(FaceId(1), data("/n5/x"), SimTime::from_millis_f64(30.0));
        assert!(matches!(acts[..], [Action::DeliverLocal { .. }]));
        let e = f.route(&RouteKey::Prefix("n5".into())).unwrap();
        assert_eq!(e.stat(FaceId(1)).unwrap().srtt, Some(30.0));
        assert_eq!(e.stat(FaceId(2)).unwrap().srtt, None);
    }

    #[test]
    fn expiry_marks_every_out_face() {
        let mut f = fwd(StrategyKind::Asf(AsfParams::default()));
        let mut p = provider();
        let name = Name::new("/n5/x");
        f.on_interest(FaceId::LOCAL, interest("/n5/x", 1), SimTime::ZERO, &mut p);
        let key = RouteKey::Prefix("n5".into());
        let epoch = f.route(&key).unwrap().epoch;
        // a probe goes to the cheapest unmeasured face, which is the same
        // face; force a second out-record via another face by timing it out
        f.on_probe_timer(&key, epoch, SimTime(10), &mut p);
        f.pit.get_mut(&name).unwrap().insert_out_record(FaceId(2), 3, SimTime(10));
        assert!(f.on_pit_expiry(&name, SimTime(1)).is_empty(), "not yet expired");
        let mut faces = f.on_pit_expiry(&name, SimTime::from_secs(5));
        faces.sort();
        assert_eq!(faces, vec![FaceId(1), FaceId(2)]);
        let e = f.route(&key).unwrap();
        assert!(e.stat(FaceId(1)).unwrap().timed_out);
        assert!(e.stat(FaceId(2)).unwrap().timed_out);
        assert!(!e.stat(FaceId(3)).unwrap().timed_out);
        // an entry already satisfied produces nothing
        assert!(f.on_pit_expiry(&name, SimTime::from_secs(9)).is_empty());
    }

    #[test]
    fn no_route_keeps_pit_entry() {
        let mut f = fwd(StrategyKind::BestRoute);
        let mut p = Fixed(vec![(FaceId(2), 1.0)]);
        let acts = f.on_interest(FaceId(2), interest("/n5/x", 1), SimTime::ZERO, &mut p);
        assert!(acts
            .iter()
            .any(|a| matches!(a, Action::Drop { reason: DropReason::NoRoute, .. })));
        assert_eq!(f.pit().len(), 1);
    }

    #[test]
    fn producer_answers() {
        let mut f = fwd(StrategyKind::BestRoute);
        let mut p = provider();
        let acts = f.on_interest(FaceId(1), interest("/n0/ping/4/1", 1), SimTime::ZERO, &mut p);
        assert!(matches!(&acts[..], [Action::SendData { face, data }] if *face == FaceId(1) && data.producer == 0));
    }

    #[test]
    fn probes_only_active_entries() {
        let mut f = fwd(StrategyKind::Asf(AsfParams::default()));
        let mut p = provider();
        let acts = f.on_interest(FaceId::LOCAL, interest("/n5/x", 1), SimTime::ZERO, &mut p);
        let (key, epoch, at) = acts
            .iter()
            .find_map(|a| match a {
                Action::ArmProbeTimer { key, epoch, at } => Some((key.clone(), *epoch, *at)),
                _ => None,
            })
            .unwrap();
        assert!(at <= SimTime::from_secs(5));
        let first = f.on_probe_timer(&key, epoch, at, &mut p);
        assert_eq!(sends(&first).len(), 1);
        let later = at + SimTime::from_secs(60);
        assert!(first
            .iter()
            .any(|a| matches!(a, Action::ArmProbeTimer { at: t, .. } if *t == later)));
        // idle since the last probe
        let second = f.on_probe_timer(&key, epoch, later, &mut p);
        assert!(sends(&second).is_empty());
        assert_eq!(second.len(), 1);
        // stale epoch
        assert!(f.on_probe_timer(&key, epoch + 1, later, &mut p).is_empty());
    }

    #[test]
    fn face_down_and_up() {
        let mut f = fwd(StrategyKind::Asf(AsfParams::default()));
        let mut p = provider();
        f.on_interest(FaceId::LOCAL, interest("/n5/a", 1), SimTime::ZERO, &mut p);
        f.on_data(FaceId(1), data("/n5/a"), SimTime(100));
        f.set_face(FaceId(1), false);
        let key = RouteKey::Prefix("n5".into());
        assert!(f.route(&key).unwrap().stat(FaceId(1)).is_none());
        let acts = f.on_interest(FaceId::LOCAL, interest("/n5/b", 2), SimTime(200), &mut p);
        assert_eq!(sends(&acts), vec![FaceId(2)]);
        f.on_data(FaceId(2), data("/n5/b"), SimTime(400));
        f.set_face(FaceId(1), true);
        let acts = f.on_interest(FaceId::LOCAL, interest("/n5/c", 3), SimTime(500), &mut p);
        // face 1 is back but unmeasured; the measured face 2 keeps the traffic
        assert_eq!(sends(&acts), vec![FaceId(2)]);
        let e = f.route(&key).unwrap();
        assert_eq!(e.next_hops.len(), 3);
        assert!(e.stat(FaceId(1)).unwrap().srtt.is_none());
    }

    #[test]
    fn hr_keys_by_coordinate() {
        let c = |r, t| HyperbolicCoordinate::new(r, t).unwrap();
        let nbrs = [(FaceId(1), c(1.0, 0.0)), (FaceId(2), c(1.0, 3.0))];
        let mut p = HrProvider {
            neighbors: &nbrs,
            mpf: MultipathFactor::All,
        };
        let mut f = fwd(StrategyKind::BestRoute);
        let mut i = interest("/n5/x", 1);
        i.dest_coord = Some(c(2.0, 3.1));
        let acts = f.on_interest(FaceId::LOCAL, i, SimTime::ZERO, &mut p);
        assert_eq!(sends(&acts), vec![FaceId(2)]);
        assert!(f.route(&RouteKey::Coord(c(2.0, 3.1))).is_some());
    }
}
