//! Pending Interest Table, Content Store and the dead-nonce memory.

use std::collections::{HashMap, HashSet, VecDeque};

use super::packet::{Data, FaceId, Name};
use super::route::RouteKey;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub struct InRecord {
    pub face: FaceId,
    pub nonce: u64,
    pub arrival: SimTime,
    pub expiry: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutRecord {
    pub face: FaceId,
    pub nonce: u64,
    pub sent: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitEntry {
    pub name: Name,
    pub in_records: Vec<InRecord>,
    pub out_records: Vec<OutRecord>,
    pub expiry: SimTime,
    pub route_key: Option<RouteKey>,
}

impl PitEntry {
    pub fn new(name: Name) -> Self {
        Self {
            name,
            in_records: Vec::new(),
            out_records: Vec::new(),
            expiry: SimTime::ZERO,
            route_key: None,
        }
    }

    pub fn has_nonce(&self, nonce: u64) -> bool {
        self.in_records.iter().any(|r| r.nonce == nonce)
            || self.out_records.iter().any(|r| r.nonce == nonce)
    }

    /// Adds or refreshes the in-record for `face`; returns the new expiry.
    pub fn insert_in_record(&mut self, face: FaceId, nonce: u64, now: SimTime, lifetime: SimTime) -> SimTime {
        let expiry = now + lifetime;
        match self.in_records.iter_mut().find(|r| r.face == face) {
            Some(r) => {
                r.nonce = nonce;
                r.arrival = now;
                r.expiry = expiry;
            }
            None => self.in_records.push(InRecord {
                face,
                nonce,
                arrival: now,
                expiry,
            }),
        }
        self.expiry = self.expiry.max(expiry);
        self.expiry
    }

    pub fn insert_out_record(&mut self, face: FaceId, nonce: u64, now: SimTime) {
        match self.out_records.iter_mut().find(|r| r.face == face) {
            Some(r) => {
                r.nonce = nonce;
                r.sent = now;
            }
            None => self.out_records.push(OutRecord {
                face,
                nonce,
                sent: now,
            }),
        }
    }

    pub fn out_record(&self, face: FaceId) -> Option<&OutRecord> {
        self.out_records.iter().find(|r| r.face == face)
    }
}

#[derive(Debug, Default)]
pub struct Pit {
    entries: HashMap<Name, PitEntry>,
}

impl Pit {
    pub fn get(&self, name: &Name) -> Option<&PitEntry> {
        self.entries.get(name)
    }

    pub fn get_mut(&mut self, name: &Name) -> Option<&mut PitEntry> {
        self.entries.get_mut(name)
    }

    pub fn get_or_insert(&mut self, name: &Name) -> &mut PitEntry {
        self.entries
            .entry(name.clone())
            .or_insert_with(|| PitEntry::new(name.clone()))
    }

    pub fn remove(&mut self, name: &Name) -> Option<PitEntry> {
        self.entries.remove(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

/// Exact-match cache with FIFO eviction.
#[derive(Debug)]
pub struct ContentStore {
    capacity: usize,
    entries: HashMap<Name, (Data, SimTime)>,
    order: VecDeque<Name>,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: HashMap::new(),
            order: VecDeque::new(),
        }
    }

    pub fn insert(&mut self, data: Data, now: SimTime) {
        if self.capacity == 0 {
            return;
        }
        let fresh_until = now + data.freshness;
        let name = data.name.clone();
        if let Some(slot) = self.entries.get_mut(&name) {
            *slot = (data, fresh_until);
            return;
        }
        while self.entries.len() >= self.capacity {
            match self.order.pop_front() {
                Some(old) => {
                    self.entries.remove(&old);
                }
                None => break,
            }
        }
        self.entries.insert(name.clone(), (data, fresh_until));
        self.order.push_back(name);
    }

    /// A cached Data packet with exactly this name that is still fresh.
    pub fn lookup(&self, name: &Name, now: SimTime) -> Option<&Data> {
        self.entries
            .get(name)
            .filter(|(_, until)| now < *until)
            .map(|(d, _)| d)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.order.clear();
    }
}

/// Remembers `(name, nonce)` pairs of recently finished PIT entries so a
/// looping Interest is still recognized after its entry is gone.
#[derive(Debug, Default)]
pub struct DeadNonceList {
    set: HashSet<(Name, u64)>,
    queue: VecDeque<(SimTime, Name, u64)>,
}

impl DeadNonceList {
    pub fn insert(&mut self, name: Name, nonce: u64, until: SimTime) {
        if self.set.insert((name.clone(), nonce)) {
            self.queue.push_back((until, name, nonce));
        }
    }

    pub fn contains(&mut self, name: &Name, nonce: u64, now: SimTime) -> bool {
        while let Some((until, _, _)) = self.queue.front() {
            if *until > now {
                break;
            }
            let (_, n, k) = self.queue.pop_front().expect("front exists");
            self.set.remove(&(n, k));
        }
        self.set.contains(&(name.clone(), nonce))
    }

    pub fn clear(&mut self) {
        self.set.clear();
        self.queue.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str, fresh_ms: u64) -> Data {
        Data {
            name: Name::new(name),
            producer: 0,
            payload_size: 0,
            freshness: SimTime(fresh_ms * 1000),
        }
    }

    #[test]
    fn cs_evicts_oldest_first() {
        let mut cs = ContentStore::new(2);
        let t = SimTime::ZERO;
        cs.insert(data("/a", 10), t);
        cs.insert(data("/b", 10), t);
        cs.insert(data("/c", 10), t);
        assert_eq!(cs.len(), 2);
        assert!(cs.lookup(&Name::new("/a"), t).is_none());
        assert!(cs.lookup(&Name::new("/b"), t).is_some());
        assert!(cs.lookup(&Name::new("/c"), t).is_some());
    }

    #[test]
    fn cs_exact_match_and_freshness() {
        let mut cs = ContentStore::new(8);
        cs.insert(data("/a/1", 5), SimTime::ZERO);
        assert!(cs.lookup(&Name::new("/a"), SimTime::ZERO).is_none());
        assert!(cs.lookup(&Name::new("/a/1"), SimTime(4_999)).is_some());
        assert!(cs.lookup(&Name::new("/a/1"), SimTime(5_000)).is_none());
        let mut off = ContentStore::new(0);
        off.insert(data("/a", 5), SimTime::ZERO);
        assert!(off.is_empty());
    }

    #[test]
    fn dead_nonces_expire() {
        let mut d = DeadNonceList::default();
        let n = Name::new("/x");
        d.insert(n.clone(), 7, SimTime(100));
        assert!(d.contains(&n, 7, SimTime(50)));
        assert!(!d.contains(&n, 8, SimTime(50)));
        assert!(!d.contains(&n, 7, SimTime(100)));
    }

    #[test]
    fn pit_records() {
        let mut pit = Pit::default();
        let n = Name::new("/x");
        let e = pit.get_or_insert(&n);
        let exp = e.insert_in_record(FaceId(1), 5, SimTime(0), SimTime(10));
        assert_eq!(exp, SimTime(10));
        e.insert_out_record(FaceId(2), 5, SimTime(0));
        e.insert_out_record(FaceId(2), 6, SimTime(3));
        assert_eq!(e.out_records.len(), 1);
        assert_eq!(e.out_record(FaceId(2)).unwrap().sent, SimTime(3));
        assert!(e.has_nonce(5) && e.has_nonce(6) && !e.has_nonce(7));
        assert_eq!(pit.len(), 1);
        assert!(pit.remove(&n).is_some());
        assert!(pit.is_empty());
    }
}
