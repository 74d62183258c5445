//! Link-state baseline: per-node LSDB views, multipath next-hop computation,
//! and a message-counting model of LSA dissemination.
//!
//! Dissemination works like this. When a node learns an LSA version it did
//! not have (including one it originated), it sends a sync notification on
//! every active link except the one it learned from. A receiver that lacks
//! that version fetches it with an LSA Interest and gets an LSA Data back.
//! When a link comes up, both endpoints also exchange a notification
//! covering their whole LSDB so a rejoining node catches up.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::sync::Arc;

use super::{MultipathFactor, RouteProvider};
use crate::forwarder::{FaceId, RouteKey};
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LsaKind {
    Adjacency,
    Prefix,
}

impl LsaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LsaKind::Adjacency => "adj",
            LsaKind::Prefix => "prefix",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LsaBody {
    /// `(neighbor, cost)` for every link the originator considers up.
    Adjacency(Vec<(NodeId, f64)>),
    Prefix(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LsaKey {
    pub originator: NodeId,
    pub kind: LsaKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lsa {
    pub originator: NodeId,
    pub kind: LsaKind,
    pub version: u64,
    pub body: Arc<LsaBody>,
}

impl Lsa {
    pub fn key(&self) -> LsaKey {
        LsaKey {
            originator: self.originator,
            kind: self.kind,
        }
    }
}

/// Dense adjacency built from an LSDB. A link is present only if both
/// endpoints list each other.
#[derive(Debug, Clone, Default)]
pub struct LsGraph {
    pub ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl LsGraph {
    pub fn from_adjacencies(adjs: &BTreeMap<NodeId, Vec<(NodeId, f64)>>) -> Self {
        let ids: Vec<NodeId> = adjs.keys().copied().collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (&a, list) in adjs {
            for &(b, cost) in list {
                let confirmed = adjs
                    .get(&b)
                    .map(|l| l.iter().any(|&(x, _)| x == a))
                    .unwrap_or(false);
                if confirmed {
                    adj[index[&a]].push((index[&b], cost));
                }
            }
        }
        for list in &mut adj {
            list.sort_by(|x, y| x.0.cmp(&y.0));
        }
        LsGraph { ids, index, adj }
    }

    /// Every link of the topology, all up.
    pub fn from_topology(t: &Topology) -> Self {
        let mut adjs: BTreeMap<NodeId, Vec<(NodeId, f64)>> =
            t.nodes().iter().map(|n| (n.id, Vec::new())).collect();
        for l in t.links() {
            adjs.get_mut(&l.a).expect("endpoint").push((l.b, l.cost));
            adjs.get_mut(&l.b).expect("endpoint").push((l.a, l.cost));
        }
        Self::from_adjacencies(&adjs)
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Single-source shortest path costs with `skip` removed from the graph.
    pub fn dijkstra(&self, source: usize, skip: Option<usize>) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        let mut dist = vec![f64::INFINITY; self.ids.len()];
        if Some(source) == skip {
            return dist;
        }
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Item(0.0, source));
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                if Some(v) == skip {
                    continue;
                }
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Item(nd, v));
                }
            }
        }
        dist
    }
}

/// Ranked `(face, cost)` toward `dest` from `me`. Each neighbor's cost is the
/// link cost plus its shortest path to `dest` avoiding `me`.
pub fn compute_ls_nexthops(
    graph: &LsGraph,
    me: NodeId,
    dest: NodeId,
    mpf: MultipathFactor,
    live: &dyn Fn(FaceId) -> bool,
) -> Vec<(FaceId, f64)> {
    let (Some(s), Some(d)) = (graph.index_of(me), graph.index_of(dest)) else {
        return Vec::new();
    };
    let mut out: Vec<(FaceId, f64)> = graph.adj[s]
        .iter()
        .filter(|&&(n, _)| live(FaceId::neighbor(graph.ids[n])))
        .filter_map(|&(n, w)| {
            let c = w + graph.dijkstra(n, Some(s))[d];
            c.is_finite().then_some((FaceId::neighbor(graph.ids[n]), c))
        })
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    out.truncate(mpf.limit());
    out
}

/// One node's link-state database.
#[derive(Debug, Clone, Default)]
pub struct LsdbView {
    lsas: BTreeMap<LsaKey, Lsa>,
    owners: HashMap<String, NodeId>,
    revision: u64,
    graph: Option<Arc<LsGraph>>,
}

impl LsdbView {
    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn version(&self, key: &LsaKey) -> Option<u64> {
        self.lsas.get(key).map(|l| l.version)
    }

    pub fn get(&self, key: &LsaKey) -> Option<&Lsa> {
        self.lsas.get(key)
    }

    pub fn len(&self) -> usize {
        self.lsas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lsas.is_empty()
    }

    /// Stores `lsa` if it is newer than what the view holds.
    pub fn install(&mut self, lsa: Lsa) -> bool {
        if self.version(&lsa.key()).is_some_and(|v| v >= lsa.version) {
            return false;
        }
        match &*lsa.body {
            LsaBody::Adjacency(_) => self.graph = None,
            LsaBody::Prefix(ps) => {
                self.owners.retain(|_, o| *o != lsa.originator);
                for p in ps {
                    self.owners.insert(p.clone(), lsa.originator);
                }
            }
        }
        self.lsas.insert(lsa.key(), lsa);
        self.revision += 1;
        true
    }

    pub fn digest(&self) -> Vec<(LsaKey, u64)> {
        self.lsas.iter().map(|(k, l)| (*k, l.version)).collect()
    }

    pub fn prefix_owner(&self, prefix: &str) -> Option<NodeId> {
        self.owners.get(prefix).copied()
    }

    pub fn graph(&mut self) -> Arc<LsGraph> {
        if let Some(g) = &self.graph {
            return g.clone();
        }
        let adjs: BTreeMap<NodeId, Vec<(NodeId, f64)>> = self
            .lsas
            .values()
            .filter_map(|l| match &*l.body {
                LsaBody::Adjacency(list) => Some((l.originator, list.clone())),
                LsaBody::Prefix(_) => None,
            })
            .collect();
        let g = Arc::new(LsGraph::from_adjacencies(&adjs));
        self.graph = Some(g.clone());
        g
    }
}

/// Per-neighbor shortest path tables for one node, valid for one LSDB
/// revision.
#[derive(Debug, Clone, Default)]
pub struct LsRouteCache {
    revision: Option<u64>,
    graph: Arc<LsGraph>,
    /// `(neighbor index, link cost, distances from neighbor without me)`
    tables: Vec<(usize, f64, Vec<f64>)>,
}

/// Link-state routing for one node.
pub struct LsProvider<'a> {
    pub me: NodeId,
    pub view: &'a mut LsdbView,
    pub cache: &'a mut LsRouteCache,
    pub mpf: MultipathFactor,
}

impl LsProvider<'_> {
    fn refresh(&mut self) {
        if self.cache.revision == Some(self.view.revision()) {
            return;
        }
        let graph = self.view.graph();
        let mut tables = Vec::new();
        if let Some(s) = graph.index_of(self.me) {
            for &(n, w) in &graph.adj[s] {
                tables.push((n, w, graph.dijkstra(n, Some(s))));
            }
        }
        self.cache.graph = graph;
        self.cache.tables = tables;
        self.cache.revision = Some(self.view.revision());
    }
}

impl RouteProvider for LsProvider<'_> {
    fn revision(&self) -> u64 {
        self.view.revision()
    }

    fn next_hops(&mut self, key: &RouteKey, live: &dyn Fn(FaceId) -> bool) -> Vec<(FaceId, f64)> {
        let RouteKey::Prefix(prefix) = key else {
            return Vec::new();
        };
        let Some(owner) = self.view.prefix_owner(prefix) else {
            return Vec::new();
        };
        self.refresh();
        let Some(d) = self.cache.graph.index_of(owner) else {
            return Vec::new();
        };
        let ids = &self.cache.graph.ids;
        let mut out: Vec<(FaceId, f64)> = self
            .cache
            .tables
            .iter()
            .filter_map(|(n, w, dist)| {
                let face = FaceId::neighbor(ids[*n]);
                let c = w + dist[d];
                (live(face) && c.is_finite()).then_some((face, c))
            })
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out.truncate(self.mpf.limit());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LsMessage {
    /// Announces LSA versions the sender holds. Empty for periodic refresh.
    SyncNotify(Vec<(LsaKey, u64)>),
    LsaInterest { key: LsaKey, version: u64 },
    LsaData(Lsa),
}

impl LsMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            LsMessage::SyncNotify(_) => "sync-notify",
            LsMessage::LsaInterest { .. } => "lsa-interest",
            LsMessage::LsaData(_) => "lsa-data",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outgoing {
    pub from: NodeId,
    pub to: NodeId,
    pub msg: LsMessage,
}

/// The LSDB views of every node plus the dissemination rules. The caller
/// delivers [`Outgoing`] messages (with whatever delay it models) and feeds
/// them back through [`LinkStateModel::on_message`].
#[derive(Debug, Clone)]
pub struct LinkStateModel {
    index: BTreeMap<NodeId, usize>,
    ids: Vec<NodeId>,
    views: Vec<LsdbView>,
    caches: Vec<LsRouteCache>,
    /// Neighbors each node currently believes reachable.
    active: Vec<BTreeSet<NodeId>>,
    /// Link costs as seen by each node.
    costs: Vec<BTreeMap<NodeId, f64>>,
    /// LSA fetches in flight, to avoid asking twice.
    pending: Vec<BTreeSet<(LsaKey, u64)>>,
    own_version: Vec<u64>,
}

impl LinkStateModel {
    /// Every node starts with a converged LSDB describing `t` with all links
    /// up. Initial convergence is not modelled as traffic.
    pub fn converged(t: &Topology, prefixes: impl Fn(NodeId) -> String) -> Self {
        let ids: Vec<NodeId> = t.nodes().iter().map(|n| n.id).collect();
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut costs = vec![BTreeMap::new(); ids.len()];
        for l in t.links() {
            costs[index[&l.a]].insert(l.b, l.cost);
            costs[index[&l.b]].insert(l.a, l.cost);
        }
        let active: Vec<BTreeSet<NodeId>> = costs.iter().map(|c| c.keys().copied().collect()).collect();
        let mut view = LsdbView::default();
        for (i, &id) in ids.iter().enumerate() {
            view.install(Lsa {
                originator: id,
                kind: LsaKind::Adjacency,
                version: 1,
                body: Arc::new(LsaBody::Adjacency(costs[i].iter().map(|(&n, &c)| (n, c)).collect())),
            });
            view.install(Lsa {
                originator: id,
                kind: LsaKind::Prefix,
                version: 1,
                body: Arc::new(LsaBody::Prefix(vec![prefixes(id)])),
            });
        }
        view.graph();
        let n = ids.len();
        LinkStateModel {
            index,
            ids,
            views: vec![view; n],
            caches: (0..n).map(|_| LsRouteCache::default()).collect(),
            active,
            costs,
            pending: vec![BTreeSet::new(); n],
            own_version: vec![1; n],
        }
    }

    fn idx(&self, id: NodeId) -> usize {
        self.index[&id]
    }

    pub fn view(&self, id: NodeId) -> &LsdbView {
        &self.views[self.idx(id)]
    }

    pub fn view_mut(&mut self, id: NodeId) -> &mut LsdbView {
        let i = self.idx(id);
        &mut self.views[i]
    }

    pub fn provider(&mut self, id: NodeId, mpf: MultipathFactor) -> LsProvider<'_> {
        let i = self.idx(id);
        LsProvider {
            me: id,
            view: &mut self.views[i],
            cache: &mut self.caches[i],
            mpf,
        }
    }

    pub fn active_neighbors(&self, id: NodeId) -> &BTreeSet<NodeId> {
        &self.active[self.idx(id)]
    }

    fn notify_all(&self, at: NodeId, except: Option<NodeId>, entries: Vec<(LsaKey, u64)>) -> Vec<Outgoing> {
        self.active[self.idx(at)]
            .iter()
            .filter(|&&n| Some(n) != except)
            .map(|&n| Outgoing {
                from: at,
                to: n,
                msg: LsMessage::SyncNotify(entries.clone()),
            })
            .collect()
    }

    fn originate(&mut self, node: NodeId) -> Vec<Outgoing> {
        let i = self.idx(node);
        self.own_version[i] += 1;
        let body: Vec<(NodeId, f64)> = self.active[i].iter().map(|n| (*n, self.costs[i][n])).collect();
        let lsa = Lsa {
            originator: node,
            kind: LsaKind::Adjacency,
            version: self.own_version[i],
            body: Arc::new(LsaBody::Adjacency(body)),
        };
        let key = lsa.key();
        let version = lsa.version;
        self.views[i].install(lsa);
        self.notify_all(node, None, vec![(key, version)])
    }

    /// `node` has detected that its link to `neighbor` went down.
    pub fn link_down(&mut self, node: NodeId, neighbor: NodeId) -> Vec<Outgoing> {
        let i = self.idx(node);
        if !self.active[i].remove(&neighbor) {
            return Vec::new();
        }
        self.pending[i].clear();
        self.originate(node)
    }

    /// `node` has detected that its link to `neighbor` came up. Besides the
    /// new adjacency LSA, the node offers its full LSDB to the neighbor.
    pub fn link_up(&mut self, node: NodeId, neighbor: NodeId) -> Vec<Outgoing> {
        let i = self.idx(node);
        if !self.costs[i].contains_key(&neighbor) || !self.active[i].insert(neighbor) {
            return Vec::new();
        }
        let mut out = self.originate(node);
        let digest = self.views[i].digest();
        match out.iter_mut().find(|o| o.to == neighbor) {
            Some(o) => o.msg = LsMessage::SyncNotify(digest),
            None => out.push(Outgoing {
                from: node,
                to: neighbor,
                msg: LsMessage::SyncNotify(digest),
            }),
        }
        out
    }

    /// A rebooted node loses its in-flight fetches and its adjacencies; its
    /// LSDB survives and is brought up to date as links are re-detected.
    pub fn node_reset(&mut self, node: NodeId) {
        let i = self.idx(node);
        self.pending[i].clear();
        self.active[i].clear();
    }

    /// Periodic refresh: one empty notification per active link.
    pub fn refresh(&self, node: NodeId) -> Vec<Outgoing> {
        self.notify_all(node, None, Vec::new())
    }

    pub fn on_message(&mut self, at: NodeId, from: NodeId, msg: LsMessage) -> Vec<Outgoing> {
        let i = self.idx(at);
        match msg {
            LsMessage::SyncNotify(entries) => {
                let mut out = Vec::new();
                for (key, version) in entries {
                    let have = self.views[i].version(&key).unwrap_or(0);
                    if have < version && self.pending[i].insert((key, version)) {
                        out.push(Outgoing {
                            from: at,
                            to: from,
                            msg: LsMessage::LsaInterest { key, version },
                        });
                    }
                }
                out
            }
            LsMessage::LsaInterest { key, version } => match self.views[i].get(&key) {
                Some(lsa) if lsa.version >= version => vec![Outgoing {
                    from: at,
                    to: from,
                    msg: LsMessage::LsaData(lsa.clone()),
                }],
                _ => Vec::new(),
            },
            LsMessage::LsaData(lsa) => {
                let key = lsa.key();
                let version = lsa.version;
                self.pending[i].retain(|(k, v)| !(*k == key && *v <= version));
                if key.originator == at {
                    // Our own older state echoed back after a restart.
                    if version > self.own_version[i] {
                        self.own_version[i] = version;
                        return self.originate(at);
                    }
                    return Vec::new();
                }
                if !self.views[i].install(lsa) {
                    return Vec::new();
                }
                self.notify_all(at, Some(from), vec![(key, version)])
            }
        }
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }
}
