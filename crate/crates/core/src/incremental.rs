//! Incremental maintenance of consistent configurations under host changes.
//!
//! Every node keeps its result set, a log of tuple changes and, per dependency, a cursor
//! into that dependency's log. Executing a node first consumes host events against its
//! previous view of the dependencies, then the compressed dependency changes against the
//! new host. Join, union, projection and semi-join nodes keep indexes or support counts so
//! that each execution costs time proportional to the changes it consumes.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::exec::{execute_order, navigate, project, ExecEnv, MsConfiguration, MsResult};
use crate::id::Id;
use crate::marking::Marking;
use crate::modification::{Change, HostEvent, HostState};
use crate::morphism::Match;
use crate::msnet::{MsKind, MsNet, Side};
use crate::rete::{
    self, edge_match, injective_ok, key_left, key_right, overlap_anchor, Configuration, NodeId,
    QueryPart, ReteError, ReteNet, StdKind,
};

#[derive(Debug, Clone)]
enum Op {
    AllVertices {
        v: Id,
        ty: Id,
    },
    AllEdges {
        v: Id,
        e: Id,
        w: Id,
        ty: Id,
    },
    RelevantVertices {
        v: Id,
        ty: Id,
    },
    Nav {
        forward: bool,
        v: Id,
        e: Id,
        w: Id,
        ty: Id,
    },
    Join {
        anchor: Match,
    },
    Union,
    Projection(Match),
    Assign(Marking),
    Filter(Marking),
    Semi {
        anchor: Match,
        anti: bool,
    },
    Dummy,
}

impl Op {
    fn reads_host(&self) -> bool {
        matches!(
            self,
            Op::AllVertices { .. }
                | Op::AllEdges { .. }
                | Op::RelevantVertices { .. }
                | Op::Nav { .. }
        )
    }

    fn name(&self) -> &'static str {
        match self {
            Op::AllVertices { .. } => "vertex-input",
            Op::AllEdges { .. } => "edge-input",
            Op::RelevantVertices { .. } => "vertex",
            Op::Nav { forward: true, .. } => "forward",
            Op::Nav { forward: false, .. } => "backward",
            Op::Join { .. } => "join",
            Op::Union => "union",
            Op::Projection(_) => "projection",
            Op::Assign(_) => "assign",
            Op::Filter(_) => "filter",
            Op::Semi { anti: false, .. } => "semijoin",
            Op::Semi { anti: true, .. } => "antijoin",
            Op::Dummy => "dummy",
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    op: Op,
    query: QueryPart,
    deps: Vec<NodeId>,
}

type Index = HashMap<Vec<Id>, HashMap<Match, Marking>>;

#[derive(Debug, Clone, Default)]
enum State {
    #[default]
    Stateless,
    Nav(HashMap<Id, Marking>),
    Join {
        left: Index,
        right: Index,
    },
    Union(HashMap<Match, Vec<Option<Marking>>>),
    Projection(HashMap<Match, BTreeMap<Marking, usize>>),
    Semi {
        left: Index,
        right: HashMap<Vec<Id>, usize>,
    },
}

/// A tuple change: the match with its marking before and after, `None` meaning absent.
type TupleChange = (Match, Option<Marking>, Option<Marking>);

#[derive(Debug, Clone)]
struct Log<T> {
    base: usize,
    entries: Vec<T>,
}

impl<T> Default for Log<T> {
    fn default() -> Self {
        Log {
            base: 0,
            entries: Vec::new(),
        }
    }
}

impl<T> Log<T> {
    fn end(&self) -> usize {
        self.base + self.entries.len()
    }

    fn since(&self, cursor: usize) -> &[T] {
        &self.entries[cursor - self.base..]
    }

    fn truncate_before(&mut self, cursor: usize) {
        self.entries.drain(..cursor - self.base);
        self.base = cursor;
    }
}

/// One executed node, as written to the trace log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step: u64,
    pub node: NodeId,
    pub kind: &'static str,
    pub added: usize,
    pub removed: usize,
    pub updated: usize,
}

/// Production changes caused by one `apply` call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApplyReport {
    pub events: usize,
    pub removed: Vec<Match>,
    pub added: Vec<Match>,
    pub remarked: Vec<Match>,
}

#[derive(Debug, Clone)]
pub struct IncrementalEngine {
    nodes: Vec<Node>,
    order: Vec<NodeId>,
    production: NodeId,
    host: HostState,
    out: Vec<MsResult>,
    logs: Vec<Log<TupleChange>>,
    cursors: Vec<Vec<usize>>,
    host_log: Log<HostEvent>,
    host_cursors: Vec<usize>,
    states: Vec<State>,
    step: u64,
    trace: Option<Vec<TraceRecord>>,
}

fn ms_nodes(net: &MsNet) -> Result<Vec<Node>, ReteError> {
    net.nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if n.side == Side::Target {
                return Err(ReteError::UnsupportedNet(format!(
                    "node {i} reads the target host"
                )));
            }
            let op = match &n.kind {
                MsKind::VertexInput { v, ty } => Op::RelevantVertices {
                    v: v.clone(),
                    ty: ty.clone(),
                },
                MsKind::ForwardNav { v, e, w, ty } => Op::Nav {
                    forward: true,
                    v: v.clone(),
                    e: e.clone(),
                    w: w.clone(),
                    ty: ty.clone(),
                },
                MsKind::BackwardNav { v, e, w, ty } => Op::Nav {
                    forward: false,
                    v: v.clone(),
                    e: e.clone(),
                    w: w.clone(),
                    ty: ty.clone(),
                },
                MsKind::Join => Op::Join {
                    anchor: overlap_anchor(
                        &net.nodes[n.deps[0]].query,
                        &net.nodes[n.deps[1]].query,
                    ),
                },
                MsKind::Union => Op::Union,
                MsKind::Projection { map } => Op::Projection(map.clone()),
                MsKind::Assign(i) => Op::Assign(*i),
                MsKind::Filter(i) => Op::Filter(*i),
                MsKind::SemiJoin { anchor, .. } => Op::Semi {
                    anchor: anchor.clone(),
                    anti: false,
                },
                MsKind::AntiJoin { anchor } => Op::Semi {
                    anchor: anchor.clone(),
                    anti: true,
                },
                MsKind::Dummy => Op::Dummy,
                MsKind::Translate(_) => {
                    return Err(ReteError::UnsupportedNet(format!(
                        "node {i} translates across a modification"
                    )))
                }
            };
            Ok(Node {
                op,
                query: n.query.clone(),
                deps: n.deps.clone(),
            })
        })
        .collect()
}

fn std_nodes(net: &ReteNet) -> Vec<Node> {
    net.nodes
        .iter()
        .map(|n| {
            let op = match &n.kind {
                StdKind::VertexInput { v, ty } => Op::AllVertices {
                    v: v.clone(),
                    ty: ty.clone(),
                },
                StdKind::EdgeInput { v, e, w, ty } => Op::AllEdges {
                    v: v.clone(),
                    e: e.clone(),
                    w: w.clone(),
                    ty: ty.clone(),
                },
                StdKind::Join => Op::Join {
                    anchor: overlap_anchor(
                        &net.nodes[n.deps[0]].query,
                        &net.nodes[n.deps[1]].query,
                    ),
                },
                StdKind::SemiJoin { anchor, .. } => Op::Semi {
                    anchor: anchor.clone(),
                    anti: false,
                },
                StdKind::AntiJoin { anchor } => Op::Semi {
                    anchor: anchor.clone(),
                    anti: true,
                },
            };
            Node {
                op,
                query: n.query.clone(),
                deps: n.deps.clone(),
            }
        })
        .collect()
}

impl IncrementalEngine {
    /// Runs `order` from the empty configuration, then maintains the result incrementally.
    pub fn for_localized(
        net: &MsNet,
        order: &[NodeId],
        host: HostState,
    ) -> Result<Self, ReteError> {
        let env = ExecEnv::single(&host.graph, &host.relevant);
        let c = execute_order(net, &env, order, MsConfiguration::empty(net))?;
        Self::from_configuration(net, order, host, c)
    }

    /// Starts from `c`, which must be consistent for `host`.
    pub fn from_configuration(
        net: &MsNet,
        order: &[NodeId],
        host: HostState,
        c: MsConfiguration,
    ) -> Result<Self, ReteError> {
        if c.sets.len() != net.nodes.len() {
            return Err(ReteError::IncompleteConfiguration(c.sets.len()));
        }
        Ok(Self::assemble(
            ms_nodes(net)?,
            order.to_vec(),
            net.production,
            host,
            c.sets,
        ))
    }

    /// A standard net, with every tuple marked 0.
    pub fn for_standard(net: &ReteNet, host: HostState) -> Result<Self, ReteError> {
        let c = rete::execute(net, &host.graph)?;
        let out = c
            .sets
            .into_iter()
            .map(|s| s.into_iter().map(|m| (m, Marking::ZERO)).collect())
            .collect();
        Ok(Self::assemble(
            std_nodes(net),
            net.reverse_topological_order(),
            net.production,
            host,
            out,
        ))
    }

    fn assemble(
        nodes: Vec<Node>,
        order: Vec<NodeId>,
        production: NodeId,
        host: HostState,
        out: Vec<MsResult>,
    ) -> Self {
        let states = nodes.iter().map(|n| build_state(n, &nodes, &out)).collect();
        IncrementalEngine {
            cursors: nodes.iter().map(|n| vec![0; n.deps.len()]).collect(),
            host_cursors: vec![0; nodes.len()],
            logs: vec![Log::default(); nodes.len()],
            host_log: Log::default(),
            nodes,
            order,
            production,
            host,
            out,
            states,
            step: 0,
            trace: None,
        }
    }

    /// Like [`Self::for_localized`], but performs the initial run incrementally from an empty
    /// configuration, replaying the host as a stream of additions so that it is traced.
    pub fn load_localized(
        net: &MsNet,
        order: &[NodeId],
        host: HostState,
        trace: bool,
    ) -> Result<Self, ReteError> {
        let empty = vec![MsResult::new(); net.nodes.len()];
        let mut e = Self::assemble(ms_nodes(net)?, order.to_vec(), net.production, host, empty);
        e.replay_host(trace);
        Ok(e)
    }

    /// Like [`Self::for_standard`], with a traced initial run.
    pub fn load_standard(net: &ReteNet, host: HostState, trace: bool) -> Self {
        let empty = vec![MsResult::new(); net.nodes.len()];
        let mut e = Self::assemble(
            std_nodes(net),
            net.reverse_topological_order(),
            net.production,
            host,
            empty,
        );
        e.replay_host(trace);
        e
    }

    fn replay_host(&mut self, trace: bool) {
        if trace {
            self.enable_trace();
        }
        let g = &self.host.graph;
        let mut events: Vec<HostEvent> = g
            .sorted_vertex_ids()
            .into_iter()
            .map(|v| HostEvent::VertexAdded(v.clone(), g.vertex_type(&v).unwrap().clone()))
            .collect();
        events.extend(
            g.sorted_edge_ids()
                .into_iter()
                .map(|e| HostEvent::EdgeAdded(e.clone(), g.edge(&e).unwrap().clone())),
        );
        events.extend(
            self.host.relevant.vertices.iter().map(|v| {
                HostEvent::RelevantVertexAdded(v.clone(), g.vertex_type(v).unwrap().clone())
            }),
        );
        events.extend(
            self.host
                .relevant
                .edges
                .iter()
                .map(|e| HostEvent::RelevantEdgeAdded(e.clone())),
        );
        self.host_log.entries.extend(events);
        for i in 0..self.order.len() {
            self.execute(self.order[i]);
        }
        self.compact();
    }

    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn take_trace(&mut self) -> Vec<TraceRecord> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn host(&self) -> &HostState {
        &self.host
    }

    pub fn production(&self) -> &MsResult {
        &self.out[self.production]
    }

    pub fn configuration(&self) -> MsConfiguration {
        MsConfiguration {
            sets: self.out.clone(),
        }
    }

    /// The configuration with markings dropped, for standard nets.
    pub fn standard_configuration(&self) -> Configuration {
        Configuration {
            sets: self
                .out
                .iter()
                .map(|s| s.keys().cloned().collect())
                .collect(),
        }
    }

    pub fn tuples(&self) -> usize {
        self.out.iter().map(|s| s.len()).sum()
    }

    pub fn effective_size(&self) -> usize {
        self.out
            .iter()
            .zip(&self.nodes)
            .map(|(s, n)| s.len() * n.query.size())
            .sum()
    }

    /// Applies a changeset atomically and re-establishes consistency by one pass over the
    /// execution order. A change naming an unknown element leaves everything untouched.
    pub fn apply(&mut self, changes: &[Change]) -> Result<ApplyReport, ReteError> {
        let mut events = Vec::new();
        for c in changes {
            match self.host.apply(c) {
                Ok(evs) => events.extend(evs),
                Err(e) => {
                    self.host.revert(&events);
                    return Err(ReteError::MalformedDelta(e.to_string()));
                }
            }
        }
        let mut report = ApplyReport {
            events: events.len(),
            ..ApplyReport::default()
        };
        self.host_log.entries.extend(events);
        self.step += 1;
        let start = self.logs[self.production].end();
        for i in 0..self.order.len() {
            self.execute(self.order[i]);
        }
        for (m, old, new) in compress(self.logs[self.production].since(start)) {
            match (old, new) {
                (None, Some(_)) => report.added.push(m),
                (Some(_), None) => report.removed.push(m),
                _ => report.remarked.push(m),
            }
        }
        report.added.sort();
        report.removed.sort();
        report.remarked.sort();
        self.compact();
        Ok(report)
    }

    fn compact(&mut self) {
        let mut min: Vec<Option<usize>> = vec![None; self.nodes.len()];
        for (n, node) in self.nodes.iter().enumerate() {
            for (i, &d) in node.deps.iter().enumerate() {
                let c = self.cursors[n][i];
                min[d] = Some(min[d].map_or(c, |x| x.min(c)));
            }
        }
        for (d, m) in min.into_iter().enumerate() {
            let cut = m.unwrap_or(self.logs[d].end());
            self.logs[d].truncate_before(cut);
        }
        let host_min = (0..self.nodes.len())
            .filter(|&n| self.nodes[n].op.reads_host())
            .map(|n| self.host_cursors[n])
            .min()
            .unwrap_or(self.host_log.end());
        self.host_log.truncate_before(host_min);
    }

    fn execute(&mut self, n: NodeId) {
        let events: Vec<HostEvent> = if self.nodes[n].op.reads_host() {
            let evs = self.host_log.since(self.host_cursors[n]).to_vec();
            self.host_cursors[n] = self.host_log.end();
            evs
        } else {
            Vec::new()
        };
        let mut changes = Vec::with_capacity(self.nodes[n].deps.len());
        for i in 0..self.nodes[n].deps.len() {
            let d = self.nodes[n].deps[i];
            changes.push(compress(self.logs[d].since(self.cursors[n][i])));
            self.cursors[n][i] = self.logs[d].end();
        }
        let mut em = Emitter {
            out: std::mem::take(&mut self.out[n]),
            log: std::mem::take(&mut self.logs[n]),
            added: 0,
            removed: 0,
            updated: 0,
        };
        let mut state = std::mem::take(&mut self.states[n]);
        run(
            &self.nodes[n],
            &mut state,
            &self.host,
            &events,
            changes,
            &mut em,
        );
        self.states[n] = state;
        if let Some(t) = &mut self.trace {
            t.push(TraceRecord {
                step: self.step,
                node: n,
                kind: self.nodes[n].op.name(),
                added: em.added,
                removed: em.removed,
                updated: em.updated,
            });
        }
        self.out[n] = em.out;
        self.logs[n] = em.log;
    }
}

/// Collapses a change log to one net change per match, dropping no-ops.
fn compress(entries: &[TupleChange]) -> Vec<TupleChange> {
    let mut net: HashMap<&Match, (Option<Marking>, Option<Marking>)> = HashMap::new();
    for (m, old, new) in entries {
        net.entry(m)
            .and_modify(|e| e.1 = *new)
            .or_insert((*old, *new));
    }
    let mut out: Vec<TupleChange> = net
        .into_iter()
        .filter(|(_, (o, n))| o != n)
        .map(|(m, (o, n))| (m.clone(), o, n))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

struct Emitter {
    out: MsResult,
    log: Log<TupleChange>,
    added: usize,
    removed: usize,
    updated: usize,
}

impl Emitter {
    fn set(&mut self, m: Match, phi: Option<Marking>) {
        let old = match phi {
            Some(p) => self.out.insert(m.clone(), p),
            None => self.out.remove(&m),
        };
        if old == phi {
            return;
        }
        match (old, phi) {
            (None, Some(_)) => self.added += 1,
            (Some(_), None) => self.removed += 1,
            _ => self.updated += 1,
        }
        self.log.entries.push((m, old, phi));
    }
}

fn nav_vertex<'a>(forward: bool, v: &'a Id, w: &'a Id) -> &'a Id {
    if forward {
        v
    } else {
        w
    }
}

fn build_state(node: &Node, nodes: &[Node], out: &[MsResult]) -> State {
    let dep = |i: usize| &out[node.deps[i]];
    match &node.op {
        Op::Nav { forward, v, w, .. } => {
            let at = nav_vertex(*forward, v, w);
            State::Nav(
                dep(0)
                    .iter()
                    .map(|(m, p)| (m.vertex(at).expect("navigation vertex").clone(), *p))
                    .collect(),
            )
        }
        Op::Join { anchor } => State::Join {
            left: index(dep(0), anchor, key_left),
            right: index(dep(1), anchor, key_right),
        },
        Op::Union => {
            let mut u: HashMap<Match, Vec<Option<Marking>>> = HashMap::new();
            for i in 0..node.deps.len() {
                for (m, p) in dep(i) {
                    u.entry(m.clone())
                        .or_insert_with(|| vec![None; node.deps.len()])[i] = Some(*p);
                }
            }
            State::Union(u)
        }
        Op::Projection(map) => {
            let mut counts: HashMap<Match, BTreeMap<Marking, usize>> = HashMap::new();
            for (m, p) in dep(0) {
                *counts
                    .entry(project(m, map))
                    .or_default()
                    .entry(*p)
                    .or_default() += 1;
            }
            State::Projection(counts)
        }
        Op::Semi { anchor, .. } => {
            let mut right: HashMap<Vec<Id>, usize> = HashMap::new();
            for m in dep(1).keys() {
                *right.entry(key_right(m, anchor)).or_default() += 1;
            }
            State::Semi {
                left: index(dep(0), anchor, key_left),
                right,
            }
        }
        _ => {
            let _ = nodes;
            State::Stateless
        }
    }
}

fn index(r: &MsResult, anchor: &Match, key: fn(&Match, &Match) -> Vec<Id>) -> Index {
    let mut idx = Index::new();
    for (m, p) in r {
        idx.entry(key(m, anchor)).or_default().insert(m.clone(), *p);
    }
    idx
}

fn run(
    node: &Node,
    state: &mut State,
    host: &HostState,
    events: &[HostEvent],
    mut changes: Vec<Vec<TupleChange>>,
    em: &mut Emitter,
) {
    match (&node.op, state) {
        (Op::AllVertices { v, ty }, _) => {
            for ev in events {
                match ev {
                    HostEvent::VertexAdded(x, t) if t == ty => em.set(
                        Match::single_vertex(v.clone(), x.clone()),
                        Some(Marking::ZERO),
                    ),
                    HostEvent::VertexRemoved(x, t) if t == ty => {
                        em.set(Match::single_vertex(v.clone(), x.clone()), None)
                    }
                    _ => {}
                }
            }
        }
        (Op::AllEdges { v, e, w, ty }, _) => {
            for ev in events {
                let (id, edge, phi) = match ev {
                    HostEvent::EdgeAdded(id, edge) => (id, edge, Some(Marking::ZERO)),
                    HostEvent::EdgeRemoved(id, edge) => (id, edge, None),
                    _ => continue,
                };
                if edge.ty != *ty {
                    continue;
                }
                if let Some(m) = edge_match(v, e, w, &edge.src, id, &edge.tgt)
                    .filter(|m| injective_ok(&node.query, m))
                {
                    em.set(m, phi);
                }
            }
        }
        (Op::RelevantVertices { v, ty }, _) => {
            for ev in events {
                match ev {
                    HostEvent::RelevantVertexAdded(x, t) if t == ty => em.set(
                        Match::single_vertex(v.clone(), x.clone()),
                        Some(Marking::INF),
                    ),
                    HostEvent::RelevantVertexRemoved(x, t) if t == ty => {
                        em.set(Match::single_vertex(v.clone(), x.clone()), None)
                    }
                    _ => {}
                }
            }
        }
        (
            Op::Nav {
                forward,
                v,
                e,
                w,
                ty,
            },
            State::Nav(view),
        ) => {
            let at = nav_vertex(*forward, v, w);
            for ev in events {
                let (id, edge, added) = match ev {
                    HostEvent::EdgeAdded(id, edge) => (id, edge, true),
                    HostEvent::EdgeRemoved(id, edge) => (id, edge, false),
                    _ => continue,
                };
                if edge.ty != *ty {
                    continue;
                }
                let x = if *forward { &edge.src } else { &edge.tgt };
                if let Some(phi) = view.get(x) {
                    if let Some(m) = edge_match(v, e, w, &edge.src, id, &edge.tgt)
                        .filter(|m| injective_ok(&node.query, m))
                    {
                        em.set(m, added.then_some(*phi));
                    }
                }
            }
            for (m, _, new) in changes.swap_remove(0) {
                let x = m.vertex(at).expect("navigation vertex").clone();
                for nm in navigate(&host.graph, &x, *forward, (v, e, w, ty)) {
                    if injective_ok(&node.query, &nm) {
                        em.set(nm, new);
                    }
                }
                match new {
                    Some(p) => view.insert(x, p),
                    None => view.remove(&x),
                };
            }
        }
        (Op::Join { anchor }, State::Join { left, right }) => {
            let right_changes = changes.pop().expect("two dependencies");
            for (ml, old, new) in changes.pop().expect("two dependencies") {
                let key = key_left(&ml, anchor);
                for (mr, pr) in right.get(&key).into_iter().flatten() {
                    if let Some(m) = ml.merge(mr).filter(|m| injective_ok(&node.query, m)) {
                        em.set(m, new.map(|p| p.max(*pr)));
                    }
                }
                update_index(left, key, ml, old, new);
            }
            for (mr, old, new) in right_changes {
                let key = key_right(&mr, anchor);
                for (ml, pl) in left.get(&key).into_iter().flatten() {
                    if let Some(m) = ml.merge(&mr).filter(|m| injective_ok(&node.query, m)) {
                        em.set(m, new.map(|p| p.max(*pl)));
                    }
                }
                update_index(right, key, mr, old, new);
            }
        }
        (Op::Union, State::Union(u)) => {
            let k = node.deps.len();
            for (i, cs) in changes.into_iter().enumerate() {
                for (m, _, new) in cs {
                    let slot = u.entry(m.clone()).or_insert_with(|| vec![None; k]);
                    slot[i] = new;
                    let max = slot.iter().flatten().max().copied();
                    if max.is_none() {
                        u.remove(&m);
                    }
                    em.set(m, max);
                }
            }
        }
        (Op::Projection(map), State::Projection(counts)) => {
            for (m, old, new) in changes.swap_remove(0) {
                let pm = project(&m, map);
                let c = counts.entry(pm.clone()).or_default();
                if let Some(o) = old {
                    let n = c.get_mut(&o).expect("counted marking");
                    *n -= 1;
                    if *n == 0 {
                        c.remove(&o);
                    }
                }
                if let Some(p) = new {
                    *c.entry(p).or_default() += 1;
                }
                let max = c.keys().next_back().copied();
                if max.is_none() {
                    counts.remove(&pm);
                }
                em.set(pm, max);
            }
        }
        (Op::Assign(i), _) => {
            for (m, _, new) in changes.swap_remove(0) {
                em.set(m, new.map(|_| *i));
            }
        }
        (Op::Filter(i), _) => {
            for (m, _, new) in changes.swap_remove(0) {
                em.set(m, new.filter(|p| p > i));
            }
        }
        (Op::Semi { anchor, anti }, State::Semi { left, right }) => {
            let right_changes = changes.pop().expect("two dependencies");
            for (ml, old, new) in changes.pop().expect("two dependencies") {
                let key = key_left(&ml, anchor);
                let present = right.get(&key).is_some_and(|c| *c > 0);
                em.set(ml.clone(), new.filter(|_| present != *anti));
                update_index(left, key, ml, old, new);
            }
            for (mr, old, new) in right_changes {
                let key = key_right(&mr, anchor);
                let before = right.get(&key).copied().unwrap_or(0);
                let after = before + new.is_some() as usize - old.is_some() as usize;
                if after == 0 {
                    right.remove(&key);
                } else {
                    right.insert(key.clone(), after);
                }
                if (before > 0) != (after > 0) {
                    let keep = (after > 0) != *anti;
                    for (ml, pl) in left.get(&key).into_iter().flatten() {
                        em.set(ml.clone(), keep.then_some(*pl));
                    }
                }
            }
        }
        (Op::Dummy, _) => {}
        (op, _) => unreachable!("state built for {}", op.name()),
    }
}

fn update_index(
    idx: &mut Index,
    key: Vec<Id>,
    m: Match,
    old: Option<Marking>,
    new: Option<Marking>,
) {
    match new {
        Some(p) => {
            idx.entry(key).or_default().insert(m, p);
        }
        None if old.is_some() => {
            if let Some(bucket) = idx.get_mut(&key) {
                bucket.remove(&m);
                if bucket.is_empty() {
                    idx.remove(&key);
                }
            }
        }
        None => {}
    }
}

/// Brings a configuration that was consistent for `host_prev` up to date with `changes`,
/// returning the new configuration and host state.
pub fn apply_changes_incrementally(
    net: &MsNet,
    c_prev: MsConfiguration,
    host_prev: HostState,
    changes: &[Change],
    order: &[NodeId],
) -> Result<(MsConfiguration, HostState), ReteError> {
    let mut engine = IncrementalEngine::from_configuration(net, order, host_prev, c_prev)?;
    engine.apply(changes)?;
    Ok((engine.configuration(), engine.host))
}
