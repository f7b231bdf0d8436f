//! Batch execution of marking-sensitive nets: target result sets, execution along an
//! order, consistency checks, stripped result sets and effective sizes.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::graph::{RelevantSubgraph, TypedGraph};
use crate::id::Id;
use crate::marking::Marking;
use crate::modification::{translate_match, GraphModification};
use crate::morphism::Match;
use crate::msnet::{MsKind, MsNet, Side};
use crate::rete::{
    edge_match, injective_ok, key_left, key_right, overlap_anchor, NodeId, ReteError,
};

/// Result set of a marking-sensitive node. A map, since each match carries one marking.
pub type MsResult = HashMap<Match, Marking>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsConfiguration {
    pub sets: Vec<MsResult>,
}

impl MsConfiguration {
    pub fn empty(net: &MsNet) -> Self {
        MsConfiguration {
            sets: vec![MsResult::new(); net.nodes.len()],
        }
    }

    pub fn tuples(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    /// `Σ_n Σ_{(m, φ) ∈ C(n)} |m|`.
    pub fn effective_size(&self, net: &MsNet) -> usize {
        self.sets
            .iter()
            .zip(&net.nodes)
            .map(|(s, n)| s.len() * n.query.size())
            .sum()
    }

    /// Tuples sorted by match, for stable output.
    pub fn sorted(&self, n: NodeId) -> Vec<(Match, Marking)> {
        let mut v: Vec<(Match, Marking)> =
            self.sets[n].iter().map(|(m, p)| (m.clone(), *p)).collect();
        v.sort();
        v
    }
}

/// The matches of a node's tuples, markings discarded.
pub fn stripped_result_set(c: &MsConfiguration, n: NodeId) -> BTreeSet<Match> {
    c.sets[n].keys().cloned().collect()
}

/// A host graph with its relevant subgraph.
#[derive(Debug, Clone, Copy)]
pub struct HostCtx<'a> {
    pub graph: &'a TypedGraph,
    pub relevant: &'a RelevantSubgraph,
}

/// Everything a node may read: the source host, optionally the target host and the
/// modification relating them.
#[derive(Debug, Clone, Copy)]
pub struct ExecEnv<'a> {
    pub source: HostCtx<'a>,
    pub target: Option<HostCtx<'a>>,
    pub modification: Option<&'a GraphModification>,
}

impl<'a> ExecEnv<'a> {
    pub fn single(graph: &'a TypedGraph, relevant: &'a RelevantSubgraph) -> Self {
        ExecEnv {
            source: HostCtx { graph, relevant },
            target: None,
            modification: None,
        }
    }

    pub fn two_sided(
        modification: &'a GraphModification,
        relevant_source: &'a RelevantSubgraph,
        relevant_target: &'a RelevantSubgraph,
    ) -> Self {
        ExecEnv {
            source: HostCtx {
                graph: modification.source(),
                relevant: relevant_source,
            },
            target: Some(HostCtx {
                graph: modification.target(),
                relevant: relevant_target,
            }),
            modification: Some(modification),
        }
    }

    pub fn host(&self, side: Side) -> Result<HostCtx<'a>, ReteError> {
        match side {
            Side::Source => Ok(self.source),
            Side::Target => self
                .target
                .ok_or_else(|| ReteError::UnsupportedNet("no target host graph".into())),
        }
    }
}

/// Relevant vertices of type `ty`, as matches of `{v}` marked ∞.
pub(crate) fn relevant_vertices<'a>(
    ctx: HostCtx<'a>,
    v: &'a Id,
    ty: &'a Id,
) -> impl Iterator<Item = Match> + 'a {
    ctx.relevant
        .vertices
        .iter()
        .filter(move |x| ctx.graph.vertex_type(x) == Some(ty))
        .map(move |x| Match::single_vertex(v.clone(), x.clone()))
}

/// Edge matches of `v -e-> w` through host vertex `x`, leaving it (`forward`) or entering it.
pub(crate) fn navigate<'a>(
    graph: &'a TypedGraph,
    x: &'a Id,
    forward: bool,
    (v, e, w, ty): (&'a Id, &'a Id, &'a Id, &'a Id),
) -> impl Iterator<Item = Match> + 'a {
    let edges: Box<dyn Iterator<Item = &Id>> = if forward {
        Box::new(graph.out_edges(x))
    } else {
        Box::new(graph.in_edges(x))
    };
    edges.filter_map(move |he| {
        let edge = graph.edge(he).expect("indexed");
        if edge.ty != *ty {
            return None;
        }
        edge_match(v, e, w, &edge.src, he, &edge.tgt)
    })
}

/// Applies a projection map: `{map(x) ↦ m(x)}`.
pub(crate) fn project(m: &Match, map: &Match) -> Match {
    let v = map
        .vertex_pairs()
        .iter()
        .map(|(x, y)| (y.clone(), m.vertex(x).expect("projected vertex").clone()));
    let e = map
        .edge_pairs()
        .iter()
        .map(|(x, y)| (y.clone(), m.edge(x).expect("projected edge").clone()));
    Match::from_pairs(v, e).expect("projection map is injective")
}

fn dep<'c>(
    net: &MsNet,
    n: NodeId,
    i: usize,
    c: &'c MsConfiguration,
) -> Result<&'c MsResult, ReteError> {
    let d = net.nodes[n].deps[i];
    c.sets.get(d).ok_or(ReteError::IncompleteConfiguration(d))
}

/// Inserts a tuple, failing if the match is already present with another marking.
fn put_unique(out: &mut MsResult, n: NodeId, m: Match, phi: Marking) -> Result<(), ReteError> {
    match out.insert(m.clone(), phi) {
        Some(prev) if prev != phi => Err(ReteError::MarkingConflict(n, m)),
        _ => Ok(()),
    }
}

fn put_max(out: &mut MsResult, m: Match, phi: Marking) {
    let slot = out.entry(m).or_insert(phi);
    if *slot < phi {
        *slot = phi;
    }
}

/// Target result set of a node for the dependency results in `c`.
pub fn ms_target_result_set(
    net: &MsNet,
    n: NodeId,
    env: &ExecEnv,
    c: &MsConfiguration,
) -> Result<MsResult, ReteError> {
    let node = &net.nodes[n];
    let mut out = MsResult::new();
    match &node.kind {
        MsKind::VertexInput { v, ty } => {
            let ctx = env.host(node.side)?;
            out.extend(relevant_vertices(ctx, v, ty).map(|m| (m, Marking::INF)));
        }
        MsKind::ForwardNav { v, e, w, ty } | MsKind::BackwardNav { v, e, w, ty } => {
            let forward = matches!(node.kind, MsKind::ForwardNav { .. });
            let graph = env.host(node.side)?.graph;
            let at = if forward { v } else { w };
            for (m, phi) in dep(net, n, 0, c)? {
                let x = m
                    .vertex(at)
                    .expect("dependency matches the navigation vertex");
                for em in navigate(graph, x, forward, (v, e, w, ty)) {
                    if injective_ok(&node.query, &em) {
                        put_unique(&mut out, n, em, *phi)?;
                    }
                }
            }
        }
        MsKind::Join => {
            let (l, r) = (dep(net, n, 0, c)?, dep(net, n, 1, c)?);
            let anchor = overlap_anchor(
                &net.nodes[node.deps[0]].query,
                &net.nodes[node.deps[1]].query,
            );
            let mut index: HashMap<Vec<Id>, Vec<(&Match, Marking)>> = HashMap::new();
            for (m, phi) in r {
                index
                    .entry(key_right(m, &anchor))
                    .or_default()
                    .push((m, *phi));
            }
            for (ml, pl) in l {
                for (mr, pr) in index.get(&key_left(ml, &anchor)).into_iter().flatten() {
                    if let Some(m) = ml.merge(mr) {
                        if injective_ok(&node.query, &m) {
                            put_unique(&mut out, n, m, (*pl).max(*pr))?;
                        }
                    }
                }
            }
        }
        MsKind::Union => {
            for i in 0..node.deps.len() {
                for (m, phi) in dep(net, n, i, c)? {
                    put_max(&mut out, m.clone(), *phi);
                }
            }
        }
        MsKind::Projection { map } => {
            for (m, phi) in dep(net, n, 0, c)? {
                put_max(&mut out, project(m, map), *phi);
            }
        }
        MsKind::Assign(i) => {
            out.extend(dep(net, n, 0, c)?.keys().map(|m| (m.clone(), *i)));
        }
        MsKind::Filter(i) => {
            out.extend(
                dep(net, n, 0, c)?
                    .iter()
                    .filter(|(_, phi)| **phi > *i)
                    .map(|(m, phi)| (m.clone(), *phi)),
            );
        }
        MsKind::SemiJoin { anchor, .. } | MsKind::AntiJoin { anchor } => {
            let anti = matches!(node.kind, MsKind::AntiJoin { .. });
            let (l, r) = (dep(net, n, 0, c)?, dep(net, n, 1, c)?);
            let keys: HashSet<Vec<Id>> = r.keys().map(|m| key_right(m, anchor)).collect();
            out.extend(
                l.iter()
                    .filter(|(m, _)| keys.contains(&key_left(m, anchor)) != anti)
                    .map(|(m, p)| (m.clone(), *p)),
            );
        }
        MsKind::Translate(direction) => {
            let modification = env.modification.ok_or_else(|| {
                ReteError::UnsupportedNet("translation without a modification".into())
            })?;
            for (m, phi) in dep(net, n, 0, c)? {
                if let Some(t) = translate_match(m, modification, *direction) {
                    put_unique(&mut out, n, t, *phi)?;
                }
            }
        }
        MsKind::Dummy => {}
    }
    Ok(out)
}

/// Executes the nodes in `order`, each replacing its result set by its target result set.
pub fn execute_order(
    net: &MsNet,
    env: &ExecEnv,
    order: &[NodeId],
    mut c: MsConfiguration,
) -> Result<MsConfiguration, ReteError> {
    if c.sets.len() < net.nodes.len() {
        return Err(ReteError::IncompleteConfiguration(c.sets.len()));
    }
    for &n in order {
        c.sets[n] = ms_target_result_set(net, n, env, &c)?;
    }
    Ok(c)
}

/// Nodes whose result set differs from their target result set.
pub fn inconsistent_nodes(
    net: &MsNet,
    env: &ExecEnv,
    c: &MsConfiguration,
) -> Result<Vec<NodeId>, ReteError> {
    let mut out = Vec::new();
    for n in 0..net.nodes.len() {
        if ms_target_result_set(net, n, env, c)? != c.sets[n] {
            out.push(n);
        }
    }
    Ok(out)
}

pub fn is_consistent(net: &MsNet, env: &ExecEnv, c: &MsConfiguration) -> Result<bool, ReteError> {
    Ok(inconsistent_nodes(net, env, c)?.is_empty())
}
