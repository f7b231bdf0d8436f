//! Standard RETE nets: join trees over edge inputs, the recursive construction for
//! extended queries, and batch execution to a consistent configuration.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::TypedGraph;
use crate::id::Id;
use crate::morphism::Match;
use crate::query::{Condition, ExtendedQuery, QueryGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReteError {
    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),
    #[error("unsupported net: {0}")]
    UnsupportedNet(String),
    #[error("configuration has no result set for node {0}")]
    IncompleteConfiguration(usize),
    #[error("node {0} produced the match {1:?} with two different markings")]
    MarkingConflict(usize, Match),
    #[error("malformed delta: {0}")]
    MalformedDelta(String),
}

pub type NodeId = usize;

/// The subgraph of a query pattern whose matches a node computes. Id lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPart {
    pub pattern: Arc<QueryGraph>,
    pub vertices: Vec<Id>,
    pub edges: Vec<Id>,
}

impl QueryPart {
    pub fn whole(pattern: &Arc<QueryGraph>) -> Self {
        QueryPart {
            vertices: pattern.sorted_vertex_ids(),
            edges: pattern.sorted_edge_ids(),
            pattern: pattern.clone(),
        }
    }

    pub fn vertex(pattern: &Arc<QueryGraph>, v: &Id) -> Self {
        QueryPart {
            pattern: pattern.clone(),
            vertices: vec![v.clone()],
            edges: Vec::new(),
        }
    }

    pub fn edge(pattern: &Arc<QueryGraph>, e: &Id) -> Self {
        let edge = pattern.edge(e).expect("pattern edge");
        let mut vertices = vec![edge.src.clone(), edge.tgt.clone()];
        vertices.sort();
        vertices.dedup();
        QueryPart {
            pattern: pattern.clone(),
            vertices,
            edges: vec![e.clone()],
        }
    }

    pub fn union(&self, other: &QueryPart) -> QueryPart {
        let mut vertices: Vec<Id> = self
            .vertices
            .iter()
            .chain(&other.vertices)
            .cloned()
            .collect();
        vertices.sort();
        vertices.dedup();
        let mut edges: Vec<Id> = self.edges.iter().chain(&other.edges).cloned().collect();
        edges.sort();
        edges.dedup();
        QueryPart {
            pattern: self.pattern.clone(),
            vertices,
            edges,
        }
    }

    /// `|V^Q| + |E^Q|`, the size of every match for this part.
    pub fn size(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn injective(&self) -> bool {
        self.pattern.injective
    }

    /// The part as a standalone query graph.
    pub fn to_graph(&self) -> QueryGraph {
        let mut g = TypedGraph::new(self.pattern.types().clone());
        for v in &self.vertices {
            g.add_vertex(
                v.clone(),
                self.pattern.vertex_type(v).expect("pattern vertex").clone(),
            )
            .expect("subgraph");
        }
        for e in &self.edges {
            let edge = self.pattern.edge(e).expect("pattern edge");
            g.add_edge(
                e.clone(),
                edge.ty.clone(),
                edge.src.clone(),
                edge.tgt.clone(),
            )
            .expect("subgraph");
        }
        QueryGraph::new(g).injective(self.pattern.injective)
    }

    pub fn label(&self) -> String {
        let mut parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        for e in &self.edges {
            let edge = self.pattern.edge(e).expect("pattern edge");
            parts.push(format!("{}:{}→{}", e, edge.src, edge.tgt));
        }
        parts.join(",")
    }
}

/// Identity anchor over the shared ids of two parts of the same pattern.
pub fn overlap_anchor(l: &QueryPart, r: &QueryPart) -> Match {
    let vs: Vec<(Id, Id)> = l
        .vertices
        .iter()
        .filter(|v| r.vertices.contains(v))
        .map(|v| (v.clone(), v.clone()))
        .collect();
    let es: Vec<(Id, Id)> = l
        .edges
        .iter()
        .filter(|e| r.edges.contains(e))
        .map(|e| (e.clone(), e.clone()))
        .collect();
    Match::from_sorted(vs, es)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiJoinVariant {
    /// Agreement on the shared subgraph of left and right queries.
    Overlap,
    /// `m_l = m_r ∘ a` for an anchor defined on all of the left query.
    TotalAnchor,
    /// `m_l|_{Q_p} = m_r ∘ a` for an anchor defined on `Q_p` only.
    PartialAnchor,
}

pub fn classify_anchor(anchor: &Match, left: &QueryPart, right: &QueryPart) -> SemiJoinVariant {
    let identity =
        anchor.pairs().all(|(a, b)| a == b) && Arc::ptr_eq(&left.pattern, &right.pattern);
    if identity {
        SemiJoinVariant::Overlap
    } else if anchor.vertex_pairs().len() == left.vertices.len()
        && anchor.edge_pairs().len() == left.edges.len()
    {
        SemiJoinVariant::TotalAnchor
    } else {
        SemiJoinVariant::PartialAnchor
    }
}

/// Values of `m` at the anchor's domain (left side) or image (right side).
pub(crate) fn key_left(m: &Match, anchor: &Match) -> Vec<Id> {
    anchor
        .vertex_pairs()
        .iter()
        .map(|(x, _)| m.vertex(x).expect("anchor domain mapped").clone())
        .chain(
            anchor
                .edge_pairs()
                .iter()
                .map(|(x, _)| m.edge(x).expect("anchor domain mapped").clone()),
        )
        .collect()
}

pub(crate) fn key_right(m: &Match, anchor: &Match) -> Vec<Id> {
    anchor
        .vertex_pairs()
        .iter()
        .map(|(_, y)| m.vertex(y).expect("anchor image mapped").clone())
        .chain(
            anchor
                .edge_pairs()
                .iter()
                .map(|(_, y)| m.edge(y).expect("anchor image mapped").clone()),
        )
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StdKind {
    VertexInput {
        v: Id,
        ty: Id,
    },
    EdgeInput {
        v: Id,
        e: Id,
        w: Id,
        ty: Id,
    },
    Join,
    SemiJoin {
        anchor: Match,
        variant: SemiJoinVariant,
    },
    AntiJoin {
        anchor: Match,
    },
}

#[derive(Debug, Clone)]
pub struct StdNode {
    pub kind: StdKind,
    pub query: QueryPart,
    pub deps: Vec<NodeId>,
    pub height: u32,
}

#[derive(Debug, Clone)]
pub struct ReteNet {
    pub nodes: Vec<StdNode>,
    pub production: NodeId,
}

impl ReteNet {
    fn push(&mut self, node: StdNode) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn height(&self) -> u32 {
        self.nodes[self.production].height
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Dependencies before dependents, starting from the leaves of the production's tree.
    pub fn reverse_topological_order(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::with_capacity(self.nodes.len());
        fn visit(net: &ReteNet, n: NodeId, seen: &mut [bool], out: &mut Vec<NodeId>) {
            if seen[n] {
                return;
            }
            seen[n] = true;
            for &d in &net.nodes[n].deps {
                visit(net, d, seen, out);
            }
            out.push(n);
        }
        visit(self, self.production, &mut seen, &mut out);
        for n in 0..self.nodes.len() {
            visit(self, n, &mut seen, &mut out);
        }
        out
    }
}

/// Edges of `q` in depth-first order from the smallest vertex id, visiting the incident
/// edges of each vertex in id order. Every edge after the first touches an earlier one.
pub fn canonical_edge_order(q: &QueryGraph) -> Vec<Id> {
    let mut order = Vec::new();
    let mut seen_v = HashSet::new();
    let mut seen_e = HashSet::new();
    fn dfs(
        q: &QueryGraph,
        u: &Id,
        seen_v: &mut HashSet<Id>,
        seen_e: &mut HashSet<Id>,
        order: &mut Vec<Id>,
    ) {
        seen_v.insert(u.clone());
        let mut inc: Vec<Id> = q.out_edges(u).chain(q.in_edges(u)).cloned().collect();
        inc.sort();
        inc.dedup();
        for e in inc {
            if seen_e.insert(e.clone()) {
                order.push(e.clone());
                let edge = q.edge(&e).expect("indexed");
                let w = if edge.src == *u { &edge.tgt } else { &edge.src };
                if !seen_v.contains(w) {
                    dfs(q, &w.clone(), seen_v, seen_e, order);
                }
            }
        }
    }
    if let Some(start) = q.sorted_vertex_ids().first() {
        dfs(q, start, &mut seen_v, &mut seen_e, &mut order);
    }
    order
}

fn check_plain(q: &QueryGraph) -> Result<(), ReteError> {
    if q.vertex_count() == 0 {
        return Err(ReteError::UnsupportedQuery("empty pattern".into()));
    }
    if !q.is_weakly_connected() {
        return Err(ReteError::UnsupportedQuery(
            "pattern is not weakly connected".into(),
        ));
    }
    Ok(())
}

/// Left-deep join tree over edge inputs in canonical edge order.
pub fn build_join_tree(q: &Arc<QueryGraph>) -> Result<ReteNet, ReteError> {
    let mut net = ReteNet {
        nodes: Vec::new(),
        production: 0,
    };
    net.production = add_join_tree(&mut net, q)?;
    Ok(net)
}

fn add_join_tree(net: &mut ReteNet, q: &Arc<QueryGraph>) -> Result<NodeId, ReteError> {
    check_plain(q)?;
    let order = canonical_edge_order(q);
    if order.is_empty() {
        let v = q.sorted_vertex_ids()[0].clone();
        let ty = q.vertex_type(&v).expect("vertex").clone();
        return Ok(net.push(StdNode {
            query: QueryPart::vertex(q, &v),
            kind: StdKind::VertexInput { v, ty },
            deps: Vec::new(),
            height: 0,
        }));
    }
    let input = |net: &mut ReteNet, e: &Id| {
        let edge = q.edge(e).expect("edge").clone();
        net.push(StdNode {
            query: QueryPart::edge(q, e),
            kind: StdKind::EdgeInput {
                v: edge.src,
                e: e.clone(),
                w: edge.tgt,
                ty: edge.ty,
            },
            deps: Vec::new(),
            height: 0,
        })
    };
    let mut root = input(net, &order[0]);
    for e in &order[1..] {
        let right = input(net, e);
        let query = net.nodes[root].query.union(&net.nodes[right].query);
        let height = 1 + net.nodes[root].height.max(net.nodes[right].height);
        root = net.push(StdNode {
            kind: StdKind::Join,
            query,
            deps: vec![root, right],
            height,
        });
    }
    Ok(root)
}

/// Net for an extended query: semi-joins for existential conditions, anti-joins for
/// negation and two chained semi-joins for conjunction.
pub fn build_extended_net(q: &ExtendedQuery) -> Result<ReteNet, ReteError> {
    let mut net = ReteNet {
        nodes: Vec::new(),
        production: 0,
    };
    net.production = add_extended(&mut net, &q.pattern, &q.condition)?;
    Ok(net)
}

fn add_filter(net: &mut ReteNet, left: NodeId, right: NodeId, anchor: Match, anti: bool) -> NodeId {
    let query = net.nodes[left].query.clone();
    let height = 1 + net.nodes[left].height.max(net.nodes[right].height);
    let kind = if anti {
        StdKind::AntiJoin { anchor }
    } else {
        let variant = classify_anchor(&anchor, &query, &net.nodes[right].query);
        StdKind::SemiJoin { anchor, variant }
    };
    net.push(StdNode {
        kind,
        query,
        deps: vec![left, right],
        height,
    })
}

fn add_extended(
    net: &mut ReteNet,
    q: &Arc<QueryGraph>,
    psi: &Condition,
) -> Result<NodeId, ReteError> {
    match psi {
        Condition::True => add_join_tree(net, q),
        Condition::Exists {
            anchor,
            target,
            child,
        } => {
            let left = add_join_tree(net, q)?;
            let right = add_extended(net, target, child)?;
            Ok(add_filter(net, left, right, anchor.clone(), false))
        }
        Condition::Not(child) => {
            let left = add_join_tree(net, q)?;
            let right = add_extended(net, q, child)?;
            Ok(add_filter(net, left, right, q.identity(), true))
        }
        Condition::And(a, b) => {
            let left = add_join_tree(net, q)?;
            let r1 = add_extended(net, q, a)?;
            let s1 = add_filter(net, left, r1, q.identity(), false);
            let r2 = add_extended(net, q, b)?;
            Ok(add_filter(net, s1, r2, q.identity(), false))
        }
    }
}

/// Per-node result sets of a standard net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub sets: Vec<HashSet<Match>>,
}

impl Configuration {
    pub fn empty(net: &ReteNet) -> Self {
        Configuration {
            sets: vec![HashSet::new(); net.nodes.len()],
        }
    }

    pub fn tuples(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    /// `Σ_n Σ_{m ∈ C(n)} |m|`.
    pub fn effective_size(&self, net: &ReteNet) -> usize {
        self.sets
            .iter()
            .zip(&net.nodes)
            .map(|(s, n)| s.len() * n.query.size())
            .sum()
    }
}

pub(crate) fn edge_match(v: &Id, e: &Id, w: &Id, src: &Id, he: &Id, tgt: &Id) -> Option<Match> {
    if v == w && src != tgt {
        return None;
    }
    Some(Match::single_edge(
        (v.clone(), src.clone()),
        (e.clone(), he.clone()),
        (w.clone(), tgt.clone()),
    ))
}

pub(crate) fn injective_ok(part: &QueryPart, m: &Match) -> bool {
    !part.injective() || m.is_injective()
}

/// Target result set of a node for the dependency results in `c`.
pub fn target_result_set(
    net: &ReteNet,
    n: NodeId,
    host: &TypedGraph,
    c: &Configuration,
) -> Result<HashSet<Match>, ReteError> {
    let node = &net.nodes[n];
    let dep = |i: usize| -> Result<&HashSet<Match>, ReteError> {
        let d = node.deps[i];
        c.sets.get(d).ok_or(ReteError::IncompleteConfiguration(d))
    };
    Ok(match &node.kind {
        StdKind::VertexInput { v, ty } => host
            .vertices_of_type(ty)
            .map(|h| Match::single_vertex(v.clone(), h.clone()))
            .collect(),
        StdKind::EdgeInput { v, e, w, ty } => host
            .edges_of_type(ty)
            .filter_map(|he| {
                let edge = host.edge(he).expect("indexed");
                edge_match(v, e, w, &edge.src, he, &edge.tgt)
            })
            .filter(|m| injective_ok(&node.query, m))
            .collect(),
        StdKind::Join => {
            let (l, r) = (dep(0)?, dep(1)?);
            let anchor = overlap_anchor(
                &net.nodes[node.deps[0]].query,
                &net.nodes[node.deps[1]].query,
            );
            let mut index: HashMap<Vec<Id>, Vec<&Match>> = HashMap::new();
            for m in r {
                index.entry(key_right(m, &anchor)).or_default().push(m);
            }
            let mut out = HashSet::new();
            for ml in l {
                if let Some(rs) = index.get(&key_left(ml, &anchor)) {
                    for mr in rs {
                        if let Some(m) = ml.merge(mr) {
                            if injective_ok(&node.query, &m) {
                                out.insert(m);
                            }
                        }
                    }
                }
            }
            out
        }
        StdKind::SemiJoin { anchor, .. } | StdKind::AntiJoin { anchor } => {
            let anti = matches!(node.kind, StdKind::AntiJoin { .. });
            let (l, r) = (dep(0)?, dep(1)?);
            let keys: HashSet<Vec<Id>> = r.iter().map(|m| key_right(m, anchor)).collect();
            l.iter()
                .filter(|m| keys.contains(&key_left(m, anchor)) != anti)
                .cloned()
                .collect()
        }
    })
}

/// Executes the nodes in `order`, each replacing its result set by its target result set.
pub fn execute_sequence(
    order: &[NodeId],
    net: &ReteNet,
    host: &TypedGraph,
    mut c: Configuration,
) -> Result<Configuration, ReteError> {
    if c.sets.len() < net.nodes.len() {
        return Err(ReteError::IncompleteConfiguration(c.sets.len()));
    }
    for &n in order {
        c.sets[n] = target_result_set(net, n, host, &c)?;
    }
    Ok(c)
}

/// Runs the net from the empty configuration in reverse topological order.
pub fn execute(net: &ReteNet, host: &TypedGraph) -> Result<Configuration, ReteError> {
    execute_sequence(
        &net.reverse_topological_order(),
        net,
        host,
        Configuration::empty(net),
    )
}

/// Whether every node holds exactly its target result set.
pub fn is_consistent(
    net: &ReteNet,
    host: &TypedGraph,
    c: &Configuration,
) -> Result<bool, ReteError> {
    for n in 0..net.nodes.len() {
        if target_result_set(net, n, host, c)? != c.sets[n] {
            return Ok(false);
        }
    }
    Ok(true)
}
