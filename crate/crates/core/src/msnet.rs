//! Marking-sensitive nets, the local navigation and request projection structures,
//! and the `localize` / `localize^Ψ` constructions with their execution orders.

use std::sync::Arc;

use crate::id::Id;
use crate::marking::Marking;
use crate::modification::Direction;
use crate::morphism::Match;
use crate::query::{Condition, ExtendedQuery, QueryGraph};
use crate::rete::{
    build_join_tree, classify_anchor, NodeId, QueryPart, ReteError, ReteNet, SemiJoinVariant,
    StdKind,
};

/// Which host graph a node is evaluated against. Only the two-sided diff uses `Target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MsKind {
    VertexInput {
        v: Id,
        ty: Id,
    },
    /// Edges `v -e-> w` leaving vertices held by the dependency (a match of `{v}`).
    ForwardNav {
        v: Id,
        e: Id,
        w: Id,
        ty: Id,
    },
    /// Edges `v -e-> w` entering vertices held by the dependency (a match of `{w}`).
    BackwardNav {
        v: Id,
        e: Id,
        w: Id,
        ty: Id,
    },
    Join,
    Union,
    /// Restriction to the node's query; `map` sends dependency ids to node ids.
    Projection {
        map: Match,
    },
    Assign(Marking),
    /// Keeps tuples whose marking is strictly greater than the threshold.
    Filter(Marking),
    SemiJoin {
        anchor: Match,
        variant: SemiJoinVariant,
    },
    AntiJoin {
        anchor: Match,
    },
    Translate(Direction),
    Dummy,
}

impl MsKind {
    pub fn name(&self) -> &'static str {
        match self {
            MsKind::VertexInput { .. } => "vertex",
            MsKind::ForwardNav { .. } => "forward",
            MsKind::BackwardNav { .. } => "backward",
            MsKind::Join => "join",
            MsKind::Union => "union",
            MsKind::Projection { .. } => "projection",
            MsKind::Assign(_) => "assign",
            MsKind::Filter(_) => "filter",
            MsKind::SemiJoin { .. } => "semijoin",
            MsKind::AntiJoin { .. } => "antijoin",
            MsKind::Translate(_) => "translate",
            MsKind::Dummy => "dummy",
        }
    }

    pub fn label(&self) -> String {
        match self {
            MsKind::VertexInput { v, .. } => format!("[{v}]"),
            MsKind::ForwardNav { v, w, .. } => format!("[{v} →n {w}]"),
            MsKind::BackwardNav { v, w, .. } => format!("[{w} ←n {v}]"),
            MsKind::Join => "⋈".into(),
            MsKind::Union => "∪".into(),
            MsKind::Projection { map } => {
                let parts: Vec<String> = map
                    .pairs()
                    .map(|(a, b)| {
                        if a == b {
                            a.to_string()
                        } else {
                            format!("{a}↦{b}")
                        }
                    })
                    .collect();
                format!("π[{}]", parts.join(","))
            }
            MsKind::Assign(i) => format!("φ := {i}"),
            MsKind::Filter(i) => format!("φ > {i}"),
            MsKind::SemiJoin { .. } => "⋉".into(),
            MsKind::AntiJoin { .. } => "▷".into(),
            MsKind::Translate(Direction::ToSource) => "→ f∘g⁻¹".into(),
            MsKind::Translate(Direction::ToTarget) => "→ g∘f⁻¹".into(),
            MsKind::Dummy => "∅".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MsNode {
    pub kind: MsKind,
    pub query: QueryPart,
    pub deps: Vec<NodeId>,
    pub height: u32,
    pub side: Side,
}

#[derive(Debug, Clone)]
pub struct MsNet {
    pub nodes: Vec<MsNode>,
    pub production: NodeId,
}

impl MsNet {
    pub fn new() -> Self {
        MsNet {
            nodes: Vec::new(),
            production: 0,
        }
    }

    pub(crate) fn add(
        &mut self,
        kind: MsKind,
        query: QueryPart,
        deps: Vec<NodeId>,
        height: u32,
        side: Side,
    ) -> NodeId {
        self.nodes.push(MsNode {
            kind,
            query,
            deps,
            height,
            side,
        });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn height(&self, n: NodeId) -> u32 {
        self.nodes[n].height
    }

    /// Nodes that list `n` as a dependency.
    pub fn dependents(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &d in &node.deps {
                out[d].push(i);
            }
        }
        out
    }
}

impl Default for MsNet {
    fn default() -> Self {
        MsNet::new()
    }
}

/// Options for the localization constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalizeOptions {
    /// Feed semi-joins and anti-joins of condition checks from the ∞-filter of their
    /// request projection structure instead of the pattern net's production node, so
    /// that only requested matches are judged.
    pub guard_condition_inputs: bool,
    /// Replace the vertex inputs of nested pattern nets by dummies; those nets then only
    /// compute what is requested from the outermost pattern.
    pub prune_condition_inputs: bool,
}

impl Default for LocalizeOptions {
    fn default() -> Self {
        LocalizeOptions {
            guard_condition_inputs: true,
            prune_condition_inputs: false,
        }
    }
}

impl LocalizeOptions {
    /// The constructions without the input guard.
    pub fn unguarded() -> Self {
        LocalizeOptions {
            guard_condition_inputs: false,
            prune_condition_inputs: false,
        }
    }
}

/// The seven nodes replacing an edge input `[v -e-> w]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lns {
    pub v_input: NodeId,
    pub w_input: NodeId,
    pub union_v: NodeId,
    pub union_w: NodeId,
    pub forward: NodeId,
    pub backward: NodeId,
    pub top: NodeId,
}

impl Lns {
    /// Reverse topological order of the structure.
    pub fn order(&self) -> [NodeId; 7] {
        [
            self.v_input,
            self.w_input,
            self.union_v,
            self.union_w,
            self.forward,
            self.backward,
            self.top,
        ]
    }
}

/// Filter, projection and assignment carrying requests from one subnet into another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rps {
    pub filter: NodeId,
    pub projection: NodeId,
    pub assign: NodeId,
    /// The extension point the assignment feeds.
    pub target: NodeId,
}

impl Rps {
    pub fn order(&self) -> [NodeId; 3] {
        [self.filter, self.projection, self.assign]
    }
}

/// Shape of a localized plain net, mirroring the join tree it came from.
#[derive(Debug, Clone)]
pub enum Localized {
    Edge(Lns),
    /// A pattern without edges: the vertex input and a union serving as extension point.
    Vertex {
        input: NodeId,
        union: NodeId,
    },
    Join {
        join: NodeId,
        left: Box<Localized>,
        right: Box<Localized>,
        rps_l: Rps,
        rps_r: Rps,
    },
}

impl Localized {
    pub fn production(&self) -> NodeId {
        match self {
            Localized::Edge(l) => l.top,
            Localized::Vertex { union, .. } => *union,
            Localized::Join { join, .. } => *join,
        }
    }

    /// The recursive execution order with its repeated subsequences.
    pub fn order(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.push_order(&mut out);
        out
    }

    fn push_order(&self, out: &mut Vec<NodeId>) {
        match self {
            Localized::Edge(l) => out.extend(l.order()),
            Localized::Vertex { input, union } => out.extend([*input, *union]),
            Localized::Join {
                join,
                left,
                right,
                rps_l,
                rps_r,
            } => {
                out.extend(rps_r.order());
                left.push_order(out);
                out.extend(rps_l.order());
                right.push_order(out);
                out.extend(rps_r.order());
                left.push_order(out);
                out.push(*join);
            }
        }
    }

    /// Local navigation structures from left to right.
    pub fn structures(&self) -> Vec<Lns> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Lns>) {
        match self {
            Localized::Edge(l) => out.push(*l),
            Localized::Vertex { .. } => {}
            Localized::Join { left, right, .. } => {
                left.collect(out);
                right.collect(out);
            }
        }
    }

    /// Request projection structures, outermost join first.
    pub fn request_structures(&self) -> Vec<Rps> {
        match self {
            Localized::Join {
                left,
                right,
                rps_l,
                rps_r,
                ..
            } => {
                let mut out = vec![*rps_l, *rps_r];
                out.extend(left.request_structures());
                out.extend(right.request_structures());
                out
            }
            _ => Vec::new(),
        }
    }

    /// The union fed by `[v]` in the first structure with a vertex input for `v`.
    pub fn extension_point(&self, net: &MsNet, v: &Id) -> Option<NodeId> {
        match self {
            Localized::Vertex { input, union } => match &net.nodes[*input].query.vertices[..] {
                [x] if x == v => Some(*union),
                _ => None,
            },
            Localized::Edge(l) => match &net.nodes[l.forward].kind {
                MsKind::ForwardNav { v: src, w: tgt, .. } => {
                    if src == v {
                        Some(l.union_v)
                    } else if tgt == v {
                        Some(l.union_w)
                    } else {
                        None
                    }
                }
                _ => None,
            },
            Localized::Join { left, right, .. } => left
                .extension_point(net, v)
                .or_else(|| right.extension_point(net, v)),
        }
    }

    /// Vertex inputs of all structures.
    pub fn inputs(&self) -> Vec<NodeId> {
        match self {
            Localized::Edge(l) => vec![l.v_input, l.w_input],
            Localized::Vertex { input, .. } => vec![*input],
            Localized::Join { left, right, .. } => {
                let mut out = left.inputs();
                out.extend(right.inputs());
                out
            }
        }
    }
}

/// A localized plain net.
#[derive(Debug, Clone)]
pub struct LocalizedNet {
    pub net: MsNet,
    pub root: Localized,
}

impl LocalizedNet {
    pub fn order(&self) -> Vec<NodeId> {
        self.root.order()
    }
}

/// Localizes a plain standard net: each edge input becomes a local navigation structure
/// and each join gains two request projection structures.
pub fn localize(std: &ReteNet) -> Result<LocalizedNet, ReteError> {
    let mut net = MsNet::new();
    let root = localize_node(&mut net, std, std.production, Side::Source)?;
    net.production = root.production();
    Ok(LocalizedNet { net, root })
}

/// Execution order of a localized plain net.
pub fn order_of(l: &LocalizedNet) -> Vec<NodeId> {
    l.root.order()
}

fn localize_node(
    net: &mut MsNet,
    std: &ReteNet,
    n: NodeId,
    side: Side,
) -> Result<Localized, ReteError> {
    let node = &std.nodes[n];
    match &node.kind {
        StdKind::VertexInput { v, ty } => {
            if n != std.production {
                return Err(ReteError::UnsupportedNet(
                    "vertex input below a join".into(),
                ));
            }
            let q = node.query.clone();
            let input = net.add(
                MsKind::VertexInput {
                    v: v.clone(),
                    ty: ty.clone(),
                },
                q.clone(),
                vec![],
                0,
                side,
            );
            let union = net.add(MsKind::Union, q, vec![input], 0, side);
            Ok(Localized::Vertex { input, union })
        }
        StdKind::EdgeInput { v, e, w, ty } => Ok(Localized::Edge(add_lns(
            net,
            &node.query,
            v,
            e,
            w,
            ty,
            side,
        ))),
        StdKind::Join => {
            let [l, r] = node.deps[..] else {
                return Err(ReteError::UnsupportedNet(
                    "join without two dependencies".into(),
                ));
            };
            let left = localize_node(net, std, l, side)?;
            let right = localize_node(net, std, r, side)?;
            let h = node.height;
            let (lq, rq) = (&std.nodes[l].query, &std.nodes[r].query);
            let Some(v) = lq
                .vertices
                .iter()
                .find(|x| rq.vertices.contains(x))
                .cloned()
            else {
                return Err(ReteError::UnsupportedNet(
                    "join without shared vertex".into(),
                ));
            };
            let join = net.add(
                MsKind::Join,
                node.query.clone(),
                vec![left.production(), right.production()],
                h,
                side,
            );
            let mark = Marking::from(h);
            let ext_r = right
                .extension_point(net, &v)
                .expect("shared vertex occurs in right subnet");
            let ext_l = left
                .extension_point(net, &v)
                .expect("shared vertex occurs in left subnet");
            let identity = Match::single_vertex(v.clone(), v.clone());
            let rps_l = add_rps(
                net,
                left.production(),
                mark,
                mark,
                identity.clone(),
                QueryPart::vertex(&lq.pattern, &v),
                ext_r,
            );
            let rps_r = add_rps(
                net,
                right.production(),
                mark,
                mark,
                identity,
                QueryPart::vertex(&rq.pattern, &v),
                ext_l,
            );
            Ok(Localized::Join {
                join,
                left: Box::new(left),
                right: Box::new(right),
                rps_l,
                rps_r,
            })
        }
        _ => Err(ReteError::UnsupportedNet(format!(
            "node {n} is not part of a plain join tree"
        ))),
    }
}

fn add_lns(net: &mut MsNet, q: &QueryPart, v: &Id, e: &Id, w: &Id, ty: &Id, side: Side) -> Lns {
    let pattern = &q.pattern;
    let qv = QueryPart::vertex(pattern, v);
    let qw = QueryPart::vertex(pattern, w);
    let vty = pattern.vertex_type(v).expect("pattern vertex").clone();
    let wty = pattern.vertex_type(w).expect("pattern vertex").clone();
    let v_input = net.add(
        MsKind::VertexInput {
            v: v.clone(),
            ty: vty,
        },
        qv.clone(),
        vec![],
        0,
        side,
    );
    let w_input = net.add(
        MsKind::VertexInput {
            v: w.clone(),
            ty: wty,
        },
        qw.clone(),
        vec![],
        0,
        side,
    );
    let union_v = net.add(MsKind::Union, qv, vec![v_input], 0, side);
    let union_w = net.add(MsKind::Union, qw, vec![w_input], 0, side);
    let nav = |fwd: bool| {
        let (v, e, w, ty) = (v.clone(), e.clone(), w.clone(), ty.clone());
        if fwd {
            MsKind::ForwardNav { v, e, w, ty }
        } else {
            MsKind::BackwardNav { v, e, w, ty }
        }
    };
    let forward = net.add(nav(true), q.clone(), vec![union_v], 0, side);
    let backward = net.add(nav(false), q.clone(), vec![union_w], 0, side);
    let top = net.add(MsKind::Union, q.clone(), vec![forward, backward], 0, side);
    Lns {
        v_input,
        w_input,
        union_v,
        union_w,
        forward,
        backward,
        top,
    }
}

/// Adds filter, projection and assignment fed by `feed`, and connects the assignment to
/// the extension point `ext`. `part` is the single-vertex query of the extension point.
pub(crate) fn add_rps(
    net: &mut MsNet,
    feed: NodeId,
    threshold: Marking,
    assign: Marking,
    map: Match,
    part: QueryPart,
    ext: NodeId,
) -> Rps {
    let (h, side) = (net.nodes[feed].height, net.nodes[feed].side);
    let fq = net.nodes[feed].query.clone();
    let filter = net.add(MsKind::Filter(threshold), fq, vec![feed], h, side);
    let projection = net.add(
        MsKind::Projection { map },
        part.clone(),
        vec![filter],
        h,
        side,
    );
    let assign = net.add(MsKind::Assign(assign), part, vec![projection], h, side);
    net.nodes[ext].deps.push(assign);
    Rps {
        filter,
        projection,
        assign,
        target: ext,
    }
}

/// Localized net for a plain pattern, built from the canonical join tree.
pub(crate) fn localize_pattern(
    net: &mut MsNet,
    q: &Arc<QueryGraph>,
    side: Side,
    prune: bool,
) -> Result<Localized, ReteError> {
    let std = build_join_tree(q)?;
    let l = localize_node(net, &std, std.production, side)?;
    if prune {
        for i in l.inputs() {
            net.nodes[i].kind = MsKind::Dummy;
        }
    }
    Ok(l)
}

/// Shape of a `localize^Ψ` net.
#[derive(Debug, Clone)]
pub enum PsiNet {
    True(Localized),
    Exists {
        base: Localized,
        rps: Rps,
        child: Box<PsiNet>,
        join: NodeId,
    },
    Not {
        base: Localized,
        rps: Rps,
        child: Box<PsiNet>,
        join: NodeId,
    },
    And {
        base: Localized,
        rps1: Rps,
        child1: Box<PsiNet>,
        join1: NodeId,
        rps2: Rps,
        child2: Box<PsiNet>,
        join2: NodeId,
    },
}

impl PsiNet {
    pub fn production(&self) -> NodeId {
        match self {
            PsiNet::True(l) => l.production(),
            PsiNet::Exists { join, .. } | PsiNet::Not { join, .. } => *join,
            PsiNet::And { join2, .. } => *join2,
        }
    }

    /// The localized net for the context pattern.
    pub fn base(&self) -> &Localized {
        match self {
            PsiNet::True(l) => l,
            PsiNet::Exists { base, .. } | PsiNet::Not { base, .. } | PsiNet::And { base, .. } => {
                base
            }
        }
    }

    pub fn order(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.push_order(&mut out);
        out
    }

    fn push_order(&self, out: &mut Vec<NodeId>) {
        match self {
            PsiNet::True(l) => l.push_order(out),
            PsiNet::Exists {
                base,
                rps,
                child,
                join,
            }
            | PsiNet::Not {
                base,
                rps,
                child,
                join,
            } => {
                base.push_order(out);
                out.extend(rps.order());
                child.push_order(out);
                out.push(*join);
            }
            PsiNet::And {
                base,
                rps1,
                child1,
                join1,
                rps2,
                child2,
                join2,
            } => {
                base.push_order(out);
                out.extend(rps1.order());
                child1.push_order(out);
                out.push(*join1);
                out.extend(rps2.order());
                child2.push_order(out);
                out.push(*join2);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsiLocalizedNet {
    pub net: MsNet,
    pub root: PsiNet,
}

impl PsiLocalizedNet {
    pub fn order(&self) -> Vec<NodeId> {
        self.root.order()
    }
}

/// Localized net for an extended query.
pub fn localize_psi(
    q: &ExtendedQuery,
    opts: LocalizeOptions,
) -> Result<PsiLocalizedNet, ReteError> {
    let mut net = MsNet::new();
    let root = localize_psi_into(&mut net, &q.pattern, &q.condition, Side::Source, opts, true)?;
    net.production = root.production();
    Ok(PsiLocalizedNet { net, root })
}

/// Execution order of a `localize^Ψ` net.
pub fn order_psi(l: &PsiLocalizedNet) -> Vec<NodeId> {
    l.root.order()
}

/// Connects an ∞-request from `feed` (matches of `q`) into `child`, keyed on the smallest
/// vertex `v` of the anchor domain, renamed to its image.
fn request_into(
    net: &mut MsNet,
    feed: NodeId,
    anchor: &Match,
    target: &Arc<QueryGraph>,
    child: &Localized,
) -> Result<Rps, ReteError> {
    let (v, av) = anchor
        .vertex_pairs()
        .first()
        .cloned()
        .ok_or_else(|| ReteError::UnsupportedQuery("anchor maps no vertex".into()))?;
    let ext = child.extension_point(net, &av).ok_or_else(|| {
        ReteError::UnsupportedQuery(format!("anchor image `{av}` has no vertex input"))
    })?;
    let h = Marking::from(net.nodes[feed].height);
    Ok(add_rps(
        net,
        feed,
        h,
        Marking::INF,
        Match::single_vertex(v, av.clone()),
        QueryPart::vertex(target, &av),
        ext,
    ))
}

fn add_condition_join(
    net: &mut MsNet,
    left: NodeId,
    right: NodeId,
    anchor: Match,
    anti: bool,
    side: Side,
) -> NodeId {
    let query = net.nodes[left].query.clone();
    let height = 1 + net.nodes[left].height.max(net.nodes[right].height);
    let kind = if anti {
        MsKind::AntiJoin { anchor }
    } else {
        let variant = classify_anchor(&anchor, &query, &net.nodes[right].query);
        MsKind::SemiJoin { anchor, variant }
    };
    net.add(kind, query, vec![left, right], height, side)
}

fn smallest_vertex_anchor(q: &QueryGraph) -> Match {
    let v = q.sorted_vertex_ids()[0].clone();
    Match::single_vertex(v.clone(), v)
}

pub(crate) fn localize_psi_into(
    net: &mut MsNet,
    q: &Arc<QueryGraph>,
    psi: &Condition,
    side: Side,
    opts: LocalizeOptions,
    top: bool,
) -> Result<PsiNet, ReteError> {
    let prune = opts.prune_condition_inputs && !top;
    let base = localize_pattern(net, q, side, prune)?;
    let p = base.production();
    let guard = |rps: &Rps, p: NodeId| {
        if opts.guard_condition_inputs {
            rps.filter
        } else {
            p
        }
    };
    Ok(match psi {
        Condition::True => PsiNet::True(base),
        Condition::Exists {
            anchor,
            target,
            child,
        } => {
            let c = localize_psi_into(net, target, child, side, opts, false)?;
            let rps = request_into(net, p, anchor, target, c.base())?;
            let join = add_condition_join(
                net,
                guard(&rps, p),
                c.production(),
                anchor.clone(),
                false,
                side,
            );
            PsiNet::Exists {
                base,
                rps,
                child: Box::new(c),
                join,
            }
        }
        Condition::Not(child) => {
            let c = localize_psi_into(net, q, child, side, opts, false)?;
            let rps = request_into(net, p, &smallest_vertex_anchor(q), q, c.base())?;
            let join = add_condition_join(
                net,
                guard(&rps, p),
                c.production(),
                q.identity(),
                true,
                side,
            );
            PsiNet::Not {
                base,
                rps,
                child: Box::new(c),
                join,
            }
        }
        Condition::And(a, b) => {
            let key = smallest_vertex_anchor(q);
            let c1 = localize_psi_into(net, q, a, side, opts, false)?;
            let rps1 = request_into(net, p, &key, q, c1.base())?;
            let join1 = add_condition_join(
                net,
                guard(&rps1, p),
                c1.production(),
                q.identity(),
                false,
                side,
            );
            let c2 = localize_psi_into(net, q, b, side, opts, false)?;
            let rps2 = request_into(net, join1, &key, q, c2.base())?;
            let join2 = add_condition_join(
                net,
                guard(&rps2, join1),
                c2.production(),
                q.identity(),
                false,
                side,
            );
            PsiNet::And {
                base,
                rps1,
                child1: Box::new(c1),
                join1,
                rps2,
                child2: Box::new(c2),
                join2,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{interface_condition_query, path_query};

    #[test]
    fn single_edge_localizes_to_one_structure() {
        let q = Arc::new(
            QueryGraph::build(
                crate::fixtures::java_types(),
                &[("c", "Class"), ("f", "Field")],
                &[("e", "fe", "c", "f")],
            )
            .unwrap(),
        );
        let l = localize(&build_join_tree(&q).unwrap()).unwrap();
        assert_eq!(l.net.len(), 7);
        assert!(l.root.request_structures().is_empty());
        assert_eq!(l.order().len(), 7);
    }

    #[test]
    fn path_query_localizes_with_two_request_structures() {
        let l = localize(&build_join_tree(&path_query()).unwrap()).unwrap();
        assert_eq!(l.net.len(), 7 + 7 + 3 + 3 + 1);
        let rps = l.root.request_structures();
        assert_eq!(rps.len(), 2);
        for r in rps {
            assert_eq!(
                l.net.nodes[r.filter].kind,
                MsKind::Filter(Marking::from(1u32))
            );
            assert_eq!(
                l.net.nodes[r.assign].kind,
                MsKind::Assign(Marking::from(1u32))
            );
        }
        assert_eq!(l.order().len(), 31);
    }

    #[test]
    fn order_lengths_follow_the_recursion() {
        let types = crate::fixtures::java_types();
        // a star around `b`: a left-deep tree of two joins
        let q = Arc::new(
            QueryGraph::build(
                types,
                &[("a", "Pkg"), ("b", "Class"), ("c", "Field"), ("d", "Intf")],
                &[
                    ("e1", "ce", "a", "b"),
                    ("e2", "fe", "b", "c"),
                    ("e3", "ie", "b", "d"),
                ],
            )
            .unwrap(),
        );
        let l = localize(&build_join_tree(&q).unwrap()).unwrap();
        assert_eq!(l.order().len(), 2 * 31 + 7 + 10);
        let heights: Vec<_> = l
            .root
            .request_structures()
            .iter()
            .map(|r| l.net.nodes[r.assign].kind.clone())
            .collect();
        assert_eq!(heights[0], MsKind::Assign(Marking::from(2u32)));
        assert_eq!(heights[2], MsKind::Assign(Marking::from(1u32)));
    }

    #[test]
    fn condition_net_shape() {
        let l = localize_psi(&interface_condition_query(), LocalizeOptions::default()).unwrap();
        let PsiNet::Exists {
            rps, child, join, ..
        } = &l.root
        else {
            panic!("exists net expected")
        };
        assert_eq!(l.net.nodes[rps.assign].kind, MsKind::Assign(Marking::INF));
        assert_eq!(
            l.net.nodes[rps.filter].kind,
            MsKind::Filter(Marking::from(1u32))
        );
        let PsiNet::True(Localized::Edge(lns)) = child.as_ref() else {
            panic!("edge structure expected")
        };
        assert_eq!(rps.target, lns.union_v);
        assert_eq!(l.net.production, *join);
        assert_eq!(l.order().len(), 31 + 3 + 7 + 1);
    }
}
