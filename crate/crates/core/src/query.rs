//! Query graphs, nested graph conditions and extended queries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::graph::{GraphError, TypeGraph, TypedGraph};
use crate::morphism::Match;

/// A pattern graph. Matches are plain homomorphisms unless `injective` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryGraph {
    graph: TypedGraph,
    pub injective: bool,
}

impl Deref for QueryGraph {
    type Target = TypedGraph;

    fn deref(&self) -> &TypedGraph {
        &self.graph
    }
}

impl QueryGraph {
    pub fn new(graph: TypedGraph) -> Self {
        QueryGraph {
            graph,
            injective: false,
        }
    }

    pub fn injective(mut self, on: bool) -> Self {
        self.injective = on;
        self
    }

    pub fn graph(&self) -> &TypedGraph {
        &self.graph
    }

    /// Builds a query graph from literal vertex `(id, type)` and edge `(id, type, src, tgt)` lists.
    pub fn build(
        types: Arc<TypeGraph>,
        vertices: &[(&str, &str)],
        edges: &[(&str, &str, &str, &str)],
    ) -> Result<Self, GraphError> {
        let mut g = TypedGraph::new(types);
        for (id, ty) in vertices {
            g.add_vertex(*id, *ty)?;
        }
        for (id, ty, s, t) in edges {
            g.add_edge(*id, *ty, *s, *t)?;
        }
        Ok(QueryGraph::new(g))
    }

    pub fn is_weakly_connected(&self) -> bool {
        let ids = self.sorted_vertex_ids();
        let Some(start) = ids.first() else {
            return false;
        };
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(v) = stack.pop() {
            for e in self.out_edges(&v).chain(self.in_edges(&v)) {
                let edge = self.edge(e).expect("indexed");
                for w in [&edge.src, &edge.tgt] {
                    if seen.insert(w.clone()) {
                        stack.push(w.clone());
                    }
                }
            }
        }
        seen.len() == ids.len()
    }

    /// Identity mapping of all vertices and edges.
    pub fn identity(&self) -> Match {
        Match::from_pairs(
            self.sorted_vertex_ids().into_iter().map(|v| (v.clone(), v)),
            self.sorted_edge_ids().into_iter().map(|e| (e.clone(), e)),
        )
        .expect("ids are unique")
    }
}

/// Nested graph condition over a context graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    True,
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    /// `∃(a : Q ⊇ Q_p → Q', child)`. The anchor is a (possibly partial) injective
    /// morphism from the context graph into `target`; its domain is `Q_p`.
    Exists {
        anchor: Match,
        target: Arc<QueryGraph>,
        child: Box<Condition>,
    },
}

impl Condition {
    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn and(a: Condition, b: Condition) -> Self {
        Condition::And(Box::new(a), Box::new(b))
    }

    pub fn exists(anchor: Match, target: Arc<QueryGraph>, child: Condition) -> Self {
        Condition::Exists {
            anchor,
            target,
            child: Box::new(child),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Condition::True => 0,
            Condition::Not(c) => 1 + c.depth(),
            Condition::And(a, b) => 1 + a.depth().max(b.depth()),
            Condition::Exists { child, .. } => 1 + child.depth(),
        }
    }
}

pub fn condition_depth(c: &Condition) -> usize {
    c.depth()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedQuery {
    pub pattern: Arc<QueryGraph>,
    pub condition: Condition,
}

impl ExtendedQuery {
    pub fn new(pattern: Arc<QueryGraph>, condition: Condition) -> Self {
        ExtendedQuery { pattern, condition }
    }

    pub fn plain(pattern: Arc<QueryGraph>) -> Self {
        ExtendedQuery {
            pattern,
            condition: Condition::True,
        }
    }
}

/// A failed query invariant, located by a path such as `root/and.1/exists`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

pub fn validate_query(q: &ExtendedQuery) -> Vec<Violation> {
    let mut out = Vec::new();
    check_pattern(&q.pattern, "root", &mut out);
    check_condition(&q.pattern, &q.condition, "root".to_string(), &mut out);
    out
}

fn check_pattern(g: &QueryGraph, path: &str, out: &mut Vec<Violation>) {
    let mut push = |m: String| {
        out.push(Violation {
            path: path.to_string(),
            message: m,
        })
    };
    if g.vertex_count() == 0 {
        push("pattern is empty".into());
    } else if !g.is_weakly_connected() {
        push("pattern is not weakly connected".into());
    }
}

fn check_condition(ctx: &QueryGraph, c: &Condition, path: String, out: &mut Vec<Violation>) {
    match c {
        Condition::True => {}
        Condition::Not(inner) => check_condition(ctx, inner, format!("{path}/not"), out),
        Condition::And(a, b) => {
            check_condition(ctx, a, format!("{path}/and.0"), out);
            check_condition(ctx, b, format!("{path}/and.1"), out);
        }
        Condition::Exists {
            anchor,
            target,
            child,
        } => {
            let here = format!("{path}/exists");
            check_pattern(target, &here, out);
            if ctx.types() != target.types() {
                out.push(Violation {
                    path: here.clone(),
                    message: "target uses a different type graph".into(),
                });
            }
            for m in anchor_violations(anchor, ctx, target) {
                out.push(Violation {
                    path: here.clone(),
                    message: m,
                });
            }
            check_condition(target, child, here, out);
        }
    }
}

fn anchor_violations(a: &Match, q: &TypedGraph, q2: &TypedGraph) -> Vec<String> {
    let mut out = Vec::new();
    if a.vertex_pairs().is_empty() {
        out.push("anchor maps no vertex".into());
    }
    for (x, y) in a.vertex_pairs() {
        match (q.vertex_type(x), q2.vertex_type(y)) {
            (None, _) => out.push(format!("anchor source vertex `{x}` not in context graph")),
            (_, None) => out.push(format!("anchor image vertex `{y}` not in target graph")),
            (Some(t1), Some(t2)) if t1 != t2 => out.push(format!(
                "anchor maps `{x}`:{t1} to `{y}`:{t2} (type mismatch)"
            )),
            _ => {}
        }
    }
    for (x, y) in a.edge_pairs() {
        match (q.edge(x), q2.edge(y)) {
            (None, _) => out.push(format!("anchor source edge `{x}` not in context graph")),
            (_, None) => out.push(format!("anchor image edge `{y}` not in target graph")),
            (Some(e1), Some(e2)) => {
                if e1.ty != e2.ty {
                    out.push(format!("anchor maps edge `{x}` to `{y}` of another type"));
                }
                if a.vertex(&e1.src) != Some(&e2.src) || a.vertex(&e1.tgt) != Some(&e2.tgt) {
                    out.push(format!(
                        "anchor does not commute with endpoints of edge `{x}`"
                    ));
                }
            }
        }
    }
    if !a.is_injective() {
        out.push("anchor is not injective".into());
    }
    out
}

/// Convenience for tests and fixtures: the anchor `{x ↦ y}` over vertices only.
pub fn vertex_anchor(pairs: &[(&str, &str)]) -> Match {
    Match::of(pairs, &[])
}

/// Renders a condition tree in a compact textual form.
pub fn describe(c: &Condition) -> String {
    match c {
        Condition::True => "true".into(),
        Condition::Not(i) => format!("¬{}", describe(i)),
        Condition::And(a, b) => format!("({} ∧ {})", describe(a), describe(b)),
        Condition::Exists { anchor, child, .. } => {
            let map: BTreeMap<_, _> = anchor.vertex_map();
            let parts: Vec<String> = map.iter().map(|(a, b)| format!("{a}→{b}")).collect();
            format!("∃[{}]({})", parts.join(","), describe(child))
        }
    }
}
