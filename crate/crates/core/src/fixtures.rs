//! Small worked examples: a project/package/class/field model, the two-edge path query
//! over it and an interface condition. Used by tests, documentation and the CLI.

use std::sync::Arc;

use crate::graph::{RelevantSubgraph, TypeGraph, TypedGraph};
use crate::id::Id;
use crate::morphism::Match;
use crate::query::{vertex_anchor, Condition, ExtendedQuery, QueryGraph};

pub fn java_types() -> Arc<TypeGraph> {
    let e = |n: &str, s: &str, t: &str| (Id::new(n), Id::new(s), Id::new(t));
    Arc::new(
        TypeGraph::new(
            ["Proj", "Pkg", "Class", "Field", "Intf"],
            [
                e("pe", "Proj", "Pkg"),
                e("ce", "Pkg", "Class"),
                e("fe", "Class", "Field"),
                e("ie", "Class", "Intf"),
            ],
        )
        .expect("static type graph"),
    )
}

/// One project with two packages, each holding one class with one field.
pub fn host_basic() -> TypedGraph {
    let mut g = TypedGraph::new(java_types());
    for (v, t) in [
        ("r1", "Proj"),
        ("p1", "Pkg"),
        ("p2", "Pkg"),
        ("c1", "Class"),
        ("c2", "Class"),
        ("f1", "Field"),
        ("f2", "Field"),
    ] {
        g.add_vertex(v, t).expect("static vertex");
    }
    for (e, t, s, d) in [
        ("r1p1", "pe", "r1", "p1"),
        ("r1p2", "pe", "r1", "p2"),
        ("p1c1", "ce", "p1", "c1"),
        ("c1f1", "fe", "c1", "f1"),
        ("p2c2", "ce", "p2", "c2"),
        ("c2f2", "fe", "c2", "f2"),
    ] {
        g.add_edge(e, t, s, d).expect("static edge");
    }
    g
}

/// [`host_basic`] plus interface `i1` implemented by `c1`.
pub fn host_with_interface() -> TypedGraph {
    let mut g = host_basic();
    g.add_vertex("i1", "Intf").expect("static vertex");
    g.add_edge("c1i1", "ie", "c1", "i1").expect("static edge");
    g
}

pub fn relevant(vertices: &[&str]) -> RelevantSubgraph {
    RelevantSubgraph::new(vertices.iter().copied(), Vec::<Id>::new())
}

/// `p:Pkg -e1-> c:Class -e2-> f:Field`.
pub fn path_query() -> Arc<QueryGraph> {
    Arc::new(
        QueryGraph::build(
            java_types(),
            &[("p", "Pkg"), ("c", "Class"), ("f", "Field")],
            &[("e1", "ce", "p", "c"), ("e2", "fe", "c", "f")],
        )
        .expect("static query"),
    )
}

/// `c:Class -e3-> i:Intf`.
pub fn interface_query() -> Arc<QueryGraph> {
    Arc::new(
        QueryGraph::build(
            java_types(),
            &[("c", "Class"), ("i", "Intf")],
            &[("e3", "ie", "c", "i")],
        )
        .expect("static query"),
    )
}

/// The path query with the condition "the class implements some interface", anchored on
/// the class vertex only.
pub fn interface_condition_query() -> ExtendedQuery {
    ExtendedQuery::new(
        path_query(),
        Condition::exists(
            vertex_anchor(&[("c", "c")]),
            interface_query(),
            Condition::True,
        ),
    )
}

pub fn m1() -> Match {
    Match::of(
        &[("p", "p1"), ("c", "c1"), ("f", "f1")],
        &[("e1", "p1c1"), ("e2", "c1f1")],
    )
}

pub fn m2() -> Match {
    Match::of(
        &[("p", "p2"), ("c", "c2"), ("f", "f2")],
        &[("e1", "p2c2"), ("e2", "c2f2")],
    )
}

/// `p ↦ p1, c ↦ c1` over the first edge.
pub fn m1_1() -> Match {
    Match::of(&[("p", "p1"), ("c", "c1")], &[("e1", "p1c1")])
}

pub fn m1_1_1() -> Match {
    Match::of(&[("p", "p1")], &[])
}

pub fn m1_2() -> Match {
    Match::of(&[("c", "c1"), ("f", "f1")], &[("e2", "c1f1")])
}

pub fn m1_2_1() -> Match {
    Match::of(&[("c", "c1")], &[])
}

/// The interface edge match `c ↦ c1, i ↦ i1`.
pub fn m1_3() -> Match {
    Match::of(&[("c", "c1"), ("i", "i1")], &[("e3", "c1i1")])
}
