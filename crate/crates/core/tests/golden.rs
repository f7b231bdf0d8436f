//! Small worked examples with exactly known configurations.

mod common;

use std::collections::BTreeSet;

use locrete::delta::compute_result_delta;
use locrete::fixtures::{self, m1};
use locrete::gen::{self, GenConfig};
use locrete::id::Id;
use locrete::incremental::IncrementalEngine;
use locrete::modification::{modification_from_changes, Change, HostState};
use locrete::msnet::{localize, LocalizeOptions};
use locrete::rete::build_join_tree;
use locrete::verify::{check_localized, Check};
use locrete::RelevantSubgraph;

#[test]
fn plain_configuration_matches_worked_example() {
    common::plain_golden().unwrap();
}

#[test]
fn condition_check_requests_interface_edge() {
    common::condition_golden().unwrap();
}

#[test]
fn sat_net_reports_match_above_relevant_interface() {
    common::sat_golden().unwrap();
}

fn basic_engine() -> IncrementalEngine {
    let l = localize(&build_join_tree(&fixtures::path_query()).unwrap()).unwrap();
    let order = l.order();
    let host = HostState::new(fixtures::host_basic(), fixtures::relevant(&["p1"])).unwrap();
    IncrementalEngine::for_localized(&l.net, &order, host).unwrap()
}

#[test]
fn empty_changeset_keeps_configuration() {
    let mut e = basic_engine();
    let before = e.configuration();
    e.apply(&[]).unwrap();
    assert_eq!(e.configuration().sets, before.sets);
}

#[test]
fn dropping_the_only_relevant_vertex_unloads_everything() {
    let mut e = basic_engine();
    assert_eq!(
        e.production().keys().cloned().collect::<BTreeSet<_>>(),
        BTreeSet::from([m1()])
    );
    e.apply(&[Change::RelevantRemove { id: Id::new("p1") }])
        .unwrap();
    assert!(e.production().is_empty());
    assert_eq!(e.tuples(), 0);
}

#[test]
fn deleting_the_interface_edge_removes_the_match() {
    let q = fixtures::interface_condition_query();
    let hp = RelevantSubgraph::new(["c1", "i1"], ["c1i1"]);
    let source = HostState::new(fixtures::host_with_interface(), hp.clone()).unwrap();
    let (m, hp2) = modification_from_changes(
        &source,
        &[Change::RemoveEdge {
            id: Id::new("c1i1"),
        }],
    )
    .unwrap();
    let d = compute_result_delta(&q, &m, &hp, &hp2).unwrap();
    assert_eq!(d.removed, BTreeSet::from([m1()]));
    assert!(d.added.is_empty());
}

/// Without the guard, condition checks see finite-marked production tuples that bypassed
/// the request filter, and a negated check can then admit a match violating it.
#[test]
fn unguarded_condition_inputs_admit_violations() {
    let cfg = GenConfig {
        relevant_fraction: 0.3,
        min_vertices: 4,
        max_vertices: 12,
        ..GenConfig::default()
    };
    let inst = gen::random_instance(17109, &cfg);
    let unguarded = check_localized(
        &inst.query,
        &inst.host,
        &inst.relevant,
        LocalizeOptions::unguarded(),
    );
    assert!(
        unguarded.iter().any(|v| v.check == Check::Correctness),
        "{unguarded:?}"
    );
    let guarded = check_localized(
        &inst.query,
        &inst.host,
        &inst.relevant,
        LocalizeOptions::default(),
    );
    assert!(guarded.is_empty(), "{guarded:?}");
}

#[test]
fn doubly_negated_condition_behaves_like_the_condition() {
    use locrete::verify::psi_results;
    use locrete::Condition;
    let q = fixtures::interface_condition_query();
    let nn = locrete::ExtendedQuery::new(
        q.pattern.clone(),
        Condition::not(Condition::not(q.condition.clone())),
    );
    let host = fixtures::host_with_interface();
    for hp in [
        fixtures::relevant(&["p1"]),
        fixtures::relevant(&["i1"]),
        fixtures::relevant(&["p2"]),
    ] {
        let a = psi_results(&q, &host, &hp, LocalizeOptions::default()).unwrap();
        let b = psi_results(&nn, &host, &hp, LocalizeOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}

/// An edge-dominated host where the loop pattern has no match: the standard net stores
/// nothing while the localized net still holds the relevant vertices.
#[test]
fn loop_pattern_escapes_the_size_bound() {
    use locrete::exec::{execute_order, ExecEnv, MsConfiguration};
    use locrete::rete::execute;
    use locrete::{QueryGraph, TypeGraph, TypedGraph};
    use std::sync::Arc;
    let types =
        Arc::new(TypeGraph::new(["B"], [(Id::new("bb"), Id::new("B"), Id::new("B"))]).unwrap());
    let mut host = TypedGraph::new(types.clone());
    for v in ["b0", "b1", "b2"] {
        host.add_vertex(v, "B").unwrap();
    }
    for (e, s, t) in [("x0", "b0", "b1"), ("x1", "b1", "b2"), ("x2", "b2", "b0")] {
        host.add_edge(e, "bb", s, t).unwrap();
    }
    assert!(host.is_edge_dominated());
    let q = Arc::new(QueryGraph::build(types, &[("v", "B")], &[("e", "bb", "v", "v")]).unwrap());
    let std = build_join_tree(&q).unwrap();
    assert_eq!(execute(&std, &host).unwrap().effective_size(&std), 0);
    let l = localize(&std).unwrap();
    let hp = RelevantSubgraph::full(&host);
    let c = execute_order(
        &l.net,
        &ExecEnv::single(&host, &hp),
        &l.order(),
        MsConfiguration::empty(&l.net),
    )
    .unwrap();
    assert!(c.effective_size(&l.net) > 0);
}
