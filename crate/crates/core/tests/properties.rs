//! Randomized properties over generated hosts, queries and changes.

use std::collections::HashSet;

use proptest::prelude::*;

use locrete::delta::compute_sat_dependent;
use locrete::exec::{execute_order, is_consistent, ExecEnv, MsConfiguration};
use locrete::gen::{self, GenConfig, Instance};
use locrete::incremental::IncrementalEngine;
use locrete::io::{graph_to_json, parse_graph, parse_query, query_to_json};
use locrete::modification::{modification_from_changes, HostState};
use locrete::msnet::{localize, localize_psi, LocalizeOptions};
use locrete::oracle;
use locrete::query::Condition;
use locrete::rete::{self, build_extended_net, build_join_tree};
use locrete::verify::{check_delta, check_localized, psi_results};
use locrete::{ExtendedQuery, RelevantSubgraph};

fn small() -> GenConfig {
    GenConfig {
        max_vertices: 16,
        relevant_fraction: 0.25,
        ..GenConfig::default()
    }
}

fn instance(seed: u64) -> Instance {
    gen::random_instance(seed, &small())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn localized_results_agree_with_oracle(seed in any::<u64>()) {
        let inst = instance(seed);
        let v = check_localized(&inst.query, &inst.host, &inst.relevant, LocalizeOptions::default());
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn one_marking_per_match(seed in any::<u64>()) {
        let inst = instance(seed);
        let l = localize_psi(&inst.query, LocalizeOptions::default()).unwrap();
        let env = ExecEnv::single(&inst.host, &inst.relevant);
        let c = execute_order(&l.net, &env, &l.order(), MsConfiguration::empty(&l.net)).unwrap();
        for n in 0..l.net.nodes.len() {
            let tuples = c.sorted(n);
            let matches: HashSet<_> = tuples.iter().map(|(m, _)| m).collect();
            prop_assert_eq!(matches.len(), tuples.len());
        }
    }

    #[test]
    fn execution_converges_from_any_start(seed in any::<u64>()) {
        let inst = instance(seed);
        let l = localize_psi(&inst.query, LocalizeOptions::default()).unwrap();
        let order = l.order();
        let everything = RelevantSubgraph::full(&inst.host);
        let stale = execute_order(&l.net, &ExecEnv::single(&inst.host, &everything), &order, MsConfiguration::empty(&l.net)).unwrap();
        let env = ExecEnv::single(&inst.host, &inst.relevant);
        let from_stale = execute_order(&l.net, &env, &order, stale).unwrap();
        let fresh = execute_order(&l.net, &env, &order, MsConfiguration::empty(&l.net)).unwrap();
        prop_assert!(is_consistent(&l.net, &env, &from_stale).unwrap());
        prop_assert_eq!(from_stale.sets, fresh.sets);
    }

    #[test]
    fn standard_net_agrees_with_oracle(seed in any::<u64>()) {
        let inst = instance(seed);
        let std = build_extended_net(&inst.query).unwrap();
        let c = rete::execute(&std, &inst.host).unwrap();
        let got: std::collections::BTreeSet<_> = c.sets[std.production].iter().cloned().collect();
        prop_assert_eq!(got, oracle::satisfying_matches(&inst.query, &inst.host));
    }

    #[test]
    fn incremental_equals_batch(seed in any::<u64>()) {
        let inst = instance(seed);
        let state = HostState::new(inst.host, inst.relevant).unwrap();
        let changes = gen::random_changes(&mut gen::rng(seed ^ 1), &state, 12, "x");
        let l = localize_psi(&inst.query, LocalizeOptions::default()).unwrap();
        let order = l.order();
        let mut e = IncrementalEngine::for_localized(&l.net, &order, state).unwrap();
        for chunk in changes.chunks(3) {
            e.apply(chunk).unwrap();
        }
        let host = e.host().clone();
        let batch = execute_order(&l.net, &ExecEnv::single(&host.graph, &host.relevant), &order, MsConfiguration::empty(&l.net)).unwrap();
        prop_assert_eq!(e.configuration().sets, batch.sets);
    }

    #[test]
    fn double_negation_changes_nothing(seed in any::<u64>()) {
        let inst = instance(seed);
        let nn = ExtendedQuery::new(inst.query.pattern.clone(), Condition::not(Condition::not(inst.query.condition.clone())));
        let a = psi_results(&inst.query, &inst.host, &inst.relevant, LocalizeOptions::default()).unwrap();
        let b = psi_results(&nn, &inst.host, &inst.relevant, LocalizeOptions::default()).unwrap();
        // Matches away from the relevant subgraph may or may not be reported.
        let near = |s: &std::collections::BTreeSet<locrete::Match>| -> Vec<locrete::Match> {
            s.iter().filter(|m| oracle::touches(m, &inst.relevant)).cloned().collect()
        };
        prop_assert_eq!(near(&a), near(&b));
        let all = oracle::satisfying_matches(&nn, &inst.host);
        prop_assert!(a.is_subset(&all) && b.is_subset(&all));
    }

    #[test]
    fn sat_net_covers_dependent_matches(seed in any::<u64>()) {
        let inst = instance(seed);
        let got = compute_sat_dependent(&inst.query, &inst.host, &inst.relevant).unwrap();
        let want = oracle::satisfaction_dependent_matches(&inst.query, &inst.host, &inst.relevant);
        prop_assert!(want.is_subset(&got), "missing {:?}", want.difference(&got).collect::<Vec<_>>());
    }

    #[test]
    fn size_bound_on_edge_dominated_hosts(seed in any::<u64>()) {
        let cfg = GenConfig { edge_dominated: Some(true), ..small() };
        let inst = gen::random_instance(seed, &cfg);
        prop_assume!(inst.host.is_edge_dominated());
        // A loop `v -e-> v` only matches host loops, so its edge input can hold fewer
        // tuples than there are vertices; see the golden loop example.
        prop_assume!(inst.query.pattern.graph().edges().all(|(_, e)| e.src != e.tgt));
        let std = build_join_tree(&inst.query.pattern).unwrap();
        let bound = 7 * rete::execute(&std, &inst.host).unwrap().effective_size(&std);
        let l = localize(&std).unwrap();
        let c = execute_order(&l.net, &ExecEnv::single(&inst.host, &inst.relevant), &l.order(), MsConfiguration::empty(&l.net)).unwrap();
        prop_assert!(c.effective_size(&l.net) <= bound, "{} > {}", c.effective_size(&l.net), bound);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let inst = instance(seed);
        let g = graph_to_json(&inst.host, &inst.relevant);
        let (host, hp) = parse_graph(&g).unwrap();
        prop_assert_eq!(graph_to_json(&host, &hp), g);
        let q = query_to_json(&inst.query);
        let back = parse_query(&q, None).unwrap();
        prop_assert_eq!(query_to_json(&back), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn delta_is_exact_for_restricted_modifications(seed in any::<u64>()) {
        let cfg = GenConfig { max_vertices: 12, relevant_fraction: 0.4, ..GenConfig::default() };
        let inst = gen::random_instance(seed, &cfg);
        let state = HostState::new(inst.host, inst.relevant).unwrap();
        let changes = gen::random_restricted_changes(&mut gen::rng(seed ^ 2), &state, 5, "y");
        let (m, hp2) = modification_from_changes(&state, &changes).unwrap();
        let v = check_delta(&inst.query, &m, &state.relevant, &hp2, LocalizeOptions::default());
        prop_assert!(v.is_empty(), "{:?}", v);
    }
}
