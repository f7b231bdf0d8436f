//! Worked examples shared by the golden tests and the acceptance runner. Each check
//! returns a description of the first disagreement.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use locrete::delta::localize_sat;
use locrete::exec::{execute_order, stripped_result_set, ExecEnv, MsConfiguration};
use locrete::fixtures::{self, m1, m1_1, m1_1_1, m1_2, m1_2_1, m1_3, m2};
use locrete::msnet::{localize, localize_psi, LocalizeOptions, Localized, PsiNet};
use locrete::rete::{build_join_tree, execute, NodeId};
use locrete::{ExtendedQuery, Marking, Match};

const INF: Marking = Marking::INF;

fn one() -> Marking {
    Marking::finite(1)
}

fn show(set: &BTreeSet<(Match, Marking)>) -> String {
    let parts: Vec<String> = set.iter().map(|(m, p)| format!("({m:?}, {p})")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn compare(
    c: &MsConfiguration,
    expected: &HashMap<NodeId, Vec<(Match, Marking)>>,
    label: impl Fn(NodeId) -> String,
) -> Result<(), String> {
    for (n, set) in c.sets.iter().enumerate() {
        let got: BTreeSet<(Match, Marking)> = set.iter().map(|(m, p)| (m.clone(), *p)).collect();
        let want: BTreeSet<(Match, Marking)> = expected
            .get(&n)
            .cloned()
            .unwrap_or_default()
            .into_iter()
            .collect();
        if got != want {
            return Err(format!(
                "node {n} {}: got {} expected {}",
                label(n),
                show(&got),
                show(&want)
            ));
        }
    }
    Ok(())
}

/// The path query over the basic host with `p1` relevant: standard production, localized
/// production and every intermediate result set of the localized net.
pub fn plain_golden() -> Result<(), String> {
    let q = fixtures::path_query();
    let host = fixtures::host_basic();
    let hp = fixtures::relevant(&["p1"]);
    let std = build_join_tree(&q).map_err(|e| e.to_string())?;
    let sc = execute(&std, &host).map_err(|e| e.to_string())?;
    let std_prod: BTreeSet<Match> = sc.sets[std.production].iter().cloned().collect();
    if std_prod != BTreeSet::from([m1(), m2()]) {
        return Err(format!("standard production {std_prod:?}"));
    }

    let l = localize(&std).map_err(|e| e.to_string())?;
    let c = execute_order(
        &l.net,
        &ExecEnv::single(&host, &hp),
        &l.order(),
        MsConfiguration::empty(&l.net),
    )
    .map_err(|e| e.to_string())?;
    let Localized::Join {
        join,
        left,
        right,
        rps_l,
        rps_r,
    } = &l.root
    else {
        return Err("localized net is not a join".into());
    };
    let (Localized::Edge(pc), Localized::Edge(cf)) = (left.as_ref(), right.as_ref()) else {
        return Err("join children are not navigation structures".into());
    };
    // One request structure carries requests from p→c into c→f, the other the reverse.
    let (into_right, into_left) = if l.net.nodes[rps_l.filter].deps == vec![left.production()] {
        (rps_l, rps_r)
    } else {
        (rps_r, rps_l)
    };
    if into_right.target != cf.union_v || into_left.target != pc.union_w {
        return Err(format!(
            "request structures attach to {} and {}",
            into_right.target, into_left.target
        ));
    }
    let mut want: HashMap<NodeId, Vec<(Match, Marking)>> = HashMap::new();
    want.insert(*join, vec![(m1(), INF)]);
    want.insert(pc.v_input, vec![(m1_1_1(), INF)]);
    want.insert(pc.union_v, vec![(m1_1_1(), INF)]);
    want.insert(pc.forward, vec![(m1_1(), INF)]);
    want.insert(pc.top, vec![(m1_1(), INF)]);
    want.insert(into_right.filter, vec![(m1_1(), INF)]);
    want.insert(into_right.projection, vec![(m1_2_1(), INF)]);
    want.insert(into_right.assign, vec![(m1_2_1(), one())]);
    want.insert(cf.union_v, vec![(m1_2_1(), one())]);
    want.insert(cf.forward, vec![(m1_2(), one())]);
    want.insert(cf.top, vec![(m1_2(), one())]);
    compare(&c, &want, |n| l.net.nodes[n].kind.label())?;
    if l.net.nodes.len() != 21 {
        return Err(format!("{} nodes instead of 21", l.net.nodes.len()));
    }
    Ok(())
}

fn interface_query() -> ExtendedQuery {
    fixtures::interface_condition_query()
}

/// The interface query over the host with an interface and `p1` relevant.
pub fn condition_golden() -> Result<(), String> {
    let q = interface_query();
    let host = fixtures::host_with_interface();
    let hp = fixtures::relevant(&["p1"]);
    let l = localize_psi(&q, LocalizeOptions::default()).map_err(|e| e.to_string())?;
    let c = execute_order(
        &l.net,
        &ExecEnv::single(&host, &hp),
        &l.order(),
        MsConfiguration::empty(&l.net),
    )
    .map_err(|e| e.to_string())?;
    let prod = stripped_result_set(&c, l.net.production);
    if prod != BTreeSet::from([m1()]) {
        return Err(format!("stripped production {prod:?}"));
    }
    let PsiNet::Exists { child, .. } = &l.root else {
        return Err("localized net is not an existential check".into());
    };
    let Localized::Edge(ci) = child.base() else {
        return Err("condition pattern is not a single navigation structure".into());
    };
    let got = c.sets[ci.top].get(&m1_3()).copied();
    if got != Some(INF) {
        return Err(format!(
            "c→i structure holds {:?} for the interface edge",
            c.sorted(ci.top)
        ));
    }
    Ok(())
}

/// The sat net for the interface query with only `i1` relevant.
pub fn sat_golden() -> Result<(), String> {
    let q = interface_query();
    let host = fixtures::host_with_interface();
    let hp = fixtures::relevant(&["i1"]);
    let s = localize_sat(&q).map_err(|e| e.to_string())?;
    let c = execute_order(
        &s.net,
        &ExecEnv::single(&host, &hp),
        &s.order(),
        MsConfiguration::empty(&s.net),
    )
    .map_err(|e| e.to_string())?;
    match c.sets[s.net.production].get(&m1()) {
        Some(p) if p.is_inf() => Ok(()),
        _ => Err(format!("sat production {:?}", c.sorted(s.net.production))),
    }
}
