//! Graphviz DOT output for standard and marking-sensitive nets, optionally with the
//! tuples of a configuration.

use std::fmt::Write;

use crate::exec::MsConfiguration;
use crate::msnet::{MsNet, Side};
use crate::rete::{Configuration, ReteNet, StdKind};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn std_label(kind: &StdKind) -> String {
    match kind {
        StdKind::VertexInput { v, .. } => format!("[{v}]"),
        StdKind::EdgeInput { v, w, .. } => format!("[{v} → {w}]"),
        StdKind::Join => "⋈".into(),
        StdKind::SemiJoin { .. } => "⋉".into(),
        StdKind::AntiJoin { .. } => "▷".into(),
    }
}

/// Lists at most `limit` tuples, one per line, with a trailing count of the rest.
fn tuple_lines(mut items: Vec<String>, limit: usize) -> String {
    items.sort();
    let extra = items.len().saturating_sub(limit);
    items.truncate(limit);
    let mut s = items.join("\\l");
    if extra > 0 {
        write!(s, "\\l… {extra} more").unwrap();
    }
    if !s.is_empty() {
        s.push_str("\\l");
    }
    s
}

pub fn standard_to_dot(net: &ReteNet, config: Option<&Configuration>, limit: usize) -> String {
    let mut out = String::from(
        "digraph rete {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n",
    );
    for (i, n) in net.nodes.iter().enumerate() {
        let mut label = format!(
            "{}\\nh={}",
            escape(&format!("{i}: {} {}", std_label(&n.kind), n.query.label())),
            n.height
        );
        if let Some(c) = config {
            let items = c.sets[i]
                .iter()
                .map(|m| escape(&format!("{m:?}")))
                .collect();
            write!(label, "\\n{}", tuple_lines(items, limit)).unwrap();
        }
        let peripheries = if i == net.production { 2 } else { 1 };
        writeln!(
            out,
            "  n{i} [label=\"{}\", peripheries={peripheries}];",
            label
        )
        .unwrap();
    }
    for (i, n) in net.nodes.iter().enumerate() {
        for (k, d) in n.deps.iter().enumerate() {
            writeln!(out, "  n{d} -> n{i} [label=\"{k}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn ms_to_dot(net: &MsNet, config: Option<&MsConfiguration>, limit: usize) -> String {
    let mut out = String::from(
        "digraph msrete {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n",
    );
    for (i, n) in net.nodes.iter().enumerate() {
        let side = if n.side == Side::Target {
            " (target)"
        } else {
            ""
        };
        let mut label = format!(
            "{}\\nh={}{side}",
            escape(&format!("{i}: {} {}", n.kind.label(), n.query.label())),
            n.height
        );
        if let Some(c) = config {
            let items = c.sets[i]
                .iter()
                .map(|(m, p)| escape(&format!("({m:?}, {p})")))
                .collect();
            write!(label, "\\n{}", tuple_lines(items, limit)).unwrap();
        }
        let peripheries = if i == net.production { 2 } else { 1 };
        writeln!(
            out,
            "  n{i} [label=\"{}\", peripheries={peripheries}];",
            label
        )
        .unwrap();
    }
    for (i, n) in net.nodes.iter().enumerate() {
        for (k, d) in n.deps.iter().enumerate() {
            writeln!(out, "  n{d} -> n{i} [label=\"{k}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::msnet::localize;
    use crate::rete::build_join_tree;

    #[test]
    fn standard_dot_lists_every_node_and_edge() {
        let net = build_join_tree(&fixtures::path_query()).unwrap();
        let dot = standard_to_dot(&net, None, 5);
        assert!(dot.starts_with("digraph rete {"));
        assert_eq!(
            dot.matches(" [label=\"").count() - dot.matches(" -> ").count(),
            net.nodes.len()
        );
        assert_eq!(
            dot.matches(" -> ").count(),
            net.nodes.iter().map(|n| n.deps.len()).sum::<usize>()
        );
    }

    #[test]
    fn markings_are_printed() {
        use crate::exec::{execute_order, ExecEnv};
        let l = localize(&build_join_tree(&fixtures::path_query()).unwrap()).unwrap();
        let host = fixtures::host_basic();
        let hp = fixtures::relevant(&["p1"]);
        let c = execute_order(
            &l.net,
            &ExecEnv::single(&host, &hp),
            &l.order(),
            MsConfiguration::empty(&l.net),
        )
        .unwrap();
        let dot = ms_to_dot(&l.net, Some(&c), 10);
        assert!(dot.contains("∞)"));
        assert!(dot.contains("φ := 1"));
    }
}
