//! Synthetic package/class/field models for the scaling benchmark.
//!
//! Package `p0` is the designated package: its fields only reference its own classes and
//! no other package references them, so everything reachable from it stays inside it.
//! Fields of the other packages reference classes of any non-designated package.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gen;
use crate::graph::{RelevantSubgraph, TypeGraph, TypedGraph};
use crate::id::Id;
use crate::modification::Change;
use crate::morphism::Match;
use crate::query::{Condition, ExtendedQuery, QueryGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("invalid generator parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthParams {
    pub package_count: usize,
    pub classes_per_package: usize,
    pub fields_per_class: usize,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            package_count: 1,
            classes_per_package: 10,
            fields_per_class: 10,
            seed: 1,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, v) in [
            ("packageCount", self.package_count),
            ("classesPerPackage", self.classes_per_package),
            ("fieldsPerClass", self.fields_per_class),
        ] {
            if v == 0 {
                return Err(SynthError::InvalidParams(format!(
                    "{name} must be positive"
                )));
            }
        }
        Ok(())
    }
}

pub fn synth_types() -> Arc<TypeGraph> {
    let e = |n: &str, s: &str, t: &str| (Id::new(n), Id::new(s), Id::new(t));
    Arc::new(
        TypeGraph::new(
            ["Pkg", "Class", "Field"],
            [
                e("ce", "Pkg", "Class"),
                e("fe", "Class", "Field"),
                e("ft", "Field", "Class"),
            ],
        )
        .expect("static type graph"),
    )
}

pub fn package_id(p: usize) -> String {
    format!("p{p}")
}

fn class_id(p: usize, c: usize) -> String {
    format!("p{p}c{c}")
}

/// The model and the designated package with its classes, fields and containment edges.
pub fn generate(params: &SynthParams) -> Result<(TypedGraph, RelevantSubgraph), SynthError> {
    params.validate()?;
    let mut rng = gen::rng(params.seed);
    let mut g = TypedGraph::new(synth_types());
    let (np, nc, nf) = (
        params.package_count,
        params.classes_per_package,
        params.fields_per_class,
    );
    for p in 0..np {
        g.add_vertex(package_id(p), "Pkg").expect("fresh");
        for c in 0..nc {
            let cid = class_id(p, c);
            g.add_vertex(cid.as_str(), "Class").expect("fresh");
            g.add_edge(format!("{cid}.ce"), "ce", package_id(p), cid.as_str())
                .expect("typed");
        }
    }
    for p in 0..np {
        for c in 0..nc {
            let cid = class_id(p, c);
            for f in 0..nf {
                let fid = format!("{cid}f{f}");
                g.add_vertex(fid.as_str(), "Field").expect("fresh");
                g.add_edge(format!("{fid}.fe"), "fe", cid.as_str(), fid.as_str())
                    .expect("typed");
                let tp = if p == 0 || np == 1 {
                    0
                } else {
                    rng.gen_range(1..np)
                };
                let target = class_id(tp, rng.gen_range(0..nc));
                g.add_edge(format!("{fid}.ft"), "ft", fid.as_str(), target)
                    .expect("typed");
            }
        }
    }
    let mut hp = RelevantSubgraph::default();
    hp.vertices.insert(Id::new(package_id(0)));
    for c in 0..nc {
        let cid = class_id(0, c);
        hp.vertices.insert(Id::new(&cid));
        hp.edges.insert(Id::new(format!("{cid}.ce")));
        for f in 0..nf {
            let fid = format!("{cid}f{f}");
            hp.vertices.insert(Id::new(&fid));
            hp.edges.insert(Id::new(format!("{fid}.fe")));
            hp.edges.insert(Id::new(format!("{fid}.ft")));
        }
    }
    Ok((g, hp))
}

/// `p -ce-> c1 -fe-> f1 -ft-> c2 -fe-> f2`: fields of classes referenced by fields of
/// classes in a package.
pub fn path_query() -> ExtendedQuery {
    let q = QueryGraph::build(
        synth_types(),
        &[
            ("p", "Pkg"),
            ("c1", "Class"),
            ("f1", "Field"),
            ("c2", "Class"),
            ("f2", "Field"),
        ],
        &[
            ("e1", "ce", "p", "c1"),
            ("e2", "fe", "c1", "f1"),
            ("e3", "ft", "f1", "c2"),
            ("e4", "fe", "c2", "f2"),
        ],
    )
    .expect("static query");
    ExtendedQuery::plain(Arc::new(q))
}

/// Classes of a package none of whose fields references the class itself.
pub fn no_self_reference_query() -> ExtendedQuery {
    let types = synth_types();
    let q = QueryGraph::build(
        types.clone(),
        &[("p", "Pkg"), ("c", "Class")],
        &[("e1", "ce", "p", "c")],
    )
    .expect("static query");
    let t = QueryGraph::build(
        types,
        &[("c", "Class"), ("f", "Field")],
        &[("e2", "fe", "c", "f"), ("e3", "ft", "f", "c")],
    )
    .expect("static query");
    let anchor = Match::from_pairs([(Id::new("c"), Id::new("c"))], []).expect("injective");
    ExtendedQuery::new(
        Arc::new(q),
        Condition::not(Condition::exists(anchor, Arc::new(t), Condition::True)),
    )
}

/// `rounds` changesets, each creating a class with its fields in the designated package;
/// the new fields reference classes of that package, and every new element is relevant.
pub fn update_script(params: &SynthParams, rounds: usize) -> Vec<Vec<Change>> {
    let mut rng = gen::rng(params.seed ^ 0x5eed);
    let mut out = Vec::with_capacity(rounds);
    for r in 0..rounds {
        let cid = Id::new(format!("p0n{r}"));
        let mut cs = vec![
            Change::AddVertex {
                id: cid.clone(),
                ty: Id::new("Class"),
            },
            Change::AddEdge {
                id: Id::new(format!("{cid}.ce")),
                ty: Id::new("ce"),
                src: Id::new(package_id(0)),
                tgt: cid.clone(),
            },
        ];
        for f in 0..params.fields_per_class {
            let fid = Id::new(format!("{cid}f{f}"));
            let target = Id::new(class_id(0, rng.gen_range(0..params.classes_per_package)));
            cs.push(Change::AddVertex {
                id: fid.clone(),
                ty: Id::new("Field"),
            });
            cs.push(Change::AddEdge {
                id: Id::new(format!("{fid}.fe")),
                ty: Id::new("fe"),
                src: cid.clone(),
                tgt: fid.clone(),
            });
            cs.push(Change::AddEdge {
                id: Id::new(format!("{fid}.ft")),
                ty: Id::new("ft"),
                src: fid.clone(),
                tgt: target,
            });
        }
        let created: Vec<Id> = cs
            .iter()
            .map(|c| match c {
                Change::AddVertex { id, .. } | Change::AddEdge { id, .. } => id.clone(),
                _ => unreachable!("only creations above"),
            })
            .collect();
        cs.extend(created.into_iter().map(|id| Change::RelevantAdd { id }));
        out.push(cs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::graph_to_json;

    #[test]
    fn one_package_has_111_vertices() {
        let (g, hp) = generate(&SynthParams::default()).unwrap();
        assert_eq!(g.vertex_count(), 1 + 10 + 100);
        assert_eq!(g.edge_count(), 10 + 100 + 100);
        assert_eq!(hp.vertices.len(), 111);
        hp.validate(&g).unwrap();
    }

    #[test]
    fn zero_packages_rejected() {
        let p = SynthParams {
            package_count: 0,
            ..SynthParams::default()
        };
        assert!(matches!(generate(&p), Err(SynthError::InvalidParams(_))));
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = SynthParams {
            package_count: 5,
            ..SynthParams::default()
        };
        let (a, ha) = generate(&p).unwrap();
        let (b, hb) = generate(&p).unwrap();
        assert_eq!(graph_to_json(&a, &ha), graph_to_json(&b, &hb));
    }

    #[test]
    fn designated_package_is_closed() {
        let (g, hp) = generate(&SynthParams {
            package_count: 20,
            ..SynthParams::default()
        })
        .unwrap();
        for (id, e) in g.edges() {
            assert_eq!(
                hp.contains(&e.src) && hp.contains(&e.tgt),
                hp.contains_edge(id),
                "{id}"
            );
            assert_eq!(
                hp.contains(&e.src),
                hp.contains(&e.tgt),
                "{id} crosses the package boundary"
            );
        }
    }
}
