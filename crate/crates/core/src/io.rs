//! JSON documents for host graphs, queries, changesets, results and result deltas.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, RelevantSubgraph, TypeGraph, TypedGraph};
use crate::id::Id;
use crate::modification::Change;
use crate::morphism::Match;
use crate::query::{validate_query, Condition, ExtendedQuery, QueryGraph};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl IoError {
    /// I/O failures, as opposed to documents that were read but rejected.
    pub fn is_io(&self) -> bool {
        matches!(self, IoError::Io { .. })
    }
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTypeDoc {
    pub name: Id,
    pub src: Id,
    pub tgt: Id,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypesDoc {
    #[serde(default)]
    pub vertices: Vec<Id>,
    #[serde(default)]
    pub edges: Vec<EdgeTypeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: Id,
    #[serde(rename = "type")]
    pub ty: Id,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: Id,
    #[serde(rename = "type")]
    pub ty: Id,
    pub src: Id,
    pub tgt: Id,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevantDoc {
    #[serde(default)]
    pub vertices: Vec<Id>,
    #[serde(default)]
    pub edges: Vec<Id>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types: Option<TypesDoc>,
    #[serde(default)]
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevant: Option<RelevantDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum ConditionDoc {
    True,
    Not {
        child: Box<ConditionDoc>,
    },
    And {
        children: Vec<ConditionDoc>,
    },
    Exists {
        anchor: Match,
        target: GraphDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        child: Option<Box<ConditionDoc>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryDoc {
    #[serde(flatten)]
    pub graph: GraphDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionDoc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub injective: bool,
}

fn type_graph(doc: &TypesDoc) -> Result<Arc<TypeGraph>, IoError> {
    let edges = doc
        .edges
        .iter()
        .map(|e| (e.name.clone(), e.src.clone(), e.tgt.clone()));
    Ok(Arc::new(TypeGraph::new(
        doc.vertices.iter().cloned(),
        edges,
    )?))
}

/// The type graph spanned by the elements of `doc` and of any nested target graphs.
fn infer_types(docs: &[&GraphDoc]) -> Result<Arc<TypeGraph>, IoError> {
    let mut vertex_types = BTreeSet::new();
    let mut edge_types: BTreeMap<Id, (Id, Id)> = BTreeMap::new();
    for doc in docs {
        let local: BTreeMap<&Id, &Id> = doc.vertices.iter().map(|v| (&v.id, &v.ty)).collect();
        vertex_types.extend(doc.vertices.iter().map(|v| v.ty.clone()));
        for e in &doc.edges {
            let end = |x: &Id| {
                local
                    .get(x)
                    .map(|t| (*t).clone())
                    .ok_or_else(|| IoError::Graph(GraphError::UnknownVertex(x.clone())))
            };
            let ends = (end(&e.src)?, end(&e.tgt)?);
            match edge_types.get(&e.ty) {
                Some(prev) if *prev != ends => {
                    return Err(IoError::Invalid(format!(
                        "edge type `{}` is used with different endpoint types",
                        e.ty
                    )))
                }
                _ => {
                    edge_types.insert(e.ty.clone(), ends);
                }
            }
        }
    }
    let edges = edge_types.into_iter().map(|(n, (s, t))| (n, s, t));
    Ok(Arc::new(TypeGraph::new(vertex_types, edges)?))
}

fn build_graph(doc: &GraphDoc, types: Arc<TypeGraph>) -> Result<TypedGraph, IoError> {
    let mut g = TypedGraph::new(types);
    for v in &doc.vertices {
        g.add_vertex(v.id.clone(), v.ty.clone())?;
    }
    for e in &doc.edges {
        g.add_edge(e.id.clone(), e.ty.clone(), e.src.clone(), e.tgt.clone())?;
    }
    Ok(g)
}

/// A host graph and its relevant subgraph (empty when the document has none).
pub fn parse_graph(json: &str) -> Result<(TypedGraph, RelevantSubgraph), IoError> {
    let doc: GraphDoc = serde_json::from_str(json)?;
    let types = match &doc.types {
        Some(t) => type_graph(t)?,
        None => infer_types(&[&doc])?,
    };
    let g = build_graph(&doc, types)?;
    let relevant = doc
        .relevant
        .map(|r| RelevantSubgraph::new(r.vertices, r.edges))
        .unwrap_or_default();
    relevant.validate(&g)?;
    Ok((g, relevant))
}

fn types_doc(t: &TypeGraph) -> TypesDoc {
    TypesDoc {
        vertices: t.vertex_types().cloned().collect(),
        edges: t
            .edge_types()
            .map(|(n, e)| EdgeTypeDoc {
                name: n.clone(),
                src: e.src.clone(),
                tgt: e.tgt.clone(),
            })
            .collect(),
    }
}

fn graph_doc(g: &TypedGraph, with_types: bool) -> GraphDoc {
    GraphDoc {
        types: with_types.then(|| types_doc(g.types())),
        vertices: g
            .sorted_vertex_ids()
            .into_iter()
            .map(|id| VertexDoc {
                ty: g.vertex_type(&id).unwrap().clone(),
                id,
            })
            .collect(),
        edges: g
            .sorted_edge_ids()
            .into_iter()
            .map(|id| {
                let e = g.edge(&id).unwrap();
                EdgeDoc {
                    ty: e.ty.clone(),
                    src: e.src.clone(),
                    tgt: e.tgt.clone(),
                    id,
                }
            })
            .collect(),
        relevant: None,
    }
}

/// Serializes a host graph with sorted ids, so equal graphs give identical text.
pub fn graph_to_json(g: &TypedGraph, relevant: &RelevantSubgraph) -> String {
    let mut doc = graph_doc(g, true);
    doc.relevant = Some(RelevantDoc {
        vertices: relevant.vertices.iter().cloned().collect(),
        edges: relevant.edges.iter().cloned().collect(),
    });
    serde_json::to_string_pretty(&doc).expect("graph documents serialize")
}

fn collect_graphs<'a>(c: &'a ConditionDoc, out: &mut Vec<&'a GraphDoc>) {
    match c {
        ConditionDoc::True => {}
        ConditionDoc::Not { child } => collect_graphs(child, out),
        ConditionDoc::And { children } => children.iter().for_each(|c| collect_graphs(c, out)),
        ConditionDoc::Exists { target, child, .. } => {
            out.push(target);
            if let Some(c) = child {
                collect_graphs(c, out);
            }
        }
    }
}

fn build_condition(
    doc: &ConditionDoc,
    types: &Arc<TypeGraph>,
    injective: bool,
) -> Result<Condition, IoError> {
    Ok(match doc {
        ConditionDoc::True => Condition::True,
        ConditionDoc::Not { child } => Condition::not(build_condition(child, types, injective)?),
        ConditionDoc::And { children } => {
            let mut parts = children
                .iter()
                .map(|c| build_condition(c, types, injective));
            match parts.next() {
                None => Condition::True,
                Some(first) => {
                    parts.try_fold(first?, |acc, c| Ok::<_, IoError>(Condition::and(acc, c?)))?
                }
            }
        }
        ConditionDoc::Exists {
            anchor,
            target,
            child,
        } => {
            let t =
                Arc::new(QueryGraph::new(build_graph(target, types.clone())?).injective(injective));
            let child = match child {
                Some(c) => build_condition(c, types, injective)?,
                None => Condition::True,
            };
            Condition::exists(anchor.clone(), t, child)
        }
    })
}

/// An extended query. Types come from the document, else from `types`, else they are
/// inferred from the elements. The query is validated.
pub fn parse_query(json: &str, types: Option<Arc<TypeGraph>>) -> Result<ExtendedQuery, IoError> {
    let doc: QueryDoc = serde_json::from_str(json)?;
    query_from_doc(&doc, types)
}

pub fn query_from_doc(
    doc: &QueryDoc,
    types: Option<Arc<TypeGraph>>,
) -> Result<ExtendedQuery, IoError> {
    let types = match (&doc.graph.types, types) {
        (Some(t), _) => type_graph(t)?,
        (None, Some(t)) => t,
        (None, None) => {
            let mut graphs = vec![&doc.graph];
            if let Some(c) = &doc.condition {
                collect_graphs(c, &mut graphs);
            }
            infer_types(&graphs)?
        }
    };
    let pattern =
        Arc::new(QueryGraph::new(build_graph(&doc.graph, types.clone())?).injective(doc.injective));
    let condition = match &doc.condition {
        Some(c) => build_condition(c, &types, doc.injective)?,
        None => Condition::True,
    };
    let q = ExtendedQuery::new(pattern, condition);
    let violations = validate_query(&q);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(IoError::Invalid(msgs.join("; ")));
    }
    Ok(q)
}

fn condition_doc(c: &Condition) -> ConditionDoc {
    match c {
        Condition::True => ConditionDoc::True,
        Condition::Not(c) => ConditionDoc::Not {
            child: Box::new(condition_doc(c)),
        },
        Condition::And(a, b) => ConditionDoc::And {
            children: vec![condition_doc(a), condition_doc(b)],
        },
        Condition::Exists {
            anchor,
            target,
            child,
        } => ConditionDoc::Exists {
            anchor: anchor.clone(),
            target: graph_doc(target, false),
            child: (**child != Condition::True).then(|| Box::new(condition_doc(child))),
        },
    }
}

pub fn query_to_doc(q: &ExtendedQuery) -> QueryDoc {
    QueryDoc {
        graph: graph_doc(&q.pattern, true),
        condition: (q.condition != Condition::True).then(|| condition_doc(&q.condition)),
        injective: q.pattern.injective,
    }
}

pub fn query_to_json(q: &ExtendedQuery) -> String {
    serde_json::to_string_pretty(&query_to_doc(q)).expect("query documents serialize")
}

pub fn parse_changes(json: &str) -> Result<Vec<Change>, IoError> {
    Ok(serde_json::from_str(json)?)
}

pub fn changes_to_json(changes: &[Change]) -> String {
    serde_json::to_string_pretty(changes).expect("changes serialize")
}

/// Selects elements by id; an edge brings its endpoints along.
pub fn relevant_from_ids<I, S>(host: &TypedGraph, ids: I) -> Result<RelevantSubgraph, IoError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut r = RelevantSubgraph::default();
    for id in ids {
        let id = Id::new(id.as_ref().trim());
        if host.has_vertex(&id) {
            r.vertices.insert(id);
        } else if let Some(e) = host.edge(&id) {
            r.vertices.insert(e.src.clone());
            r.vertices.insert(e.tgt.clone());
            r.edges.insert(id);
        } else {
            return Err(IoError::Graph(GraphError::UnknownElement(id)));
        }
    }
    Ok(r)
}

/// Sorted results as a JSON array of `{"vMap","eMap"}` objects.
pub fn matches_to_json<'a>(matches: impl IntoIterator<Item = &'a Match>) -> String {
    let sorted: BTreeSet<&Match> = matches.into_iter().collect();
    serde_json::to_string_pretty(&sorted).expect("matches serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn graph_round_trip() {
        let g = fixtures::host_basic();
        let hp = fixtures::relevant(&["p1"]);
        let text = graph_to_json(&g, &hp);
        let (g2, hp2) = parse_graph(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(hp, hp2);
        assert_eq!(text, graph_to_json(&g2, &hp2));
    }

    #[test]
    fn query_round_trip() {
        let q = fixtures::interface_condition_query();
        let text = query_to_json(&q);
        let back = parse_query(&text, None).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn untyped_query_takes_host_types() {
        let json = r#"{"vertices":[{"id":"c","type":"Class"}],"edges":[],
            "condition":{"op":"not","child":{"op":"exists","anchor":{"vMap":{"c":"c"}},
            "target":{"vertices":[{"id":"c","type":"Class"},{"id":"i","type":"Intf"}],
            "edges":[{"id":"e","type":"ie","src":"c","tgt":"i"}]}}}}"#;
        let q = parse_query(json, Some(fixtures::java_types())).unwrap();
        assert_eq!(q.condition.depth(), 2);
        let inferred = parse_query(json, None).unwrap();
        assert_eq!(inferred.condition.depth(), 2);
    }

    #[test]
    fn and_with_three_children_folds_left() {
        let json = r#"{"vertices":[{"id":"c","type":"Class"}],
            "condition":{"op":"and","children":[{"op":"true"},{"op":"true"},{"op":"true"}]}}"#;
        let q = parse_query(json, Some(fixtures::java_types())).unwrap();
        assert_eq!(
            q.condition,
            Condition::and(
                Condition::and(Condition::True, Condition::True),
                Condition::True
            )
        );
    }

    #[test]
    fn rejects_unclosed_relevant_subgraph() {
        let json = r#"{"vertices":[{"id":"a","type":"A"},{"id":"b","type":"A"}],
            "edges":[{"id":"e","type":"aa","src":"a","tgt":"b"}],
            "relevant":{"vertices":["a"],"edges":["e"]}}"#;
        assert!(matches!(
            parse_graph(json),
            Err(IoError::Graph(GraphError::NotIncidenceClosed(_)))
        ));
    }

    #[test]
    fn changes_parse() {
        let json = r#"[{"op":"addVertex","id":"x","type":"Class"},{"op":"relevantAdd","id":"x"},{"op":"removeEdge","id":"e"}]"#;
        let cs = parse_changes(json).unwrap();
        assert_eq!(cs.len(), 3);
        assert_eq!(parse_changes(&changes_to_json(&cs)).unwrap(), cs);
    }
}
