//! Typed graphs with bidirectional adjacency indices and relevant subgraphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::id::Id;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate type id `{0}`")]
    DuplicateType(Id),
    #[error("edge type `{0}` references undeclared vertex type `{1}`")]
    UndeclaredEndpointType(Id, Id),
    #[error("unknown vertex type `{0}`")]
    UnknownVertexType(Id),
    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(Id),
    #[error("duplicate element id `{0}`")]
    DuplicateElement(Id),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(Id),
    #[error("unknown edge `{0}`")]
    UnknownEdge(Id),
    #[error("unknown element `{0}`")]
    UnknownElement(Id),
    #[error("edge `{edge}` of type `{ty}` must run from `{want_src}` to `{want_tgt}` vertices")]
    EdgeTyping {
        edge: Id,
        ty: Id,
        want_src: Id,
        want_tgt: Id,
    },
    #[error("vertex `{0}` still has incident edges")]
    IncidentEdges(Id),
    #[error(
        "relevant subgraph is not closed under incidence: edge `{0}` has an endpoint outside it"
    )]
    NotIncidenceClosed(Id),
    #[error("malformed morphism: {0}")]
    MalformedMorphism(String),
    #[error("invalid subgraph: {0}")]
    InvalidSubgraph(String),
    #[error("malformed modification: {0}")]
    MalformedModification(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeType {
    pub src: Id,
    pub tgt: Id,
}

/// Vertex types plus edge types with fixed endpoint types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeGraph {
    vertex_types: BTreeSet<Id>,
    edge_types: BTreeMap<Id, EdgeType>,
}

impl TypeGraph {
    pub fn new<V, E>(vertex_types: V, edge_types: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<Id>,
        E: IntoIterator<Item = (Id, Id, Id)>,
    {
        let mut tg = TypeGraph::default();
        for v in vertex_types {
            let v = v.into();
            if !tg.vertex_types.insert(v.clone()) {
                return Err(GraphError::DuplicateType(v));
            }
        }
        for (name, src, tgt) in edge_types {
            if tg.vertex_types.contains(&name) || tg.edge_types.contains_key(&name) {
                return Err(GraphError::DuplicateType(name));
            }
            for end in [&src, &tgt] {
                if !tg.vertex_types.contains(end) {
                    return Err(GraphError::UndeclaredEndpointType(
                        name.clone(),
                        end.clone(),
                    ));
                }
            }
            tg.edge_types.insert(name, EdgeType { src, tgt });
        }
        Ok(tg)
    }

    pub fn vertex_types(&self) -> impl Iterator<Item = &Id> {
        self.vertex_types.iter()
    }

    pub fn edge_types(&self) -> impl Iterator<Item = (&Id, &EdgeType)> {
        self.edge_types.iter()
    }

    pub fn has_vertex_type(&self, t: &str) -> bool {
        self.vertex_types.contains(t)
    }

    pub fn edge_type(&self, t: &str) -> Option<&EdgeType> {
        self.edge_types.get(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub ty: Id,
    pub src: Id,
    pub tgt: Id,
}

/// A graph typed over a [`TypeGraph`]. Vertex and edge ids share one namespace.
#[derive(Debug, Clone)]
pub struct TypedGraph {
    types: Arc<TypeGraph>,
    vertices: HashMap<Id, Id>,
    edges: HashMap<Id, Edge>,
    out_index: HashMap<Id, BTreeSet<Id>>,
    in_index: HashMap<Id, BTreeSet<Id>>,
    vertices_by_type: HashMap<Id, BTreeSet<Id>>,
    edges_by_type: HashMap<Id, BTreeSet<Id>>,
}

impl PartialEq for TypedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.types == other.types && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for TypedGraph {}

impl TypedGraph {
    pub fn new(types: Arc<TypeGraph>) -> Self {
        TypedGraph {
            types,
            vertices: HashMap::new(),
            edges: HashMap::new(),
            out_index: HashMap::new(),
            in_index: HashMap::new(),
            vertices_by_type: HashMap::new(),
            edges_by_type: HashMap::new(),
        }
    }

    pub fn types(&self) -> &Arc<TypeGraph> {
        &self.types
    }

    pub fn add_vertex(&mut self, id: impl Into<Id>, ty: impl Into<Id>) -> Result<(), GraphError> {
        let (id, ty) = (id.into(), ty.into());
        if !self.types.has_vertex_type(&ty) {
            return Err(GraphError::UnknownVertexType(ty));
        }
        if self.contains(&id) {
            return Err(GraphError::DuplicateElement(id));
        }
        self.vertices_by_type
            .entry(ty.clone())
            .or_default()
            .insert(id.clone());
        self.out_index.insert(id.clone(), BTreeSet::new());
        self.in_index.insert(id.clone(), BTreeSet::new());
        self.vertices.insert(id, ty);
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<Id>,
        ty: impl Into<Id>,
        src: impl Into<Id>,
        tgt: impl Into<Id>,
    ) -> Result<(), GraphError> {
        let (id, ty, src, tgt) = (id.into(), ty.into(), src.into(), tgt.into());
        let et = self
            .types
            .edge_type(&ty)
            .ok_or_else(|| GraphError::UnknownEdgeType(ty.clone()))?;
        if self.contains(&id) {
            return Err(GraphError::DuplicateElement(id));
        }
        let st = self
            .vertices
            .get(&src)
            .ok_or_else(|| GraphError::UnknownVertex(src.clone()))?;
        let tt = self
            .vertices
            .get(&tgt)
            .ok_or_else(|| GraphError::UnknownVertex(tgt.clone()))?;
        if *st != et.src || *tt != et.tgt {
            return Err(GraphError::EdgeTyping {
                edge: id,
                ty,
                want_src: et.src.clone(),
                want_tgt: et.tgt.clone(),
            });
        }
        self.out_index
            .get_mut(&src)
            .expect("indexed vertex")
            .insert(id.clone());
        self.in_index
            .get_mut(&tgt)
            .expect("indexed vertex")
            .insert(id.clone());
        self.edges_by_type
            .entry(ty.clone())
            .or_default()
            .insert(id.clone());
        self.edges.insert(id, Edge { ty, src, tgt });
        Ok(())
    }

    pub fn remove_edge(&mut self, id: &str) -> Result<Edge, GraphError> {
        let edge = self
            .edges
            .remove(id)
            .ok_or_else(|| GraphError::UnknownEdge(Id::new(id)))?;
        self.out_index
            .get_mut(&edge.src)
            .expect("indexed vertex")
            .remove(id);
        self.in_index
            .get_mut(&edge.tgt)
            .expect("indexed vertex")
            .remove(id);
        let by_type = self.edges_by_type.get_mut(&edge.ty).expect("indexed type");
        by_type.remove(id);
        if by_type.is_empty() {
            self.edges_by_type.remove(&edge.ty);
        }
        Ok(edge)
    }

    /// Removes an isolated vertex; fails if edges are still attached.
    pub fn remove_vertex(&mut self, id: &str) -> Result<Id, GraphError> {
        if !self.vertices.contains_key(id) {
            return Err(GraphError::UnknownVertex(Id::new(id)));
        }
        if !self.out_index[id].is_empty() || !self.in_index[id].is_empty() {
            return Err(GraphError::IncidentEdges(Id::new(id)));
        }
        let ty = self.vertices.remove(id).expect("checked above");
        self.out_index.remove(id);
        self.in_index.remove(id);
        let by_type = self.vertices_by_type.get_mut(&ty).expect("indexed type");
        by_type.remove(id);
        if by_type.is_empty() {
            self.vertices_by_type.remove(&ty);
        }
        Ok(ty)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vertices.contains_key(id) || self.edges.contains_key(id)
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertices.contains_key(id)
    }

    pub fn has_edge(&self, id: &str) -> bool {
        self.edges.contains_key(id)
    }

    pub fn vertex_type(&self, id: &str) -> Option<&Id> {
        self.vertices.get(id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&Id, &Id)> {
        self.vertices.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Id, &Edge)> {
        self.edges.iter()
    }

    pub fn sorted_vertex_ids(&self) -> Vec<Id> {
        let mut ids: Vec<Id> = self.vertices.keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn sorted_edge_ids(&self) -> Vec<Id> {
        let mut ids: Vec<Id> = self.edges.keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn out_edges(&self, v: &str) -> impl Iterator<Item = &Id> {
        self.out_index.get(v).into_iter().flatten()
    }

    pub fn in_edges(&self, v: &str) -> impl Iterator<Item = &Id> {
        self.in_index.get(v).into_iter().flatten()
    }

    pub fn vertices_of_type(&self, ty: &str) -> impl Iterator<Item = &Id> {
        self.vertices_by_type.get(ty).into_iter().flatten()
    }

    pub fn edges_of_type(&self, ty: &str) -> impl Iterator<Item = &Id> {
        self.edges_by_type.get(ty).into_iter().flatten()
    }

    /// Checks that the adjacency and type indices mirror the element maps exactly.
    pub fn indexes_coherent(&self) -> bool {
        let mut out_count = 0;
        let mut in_count = 0;
        for (id, e) in &self.edges {
            let ok = self.out_index.get(&e.src).is_some_and(|s| s.contains(id))
                && self.in_index.get(&e.tgt).is_some_and(|s| s.contains(id))
                && self
                    .edges_by_type
                    .get(&e.ty)
                    .is_some_and(|s| s.contains(id));
            if !ok {
                return false;
            }
        }
        for (v, set) in &self.out_index {
            if !self.vertices.contains_key(v) {
                return false;
            }
            out_count += set.len();
            if set
                .iter()
                .any(|e| self.edges.get(e).map(|e| &e.src) != Some(v))
            {
                return false;
            }
        }
        for (v, set) in &self.in_index {
            if !self.vertices.contains_key(v) {
                return false;
            }
            in_count += set.len();
            if set
                .iter()
                .any(|e| self.edges.get(e).map(|e| &e.tgt) != Some(v))
            {
                return false;
            }
        }
        let typed_v: usize = self.vertices_by_type.values().map(|s| s.len()).sum();
        let typed_e: usize = self.edges_by_type.values().map(|s| s.len()).sum();
        let types_ok = self
            .vertices_by_type
            .iter()
            .all(|(t, s)| s.iter().all(|v| self.vertices.get(v) == Some(t)));
        out_count == self.edges.len()
            && in_count == self.edges.len()
            && self.out_index.len() == self.vertices.len()
            && self.in_index.len() == self.vertices.len()
            && typed_v == self.vertices.len()
            && typed_e == self.edges.len()
            && types_ok
    }

    /// Every edge type has at least as many instances as the larger of its endpoint vertex types.
    pub fn is_edge_dominated(&self) -> bool {
        self.types.edge_types().all(|(name, et)| {
            let count = |t: &Id| self.vertices_by_type.get(t).map_or(0, |s| s.len());
            let edges = self.edges_by_type.get(name).map_or(0, |s| s.len());
            edges >= count(&et.src).max(count(&et.tgt))
        })
    }
}

/// Vertex and edge ids selecting a subgraph of a host graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelevantSubgraph {
    pub vertices: BTreeSet<Id>,
    pub edges: BTreeSet<Id>,
}

impl RelevantSubgraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator,
        V::Item: Into<Id>,
        E: IntoIterator,
        E::Item: Into<Id>,
    {
        RelevantSubgraph {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().map(Into::into).collect(),
        }
    }

    /// The whole host graph.
    pub fn full(host: &TypedGraph) -> Self {
        RelevantSubgraph {
            vertices: host.vertices().map(|(v, _)| v.clone()).collect(),
            edges: host.edges().map(|(e, _)| e.clone()).collect(),
        }
    }

    /// Vertex-induced subgraph: the given vertices plus every host edge between them.
    pub fn induced(host: &TypedGraph, vertices: impl IntoIterator<Item = Id>) -> Self {
        let vertices: BTreeSet<Id> = vertices.into_iter().collect();
        let edges = host
            .edges()
            .filter(|(_, e)| vertices.contains(&e.src) && vertices.contains(&e.tgt))
            .map(|(id, _)| id.clone())
            .collect();
        RelevantSubgraph { vertices, edges }
    }

    pub fn contains_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn contains_edge(&self, e: &str) -> bool {
        self.edges.contains(e)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vertices.contains(id) || self.edges.contains(id)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    /// Checks that every id exists in `host` and that the selection is closed under incidence.
    pub fn validate(&self, host: &TypedGraph) -> Result<(), GraphError> {
        for v in &self.vertices {
            if !host.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
        }
        for e in &self.edges {
            let edge = host
                .edge(e)
                .ok_or_else(|| GraphError::UnknownEdge(e.clone()))?;
            if !self.vertices.contains(&edge.src) || !self.vertices.contains(&edge.tgt) {
                return Err(GraphError::NotIncidenceClosed(e.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab_types() -> Arc<TypeGraph> {
        Arc::new(
            TypeGraph::new(
                ["A", "B"],
                [
                    (Id::new("t"), Id::new("A"), Id::new("B")),
                    (Id::new("aa"), Id::new("A"), Id::new("A")),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn type_graph_rejects_bad_declarations() {
        assert_eq!(
            TypeGraph::new(["A", "A"], []).unwrap_err(),
            GraphError::DuplicateType(Id::new("A"))
        );
        assert!(matches!(
            TypeGraph::new(["A"], [(Id::new("t"), Id::new("A"), Id::new("Z"))]),
            Err(GraphError::UndeclaredEndpointType(..))
        ));
    }

    #[test]
    fn edge_typing_is_enforced() {
        let mut g = TypedGraph::new(ab_types());
        g.add_vertex("a", "A").unwrap();
        g.add_vertex("b", "B").unwrap();
        assert!(g.add_edge("x", "t", "b", "a").is_err());
        g.add_edge("x", "t", "a", "b").unwrap();
        assert_eq!(
            g.add_vertex("x", "A"),
            Err(GraphError::DuplicateElement(Id::new("x")))
        );
        assert_eq!(
            g.remove_vertex("a"),
            Err(GraphError::IncidentEdges(Id::new("a")))
        );
        g.remove_edge("x").unwrap();
        g.remove_vertex("a").unwrap();
        assert!(g.indexes_coherent());
    }

    #[test]
    fn edge_domination_examples() {
        let mut g = TypedGraph::new(ab_types());
        g.add_vertex("a", "A").unwrap();
        g.add_vertex("b", "B").unwrap();
        g.add_edge("x", "t", "a", "b").unwrap();
        g.add_edge("y", "aa", "a", "a").unwrap();
        assert!(g.is_edge_dominated());

        let mut g = TypedGraph::new(ab_types());
        g.add_vertex("a1", "A").unwrap();
        g.add_vertex("a2", "A").unwrap();
        assert!(!g.is_edge_dominated());
    }

    #[test]
    fn relevant_subgraph_must_be_closed() {
        let mut g = TypedGraph::new(ab_types());
        g.add_vertex("a", "A").unwrap();
        g.add_vertex("b", "B").unwrap();
        g.add_edge("x", "t", "a", "b").unwrap();
        let hp = RelevantSubgraph::new(["a"], ["x"]);
        assert_eq!(
            hp.validate(&g),
            Err(GraphError::NotIncidenceClosed(Id::new("x")))
        );
        let hp = RelevantSubgraph::induced(&g, [Id::new("a"), Id::new("b")]);
        assert!(hp.validate(&g).is_ok());
        assert!(hp.contains_edge("x"));
    }
}
