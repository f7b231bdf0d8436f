//! Graph modifications (spans encoded by id equality), changesets and host state
//! mutation with change events.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, GraphError, RelevantSubgraph, TypedGraph};
use crate::id::Id;
use crate::morphism::Match;

/// A span `source ← K → target`. Retained elements are those whose id occurs in both
/// graphs; they must keep their kind, type and (for edges) endpoints.
#[derive(Debug, Clone)]
pub struct GraphModification {
    source: TypedGraph,
    target: TypedGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From a match into the target graph to a match into the source graph (`f ∘ g⁻¹`).
    ToSource,
    /// From a match into the source graph to a match into the target graph (`g ∘ f⁻¹`).
    ToTarget,
}

impl GraphModification {
    pub fn new(source: TypedGraph, target: TypedGraph) -> Result<Self, GraphError> {
        if source.types() != target.types() {
            return Err(GraphError::MalformedModification(
                "type graphs differ".into(),
            ));
        }
        for (id, ty) in source.vertices() {
            if target.has_edge(id) {
                return Err(GraphError::MalformedModification(format!(
                    "`{id}` changes kind"
                )));
            }
            if let Some(t2) = target.vertex_type(id) {
                if t2 != ty {
                    return Err(GraphError::MalformedModification(format!(
                        "`{id}` changes type"
                    )));
                }
            }
        }
        for (id, e) in source.edges() {
            if target.has_vertex(id) {
                return Err(GraphError::MalformedModification(format!(
                    "`{id}` changes kind"
                )));
            }
            if let Some(e2) = target.edge(id) {
                if e2 != e {
                    return Err(GraphError::MalformedModification(format!(
                        "retained edge `{id}` changes type or endpoints"
                    )));
                }
            }
        }
        Ok(GraphModification { source, target })
    }

    pub fn identity(g: TypedGraph) -> Self {
        GraphModification {
            source: g.clone(),
            target: g,
        }
    }

    pub fn source(&self) -> &TypedGraph {
        &self.source
    }

    pub fn target(&self) -> &TypedGraph {
        &self.target
    }

    /// The inverse span.
    pub fn reverse(&self) -> Self {
        GraphModification {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    pub fn is_retained(&self, id: &str) -> bool {
        self.source.contains(id) && self.target.contains(id)
    }

    pub fn deletions(&self) -> BTreeSet<Id> {
        ids(&self.source)
            .filter(|id| !self.target.contains(id))
            .collect()
    }

    pub fn creations(&self) -> BTreeSet<Id> {
        ids(&self.target)
            .filter(|id| !self.source.contains(id))
            .collect()
    }
}

fn ids(g: &TypedGraph) -> impl Iterator<Item = Id> + '_ {
    g.vertices()
        .map(|(v, _)| v.clone())
        .chain(g.edges().map(|(e, _)| e.clone()))
}

/// Rebuilds the target as `source − deletions + creations`.
pub fn apply_modification(m: &GraphModification) -> Result<TypedGraph, GraphError> {
    let mut g = m.source.clone();
    let deletions = m.deletions();
    for id in deletions.iter().filter(|id| m.source.has_edge(id)) {
        g.remove_edge(id)?;
    }
    for id in deletions.iter().filter(|id| m.source.has_vertex(id)) {
        g.remove_vertex(id).map_err(|e| match e {
            GraphError::IncidentEdges(v) => GraphError::MalformedModification(format!(
                "vertex `{v}` deleted but an incident edge is retained"
            )),
            other => other,
        })?;
    }
    let creations = m.creations();
    for id in creations.iter().filter(|id| m.target.has_vertex(id)) {
        g.add_vertex(
            id.clone(),
            m.target.vertex_type(id).expect("created vertex").clone(),
        )?;
    }
    for id in creations.iter().filter(|id| m.target.has_edge(id)) {
        let e = m.target.edge(id).expect("created edge");
        g.add_edge(id.clone(), e.ty.clone(), e.src.clone(), e.tgt.clone())?;
    }
    Ok(g)
}

/// Checks whether `m` only changes the relevant subgraphs `hp` (of the source) and `hp2`
/// (of the target): the remainders outside them must correspond one to one, and relevant
/// elements must stay relevant in both directions.
pub fn validate_subgraph_restricted(
    m: &GraphModification,
    hp: &RelevantSubgraph,
    hp2: &RelevantSubgraph,
) -> bool {
    if hp.validate(&m.source).is_err() || hp2.validate(&m.target).is_err() {
        return false;
    }
    let (vs, es) = remainder(&m.source, hp);
    let (vt, et) = remainder(&m.target, hp2);
    if vs != vt || es != et {
        return false;
    }
    let forward = hp
        .vertices
        .iter()
        .chain(hp.edges.iter())
        .filter(|id| m.target.contains(id));
    for id in forward {
        if !hp2.contains(id) {
            return false;
        }
    }
    let backward = hp2
        .vertices
        .iter()
        .chain(hp2.edges.iter())
        .filter(|id| m.source.contains(id));
    for id in backward {
        if !hp.contains(id) {
            return false;
        }
    }
    true
}

/// The part of `g` outside `hp`: all edges not in `hp` and all vertices that are either
/// outside `hp` or attached to such an edge.
fn remainder(g: &TypedGraph, hp: &RelevantSubgraph) -> (BTreeSet<Id>, BTreeSet<Id>) {
    let edges: BTreeSet<Id> = g
        .edges()
        .filter(|(id, _)| !hp.contains_edge(id))
        .map(|(id, _)| id.clone())
        .collect();
    let mut vertices: BTreeSet<Id> = g
        .vertices()
        .filter(|(id, _)| !hp.contains_vertex(id))
        .map(|(id, _)| id.clone())
        .collect();
    for e in &edges {
        let edge = g.edge(e).expect("edge of g");
        vertices.insert(edge.src.clone());
        vertices.insert(edge.tgt.clone());
    }
    (vertices, edges)
}

/// Maps a match across the modification; absent if any image element is not retained.
pub fn translate_match(
    m: &Match,
    modification: &GraphModification,
    direction: Direction,
) -> Option<Match> {
    let other = match direction {
        Direction::ToSource => &modification.source,
        Direction::ToTarget => &modification.target,
    };
    m.image_ids()
        .all(|id| other.contains(id))
        .then(|| m.clone())
}

/// One atomic change of a changeset file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "camelCase")]
pub enum Change {
    AddVertex {
        id: Id,
        #[serde(rename = "type")]
        ty: Id,
    },
    AddEdge {
        id: Id,
        #[serde(rename = "type")]
        ty: Id,
        src: Id,
        tgt: Id,
    },
    RemoveVertex {
        id: Id,
    },
    RemoveEdge {
        id: Id,
    },
    RelevantAdd {
        id: Id,
    },
    RelevantRemove {
        id: Id,
    },
}

/// Effect of a change on the host graph or its relevant subgraph, after cascading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HostEvent {
    VertexAdded(Id, Id),
    VertexRemoved(Id, Id),
    EdgeAdded(Id, Edge),
    EdgeRemoved(Id, Edge),
    RelevantVertexAdded(Id, Id),
    RelevantVertexRemoved(Id, Id),
    RelevantEdgeAdded(Id),
    RelevantEdgeRemoved(Id),
}

/// A host graph together with its relevant subgraph.
#[derive(Debug, Clone)]
pub struct HostState {
    pub graph: TypedGraph,
    pub relevant: RelevantSubgraph,
}

impl HostState {
    pub fn new(graph: TypedGraph, relevant: RelevantSubgraph) -> Result<Self, GraphError> {
        relevant.validate(&graph)?;
        Ok(HostState { graph, relevant })
    }

    /// Applies one change, cascading where needed: removing a vertex first removes its
    /// incident edges, adding an edge to the relevant subgraph also adds its endpoints,
    /// and removing a vertex from it also removes its incident relevant edges.
    pub fn apply(&mut self, change: &Change) -> Result<Vec<HostEvent>, GraphError> {
        let mut events = Vec::new();
        match change {
            Change::AddVertex { id, ty } => {
                self.graph.add_vertex(id.clone(), ty.clone())?;
                events.push(HostEvent::VertexAdded(id.clone(), ty.clone()));
            }
            Change::AddEdge { id, ty, src, tgt } => {
                self.graph
                    .add_edge(id.clone(), ty.clone(), src.clone(), tgt.clone())?;
                let e = self.graph.edge(id).expect("just added").clone();
                events.push(HostEvent::EdgeAdded(id.clone(), e));
            }
            Change::RemoveEdge { id } => {
                if !self.graph.has_edge(id) {
                    return Err(GraphError::UnknownEdge(id.clone()));
                }
                self.remove_edge(id, &mut events);
            }
            Change::RemoveVertex { id } => {
                if !self.graph.has_vertex(id) {
                    return Err(GraphError::UnknownVertex(id.clone()));
                }
                let incident: BTreeSet<Id> = self
                    .graph
                    .out_edges(id)
                    .chain(self.graph.in_edges(id))
                    .cloned()
                    .collect();
                for e in incident {
                    self.remove_edge(&e, &mut events);
                }
                if self.relevant.vertices.remove(id) {
                    let ty = self.graph.vertex_type(id).expect("present").clone();
                    events.push(HostEvent::RelevantVertexRemoved(id.clone(), ty));
                }
                let ty = self.graph.remove_vertex(id)?;
                events.push(HostEvent::VertexRemoved(id.clone(), ty));
            }
            Change::RelevantAdd { id } => {
                if let Some(ty) = self.graph.vertex_type(id) {
                    if self.relevant.vertices.insert(id.clone()) {
                        events.push(HostEvent::RelevantVertexAdded(id.clone(), ty.clone()));
                    }
                } else if let Some(e) = self.graph.edge(id) {
                    for v in [e.src.clone(), e.tgt.clone()] {
                        if self.relevant.vertices.insert(v.clone()) {
                            let ty = self.graph.vertex_type(&v).expect("endpoint").clone();
                            events.push(HostEvent::RelevantVertexAdded(v, ty));
                        }
                    }
                    if self.relevant.edges.insert(id.clone()) {
                        events.push(HostEvent::RelevantEdgeAdded(id.clone()));
                    }
                } else {
                    return Err(GraphError::UnknownElement(id.clone()));
                }
            }
            Change::RelevantRemove { id } => {
                if let Some(ty) = self.graph.vertex_type(id).cloned() {
                    let incident: BTreeSet<Id> = self
                        .graph
                        .out_edges(id)
                        .chain(self.graph.in_edges(id))
                        .filter(|e| self.relevant.edges.contains(*e))
                        .cloned()
                        .collect();
                    for e in incident {
                        self.relevant.edges.remove(&e);
                        events.push(HostEvent::RelevantEdgeRemoved(e));
                    }
                    if self.relevant.vertices.remove(id) {
                        events.push(HostEvent::RelevantVertexRemoved(id.clone(), ty));
                    }
                } else if self.graph.has_edge(id) {
                    if self.relevant.edges.remove(id) {
                        events.push(HostEvent::RelevantEdgeRemoved(id.clone()));
                    }
                } else {
                    return Err(GraphError::UnknownElement(id.clone()));
                }
            }
        }
        Ok(events)
    }

    fn remove_edge(&mut self, id: &Id, events: &mut Vec<HostEvent>) {
        if self.relevant.edges.remove(id) {
            events.push(HostEvent::RelevantEdgeRemoved(id.clone()));
        }
        let e = self.graph.remove_edge(id).expect("edge present");
        events.push(HostEvent::EdgeRemoved(id.clone(), e));
    }

    /// Undoes `events`, which must be the most recent events produced by `apply`.
    pub fn revert(&mut self, events: &[HostEvent]) {
        for ev in events.iter().rev() {
            match ev {
                HostEvent::VertexAdded(id, _) => {
                    self.graph
                        .remove_vertex(id)
                        .expect("reverting a recorded event");
                }
                HostEvent::VertexRemoved(id, ty) => {
                    self.graph
                        .add_vertex(id.clone(), ty.clone())
                        .expect("reverting a recorded event");
                }
                HostEvent::EdgeAdded(id, _) => {
                    self.graph
                        .remove_edge(id)
                        .expect("reverting a recorded event");
                }
                HostEvent::EdgeRemoved(id, e) => {
                    self.graph
                        .add_edge(id.clone(), e.ty.clone(), e.src.clone(), e.tgt.clone())
                        .expect("reverting a recorded event");
                }
                HostEvent::RelevantVertexAdded(id, _) => {
                    self.relevant.vertices.remove(id);
                }
                HostEvent::RelevantVertexRemoved(id, _) => {
                    self.relevant.vertices.insert(id.clone());
                }
                HostEvent::RelevantEdgeAdded(id) => {
                    self.relevant.edges.remove(id);
                }
                HostEvent::RelevantEdgeRemoved(id) => {
                    self.relevant.edges.insert(id.clone());
                }
            }
        }
    }

    pub fn apply_all(&mut self, changes: &[Change]) -> Result<Vec<HostEvent>, GraphError> {
        let mut all = Vec::new();
        for c in changes {
            all.extend(self.apply(c)?);
        }
        Ok(all)
    }
}

/// Applies a changeset to a host state, returning the modification and the target
/// relevant subgraph.
pub fn modification_from_changes(
    source: &HostState,
    changes: &[Change],
) -> Result<(GraphModification, RelevantSubgraph), GraphError> {
    let mut target = source.clone();
    target.apply_all(changes)?;
    let m = GraphModification::new(source.graph.clone(), target.graph)?;
    Ok((m, target.relevant))
}
