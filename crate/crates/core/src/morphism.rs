//! Graph morphisms stored as explicit vertex and edge mapping tables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::{GraphError, TypedGraph};
use crate::id::Id;

/// A (possibly partial) graph morphism. Pairs are kept sorted by domain id, so equal
/// mappings compare and hash equal regardless of construction order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Match {
    v: Vec<(Id, Id)>,
    e: Vec<(Id, Id)>,
}

/// Wire form: `{"vMap": {...}, "eMap": {...}}`.
#[derive(Serialize, Deserialize)]
struct MatchRepr {
    #[serde(rename = "vMap", default)]
    v: BTreeMap<Id, Id>,
    #[serde(rename = "eMap", default)]
    e: BTreeMap<Id, Id>,
}

impl Serialize for Match {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatchRepr {
            v: self.v.iter().cloned().collect(),
            e: self.e.iter().cloned().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Match {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MatchRepr::deserialize(d)?;
        Ok(Match {
            v: r.v.into_iter().collect(),
            e: r.e.into_iter().collect(),
        })
    }
}

fn lookup<'a>(pairs: &'a [(Id, Id)], key: &str) -> Option<&'a Id> {
    pairs
        .binary_search_by(|(k, _)| k.as_str().cmp(key))
        .ok()
        .map(|i| &pairs[i].1)
}

fn normalize(mut pairs: Vec<(Id, Id)>) -> Result<Vec<(Id, Id)>, Id> {
    pairs.sort();
    pairs.dedup();
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(w[0].0.clone());
        }
    }
    Ok(pairs)
}

fn merge_pairs(a: &[(Id, Id)], b: &[(Id, Id)]) -> Option<Vec<(Id, Id)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if a[i].1 != b[j].1 {
                    return None;
                }
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some(out)
}

impl Match {
    pub fn empty() -> Self {
        Match::default()
    }

    /// Builds a mapping; fails with the offending key if a domain id is mapped twice.
    pub fn from_pairs<V, E>(v: V, e: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = (Id, Id)>,
        E: IntoIterator<Item = (Id, Id)>,
    {
        let dup = |k: Id| GraphError::MalformedMorphism(format!("`{k}` mapped twice"));
        Ok(Match {
            v: normalize(v.into_iter().collect()).map_err(dup)?,
            e: normalize(e.into_iter().collect()).map_err(dup)?,
        })
    }

    /// Convenience constructor for literal mappings in tests and fixtures.
    pub fn of(v: &[(&str, &str)], e: &[(&str, &str)]) -> Self {
        let conv = |p: &[(&str, &str)]| {
            p.iter()
                .map(|(a, b)| (Id::new(a), Id::new(b)))
                .collect::<Vec<_>>()
        };
        Match::from_pairs(conv(v), conv(e)).expect("literal mapping is functional")
    }

    pub(crate) fn from_sorted(v: Vec<(Id, Id)>, e: Vec<(Id, Id)>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(e.windows(2).all(|w| w[0].0 < w[1].0));
        Match { v, e }
    }

    pub fn single_vertex(q: Id, h: Id) -> Self {
        Match {
            v: vec![(q, h)],
            e: Vec::new(),
        }
    }

    pub fn single_edge(v: (Id, Id), e: (Id, Id), w: (Id, Id)) -> Self {
        let vs = if v.0 == w.0 {
            vec![v]
        } else if v.0 < w.0 {
            vec![v, w]
        } else {
            vec![w, v]
        };
        Match { v: vs, e: vec![e] }
    }

    pub fn vertex(&self, q: &str) -> Option<&Id> {
        lookup(&self.v, q)
    }

    pub fn edge(&self, q: &str) -> Option<&Id> {
        lookup(&self.e, q)
    }

    pub fn vertex_pairs(&self) -> &[(Id, Id)] {
        &self.v
    }

    pub fn edge_pairs(&self) -> &[(Id, Id)] {
        &self.e
    }

    /// Number of mapped vertices plus mapped edges.
    pub fn size(&self) -> usize {
        self.v.len() + self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty() && self.e.is_empty()
    }

    /// Restriction to the given domain ids (ids not in the domain are ignored).
    pub fn restrict(&self, vertices: &[Id], edges: &[Id]) -> Match {
        let keep = |pairs: &[(Id, Id)], keys: &[Id]| {
            pairs
                .iter()
                .filter(|(k, _)| keys.contains(k))
                .cloned()
                .collect::<Vec<_>>()
        };
        Match {
            v: keep(&self.v, vertices),
            e: keep(&self.e, edges),
        }
    }

    /// Union of two mappings that agree on their shared domain.
    pub fn merge(&self, other: &Match) -> Option<Match> {
        Some(Match {
            v: merge_pairs(&self.v, &other.v)?,
            e: merge_pairs(&self.e, &other.e)?,
        })
    }

    /// `self ∘ inner`: defined where `inner` is defined and `self` is defined on its image.
    pub fn compose(&self, inner: &Match) -> Option<Match> {
        let v = inner
            .v
            .iter()
            .map(|(k, x)| self.vertex(x).map(|y| (k.clone(), y.clone())))
            .collect::<Option<Vec<_>>>()?;
        let e = inner
            .e
            .iter()
            .map(|(k, x)| self.edge(x).map(|y| (k.clone(), y.clone())))
            .collect::<Option<Vec<_>>>()?;
        Some(Match { v, e })
    }

    /// Domain ids and image ids, vertices then edges.
    pub fn pairs(&self) -> impl Iterator<Item = &(Id, Id)> {
        self.v.iter().chain(self.e.iter())
    }

    pub fn image_vertices(&self) -> impl Iterator<Item = &Id> {
        self.v.iter().map(|(_, h)| h)
    }

    pub fn image_ids(&self) -> impl Iterator<Item = &Id> {
        self.pairs().map(|(_, h)| h)
    }

    pub fn is_vertex_injective(&self) -> bool {
        let mut img: Vec<&Id> = self.image_vertices().collect();
        img.sort();
        img.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_injective(&self) -> bool {
        let mut e: Vec<&Id> = self.e.iter().map(|(_, h)| h).collect();
        e.sort();
        self.is_vertex_injective() && e.windows(2).all(|w| w[0] != w[1])
    }

    pub fn vertex_map(&self) -> BTreeMap<&Id, &Id> {
        self.v.iter().map(|(a, b)| (a, b)).collect()
    }

    pub fn edge_map(&self) -> BTreeMap<&Id, &Id> {
        self.e.iter().map(|(a, b)| (a, b)).collect()
    }
}

impl fmt::Debug for Match {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (k, v) in self.pairs() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{k}↦{v}")?;
        }
        write!(f, "}}")
    }
}

/// Structure, typing and (optionally) totality check of `m : domain → codomain`.
///
/// Dangling ids are reported as an error rather than `false`.
pub fn check_morphism(
    m: &Match,
    domain: &TypedGraph,
    codomain: &TypedGraph,
    total: bool,
) -> Result<bool, GraphError> {
    for (q, h) in m.vertex_pairs() {
        if !domain.has_vertex(q) {
            return Err(GraphError::MalformedMorphism(format!(
                "no domain vertex `{q}`"
            )));
        }
        if !codomain.has_vertex(h) {
            return Err(GraphError::MalformedMorphism(format!(
                "no codomain vertex `{h}`"
            )));
        }
    }
    for (q, h) in m.edge_pairs() {
        if !domain.has_edge(q) {
            return Err(GraphError::MalformedMorphism(format!(
                "no domain edge `{q}`"
            )));
        }
        if !codomain.has_edge(h) {
            return Err(GraphError::MalformedMorphism(format!(
                "no codomain edge `{h}`"
            )));
        }
    }
    for (q, h) in m.vertex_pairs() {
        if domain.vertex_type(q) != codomain.vertex_type(h) {
            return Ok(false);
        }
    }
    for (q, h) in m.edge_pairs() {
        let (qe, he) = (
            domain.edge(q).expect("checked"),
            codomain.edge(h).expect("checked"),
        );
        if qe.ty != he.ty {
            return Ok(false);
        }
        if m.vertex(&qe.src) != Some(&he.src) || m.vertex(&qe.tgt) != Some(&he.tgt) {
            return Ok(false);
        }
    }
    if total
        && (m.vertex_pairs().len() != domain.vertex_count()
            || m.edge_pairs().len() != domain.edge_count())
    {
        return Ok(false);
    }
    Ok(true)
}

/// Restricts `m` to the subgraph of `domain` spanned by the given ids.
pub fn restrict_morphism(
    m: &Match,
    domain: &TypedGraph,
    vertices: &[Id],
    edges: &[Id],
) -> Result<Match, GraphError> {
    for v in vertices {
        if !domain.has_vertex(v) {
            return Err(GraphError::InvalidSubgraph(format!(
                "`{v}` is not a domain vertex"
            )));
        }
    }
    for e in edges {
        let edge = domain
            .edge(e)
            .ok_or_else(|| GraphError::InvalidSubgraph(format!("`{e}` is not a domain edge")))?;
        if !vertices.contains(&edge.src) || !vertices.contains(&edge.tgt) {
            return Err(GraphError::InvalidSubgraph(format!(
                "edge `{e}` leaves the subgraph"
            )));
        }
    }
    Ok(m.restrict(vertices, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_agrees_on_overlap() {
        let a = Match::of(&[("p", "p1"), ("c", "c1")], &[("ce", "x")]);
        let b = Match::of(&[("c", "c1"), ("f", "f1")], &[("fe", "y")]);
        let m = a.merge(&b).unwrap();
        assert_eq!(m.size(), 5);
        let c = Match::of(&[("c", "c2")], &[]);
        assert!(a.merge(&c).is_none());
    }

    #[test]
    fn compose_follows_inner() {
        let outer = Match::of(&[("c2", "h1"), ("i", "h2")], &[]);
        let anchor = Match::of(&[("c", "c2")], &[]);
        assert_eq!(outer.compose(&anchor), Some(Match::of(&[("c", "h1")], &[])));
        let bad = Match::of(&[("c", "zz")], &[]);
        assert_eq!(outer.compose(&bad), None);
    }

    #[test]
    fn duplicate_keys_rejected() {
        let r = Match::from_pairs(
            vec![(Id::new("a"), Id::new("x")), (Id::new("a"), Id::new("y"))],
            vec![],
        );
        assert!(r.is_err());
    }
}
