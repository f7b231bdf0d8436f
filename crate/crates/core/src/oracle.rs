//! Brute-force reference semantics: match enumeration by backtracking, condition
//! satisfaction, satisfaction dependence, completeness/correctness checks and result
//! diffs. Shares no matching code with the RETE engines.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::delta::ResultDelta;
use crate::graph::{RelevantSubgraph, TypedGraph};
use crate::id::Id;
use crate::modification::{translate_match, Direction, GraphModification};
use crate::morphism::{check_morphism, Match};
use crate::query::{Condition, ExtendedQuery, QueryGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("match is not total on the condition's context graph (missing `{0}`)")]
    ContextMismatch(Id),
}

/// All total type-preserving morphisms `q → host`.
pub fn enumerate_matches(q: &QueryGraph, host: &TypedGraph) -> BTreeSet<Match> {
    enumerate_extending(q, host, &Match::empty())
        .into_iter()
        .collect()
}

/// All matches `q → host` that agree with `fixed` wherever `fixed` is defined.
pub fn enumerate_extending(q: &QueryGraph, host: &TypedGraph, fixed: &Match) -> Vec<Match> {
    let order = vertex_order(q);
    let mut search = Search {
        q,
        host,
        fixed,
        order: &order,
        assign: Vec::new(),
        out: Vec::new(),
    };
    search.vertices(0);
    search.out
}

/// Vertices in breadth-first order from the smallest id of each component, so that most
/// vertices after the first have an assigned neighbour.
fn vertex_order(q: &QueryGraph) -> Vec<Id> {
    let mut order: Vec<Id> = Vec::new();
    let mut seen = BTreeSet::new();
    for start in q.sorted_vertex_ids() {
        if !seen.insert(start.clone()) {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let mut next: Vec<Id> = q
                .out_edges(&v)
                .chain(q.in_edges(&v))
                .flat_map(|e| {
                    let e = q.edge(e).expect("indexed");
                    [e.src.clone(), e.tgt.clone()]
                })
                .collect();
            next.sort();
            for w in next {
                if seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
            order.push(v);
        }
    }
    order
}

struct Search<'a> {
    q: &'a QueryGraph,
    host: &'a TypedGraph,
    fixed: &'a Match,
    order: &'a [Id],
    assign: Vec<(Id, Id)>,
    out: Vec<Match>,
}

impl Search<'_> {
    fn assigned(&self, v: &str) -> Option<&Id> {
        self.assign
            .iter()
            .find(|(q, _)| q.as_str() == v)
            .map(|(_, h)| h)
    }

    fn vertices(&mut self, i: usize) {
        if i == self.order.len() {
            self.edges();
            return;
        }
        let v = self.order[i].clone();
        let ty = self.q.vertex_type(&v).expect("query vertex").clone();
        let candidates: Vec<Id> = match self.fixed.vertex(&v) {
            Some(h) => vec![h.clone()],
            None => self.host.vertices_of_type(&ty).cloned().collect(),
        };
        for h in candidates {
            if self.host.vertex_type(&h) != Some(&ty) {
                continue;
            }
            if self.q.injective && self.assign.iter().any(|(_, x)| *x == h) {
                continue;
            }
            self.assign.push((v.clone(), h));
            if self.edges_possible(&v) {
                self.vertices(i + 1);
            }
            self.assign.pop();
        }
    }

    /// Every query edge between assigned vertices touching `v` has at least one host edge.
    fn edges_possible(&self, v: &Id) -> bool {
        let q = self.q;
        q.out_edges(v).chain(q.in_edges(v)).all(|e| {
            let qe = q.edge(e).expect("indexed");
            match (self.assigned(&qe.src), self.assigned(&qe.tgt)) {
                (Some(s), Some(t)) => !self.host_edges(e, s, t).is_empty(),
                _ => true,
            }
        })
    }

    fn host_edges(&self, qe_id: &str, s: &Id, t: &Id) -> Vec<Id> {
        let qe = self.q.edge(qe_id).expect("query edge");
        let mut hs: Vec<Id> = self
            .host
            .out_edges(s)
            .filter(|h| {
                let he = self.host.edge(h).expect("indexed");
                he.ty == qe.ty && he.tgt == *t
            })
            .cloned()
            .collect();
        if let Some(f) = self.fixed.edge(qe_id) {
            hs.retain(|h| h == f);
        }
        hs
    }

    fn edges(&mut self) {
        let qedges = self.q.sorted_edge_ids();
        let mut choices = Vec::with_capacity(qedges.len());
        for e in &qedges {
            let qe = self.q.edge(e).expect("query edge");
            let s = self.assigned(&qe.src).expect("assigned").clone();
            let t = self.assigned(&qe.tgt).expect("assigned").clone();
            choices.push(self.host_edges(e, &s, &t));
        }
        let mut pick = vec![0usize; qedges.len()];
        if choices.iter().any(|c| c.is_empty()) {
            return;
        }
        loop {
            let epairs: Vec<(Id, Id)> = qedges
                .iter()
                .zip(&pick)
                .zip(&choices)
                .map(|((q, &i), c)| (q.clone(), c[i].clone()))
                .collect();
            let injective_ok = !self.q.injective || {
                let mut imgs: Vec<&Id> = epairs.iter().map(|(_, h)| h).collect();
                imgs.sort();
                imgs.windows(2).all(|w| w[0] != w[1])
            };
            if injective_ok {
                let m = Match::from_pairs(self.assign.clone(), epairs).expect("functional");
                self.out.push(m);
            }
            let mut k = 0;
            loop {
                if k == pick.len() {
                    return;
                }
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }
}

/// Fixed part of a `Q'` match induced by `m` through the anchor: `a(x) ↦ m(x)`.
fn anchored(m: &Match, anchor: &Match) -> Result<Match, OracleError> {
    let v = anchor
        .vertex_pairs()
        .iter()
        .map(|(x, y)| {
            m.vertex(x)
                .map(|h| (y.clone(), h.clone()))
                .ok_or_else(|| OracleError::ContextMismatch(x.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let e = anchor
        .edge_pairs()
        .iter()
        .map(|(x, y)| {
            m.edge(x)
                .map(|h| (y.clone(), h.clone()))
                .ok_or_else(|| OracleError::ContextMismatch(x.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Match::from_pairs(v, e).expect("anchor is injective"))
}

fn check_context(m: &Match, ctx: &QueryGraph) -> Result<(), OracleError> {
    for v in ctx.sorted_vertex_ids() {
        if m.vertex(&v).is_none() {
            return Err(OracleError::ContextMismatch(v));
        }
    }
    for e in ctx.sorted_edge_ids() {
        if m.edge(&e).is_none() {
            return Err(OracleError::ContextMismatch(e));
        }
    }
    Ok(())
}

/// Truth value of `m ⊨ ψ` where `ctx` is the context graph of `ψ`.
pub fn eval_condition(
    m: &Match,
    psi: &Condition,
    ctx: &QueryGraph,
    host: &TypedGraph,
) -> Result<bool, OracleError> {
    check_context(m, ctx)?;
    eval(m, psi, host)
}

fn eval(m: &Match, psi: &Condition, host: &TypedGraph) -> Result<bool, OracleError> {
    Ok(match psi {
        Condition::True => true,
        Condition::Not(c) => !eval(m, c, host)?,
        Condition::And(a, b) => eval(m, a, host)? && eval(m, b, host)?,
        Condition::Exists {
            anchor,
            target,
            child,
        } => {
            let fixed = anchored(m, anchor)?;
            for m2 in enumerate_extending(target, host, &fixed) {
                if eval(&m2, child, host)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// `{m ∈ M(Q, H) | m ⊨ ψ}`.
pub fn satisfying_matches(q: &ExtendedQuery, host: &TypedGraph) -> BTreeSet<Match> {
    enumerate_matches(&q.pattern, host)
        .into_iter()
        .filter(|m| eval(m, &q.condition, host).expect("total match"))
        .collect()
}

/// Whether the match uses at least one vertex of the relevant subgraph.
pub fn touches(m: &Match, hp: &RelevantSubgraph) -> bool {
    m.image_vertices().any(|v| hp.contains_vertex(v))
}

pub fn is_satisfaction_dependent(
    m: &Match,
    psi: &Condition,
    ctx: &QueryGraph,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
) -> Result<bool, OracleError> {
    check_context(m, ctx)?;
    sat_dep(m, psi, host, hp)
}

fn sat_dep(
    m: &Match,
    psi: &Condition,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
) -> Result<bool, OracleError> {
    Ok(match psi {
        Condition::True => false,
        Condition::Not(c) => sat_dep(m, c, host, hp)?,
        Condition::And(a, b) => sat_dep(m, a, host, hp)? || sat_dep(m, b, host, hp)?,
        Condition::Exists {
            anchor,
            target,
            child,
        } => {
            let fixed = anchored(m, anchor)?;
            for m2 in enumerate_extending(target, host, &fixed) {
                if touches(&m2, hp) || sat_dep(&m2, child, host, hp)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// All satisfaction dependent matches of `(Q, ψ)`.
pub fn satisfaction_dependent_matches(
    q: &ExtendedQuery,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
) -> BTreeSet<Match> {
    enumerate_matches(&q.pattern, host)
        .into_iter()
        .filter(|m| sat_dep(m, &q.condition, host, hp).expect("total match"))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub matches: BTreeSet<Match>,
    pub violations: Vec<(String, Match)>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every match touching `hp` must be in `results`.
pub fn check_completeness(
    results: &BTreeSet<Match>,
    q: &QueryGraph,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
) -> OracleReport {
    let matches = enumerate_matches(q, host);
    let violations = matches
        .iter()
        .filter(|m| touches(m, hp) && !results.contains(*m))
        .map(|m| {
            (
                "missing match touching the relevant subgraph".to_string(),
                m.clone(),
            )
        })
        .collect();
    OracleReport {
        matches,
        violations,
    }
}

/// Every result must be a total morphism into the host.
pub fn check_soundness(
    results: &BTreeSet<Match>,
    q: &QueryGraph,
    host: &TypedGraph,
) -> OracleReport {
    let violations = results
        .iter()
        .filter(|m| {
            !matches!(check_morphism(m, q, host, true), Ok(true))
                || (q.injective && !m.is_injective())
        })
        .map(|m| ("not a match".to_string(), m.clone()))
        .collect();
    OracleReport {
        matches: BTreeSet::new(),
        violations,
    }
}

/// Results must satisfy the condition, and every satisfying match touching `hp` must be present.
pub fn check_correctness(
    results: &BTreeSet<Match>,
    q: &ExtendedQuery,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
) -> OracleReport {
    let matches = satisfying_matches(q, host);
    let mut violations = Vec::new();
    for r in results {
        if !matches.contains(r) {
            violations.push((
                "result does not satisfy the condition".to_string(),
                r.clone(),
            ));
        }
    }
    for m in &matches {
        if touches(m, hp) && !results.contains(m) {
            violations.push((
                "missing satisfying match touching the relevant subgraph".to_string(),
                m.clone(),
            ));
        }
    }
    OracleReport {
        matches,
        violations,
    }
}

/// Recompute-and-diff reference for result changes caused by a modification.
pub fn oracle_delta(q: &ExtendedQuery, m: &GraphModification) -> ResultDelta {
    let before = satisfying_matches(q, m.source());
    let after = satisfying_matches(q, m.target());
    let removed = before
        .iter()
        .filter(|x| translate_match(x, m, Direction::ToTarget).is_none_or(|t| !after.contains(&t)))
        .cloned()
        .collect();
    let added = after
        .iter()
        .filter(|x| translate_match(x, m, Direction::ToSource).is_none_or(|t| !before.contains(&t)))
        .cloned()
        .collect();
    ResultDelta { removed, added }
}
