//! Seeded random generators for type graphs, hosts, queries, relevant subgraphs and
//! change sequences within the small envelope the brute-force oracle can check.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{RelevantSubgraph, TypeGraph, TypedGraph};
use crate::id::Id;
use crate::modification::{Change, HostState};
use crate::morphism::Match;
use crate::query::{Condition, ExtendedQuery, QueryGraph};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size limits for random instances.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Edges per vertex, as a range.
    pub min_density: f64,
    pub max_density: f64,
    pub max_query_edges: usize,
    pub max_depth: usize,
    /// Probability that a host vertex is in the relevant subgraph.
    pub relevant_fraction: f64,
    pub edge_dominated: Option<bool>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            min_vertices: 6,
            max_vertices: 30,
            min_density: 0.6,
            max_density: 2.0,
            max_query_edges: 5,
            max_depth: 2,
            relevant_fraction: 0.15,
            edge_dominated: None,
        }
    }
}

/// Two or three vertex types with two to four edge types among them.
pub fn random_types(rng: &mut Rng64) -> Arc<TypeGraph> {
    let vts: Vec<&str> = ["A", "B", "C"][..rng.gen_range(2..=3)].to_vec();
    let mut pairs: Vec<(&str, &str)> = vts
        .iter()
        .flat_map(|a| vts.iter().map(move |b| (*a, *b)))
        .collect();
    pairs.shuffle(rng);
    let n = rng.gen_range(2..=4).min(pairs.len());
    let mut chosen = pairs[..n].to_vec();
    // keep every vertex type reachable by some edge type so patterns can grow
    for t in &vts {
        if !chosen.iter().any(|(a, b)| a == t || b == t) {
            chosen.push((t, vts[0]));
        }
    }
    let edges = chosen.iter().map(|(a, b)| {
        (
            Id::new(format!("{}{}", a.to_lowercase(), b.to_lowercase())),
            Id::new(a),
            Id::new(b),
        )
    });
    Arc::new(TypeGraph::new(vts.iter().copied(), edges).expect("generated type graph"))
}

fn edge_types(types: &TypeGraph) -> Vec<(Id, Id, Id)> {
    types
        .edge_types()
        .map(|(n, t)| (n.clone(), t.src.clone(), t.tgt.clone()))
        .collect()
}

/// A host with `n` vertices and about `n · density` edges of random types.
pub fn random_host(rng: &mut Rng64, types: &Arc<TypeGraph>, n: usize, density: f64) -> TypedGraph {
    let mut g = TypedGraph::new(types.clone());
    let vts: Vec<Id> = types.vertex_types().cloned().collect();
    for i in 0..n {
        g.add_vertex(
            format!("h{i}"),
            vts.choose(rng).expect("vertex types").clone(),
        )
        .expect("fresh vertex");
    }
    let ets = edge_types(types);
    let m = (n as f64 * density).round() as usize;
    let mut next = 0;
    for _ in 0..m {
        add_random_edge(rng, &mut g, &ets, &mut next);
    }
    g
}

fn add_random_edge(
    rng: &mut Rng64,
    g: &mut TypedGraph,
    ets: &[(Id, Id, Id)],
    next: &mut usize,
) -> bool {
    let (name, s, t) = ets.choose(rng).expect("edge types").clone();
    let srcs: Vec<Id> = g.vertices_of_type(&s).cloned().collect();
    let tgts: Vec<Id> = g.vertices_of_type(&t).cloned().collect();
    let (Some(a), Some(b)) = (srcs.choose(rng), tgts.choose(rng)) else {
        return false;
    };
    let id = format!("x{next}");
    *next += 1;
    g.add_edge(id, name, a.clone(), b.clone())
        .expect("typed edge");
    true
}

/// A host where each edge type has at least as many edges as either endpoint type has vertices.
pub fn edge_dominated_host(
    rng: &mut Rng64,
    types: &Arc<TypeGraph>,
    n: usize,
    extra: f64,
) -> TypedGraph {
    let mut g = random_host(rng, types, n, 0.0);
    let mut next = 0;
    for (name, s, t) in edge_types(types) {
        let srcs: Vec<Id> = g.vertices_of_type(&s).cloned().collect();
        let tgts: Vec<Id> = g.vertices_of_type(&t).cloned().collect();
        if srcs.is_empty() || tgts.is_empty() {
            continue;
        }
        let need = srcs.len().max(tgts.len());
        let count = need + (need as f64 * extra * rng.gen::<f64>()).round() as usize;
        for i in 0..count {
            // cover every vertex once, then pick at random
            let a = if i < srcs.len() {
                srcs[i].clone()
            } else {
                srcs.choose(rng).unwrap().clone()
            };
            let b = if i < tgts.len() {
                tgts[(i * 7 + 3) % tgts.len()].clone()
            } else {
                tgts.choose(rng).unwrap().clone()
            };
            g.add_edge(format!("x{next}"), name.clone(), a, b)
                .expect("typed edge");
            next += 1;
        }
    }
    // vertex types without any edge type keep the host edge-dominated trivially
    g
}

/// A weakly connected pattern with `1..=max_edges` edges (or a single vertex), with
/// vertex ids `{prefix}0..` and edge ids `{prefix}e0..`.
pub fn random_pattern(
    rng: &mut Rng64,
    types: &Arc<TypeGraph>,
    max_edges: usize,
    prefix: &str,
) -> QueryGraph {
    let mut g = TypedGraph::new(types.clone());
    let vts: Vec<Id> = types.vertex_types().cloned().collect();
    g.add_vertex(format!("{prefix}0"), vts.choose(rng).unwrap().clone())
        .unwrap();
    let edges = if max_edges == 0 || rng.gen_bool(0.05) {
        0
    } else {
        rng.gen_range(1..=max_edges)
    };
    grow(rng, &mut g, edges, prefix);
    QueryGraph::new(g)
}

/// Adds `k` edges, each touching an existing vertex.
fn grow(rng: &mut Rng64, g: &mut TypedGraph, k: usize, prefix: &str) {
    let ets = edge_types(g.types());
    for _ in 0..k {
        let vs = g.sorted_vertex_ids();
        let mut tries = 0;
        loop {
            tries += 1;
            if tries > 50 {
                return;
            }
            let (name, s, t) = ets.choose(rng).unwrap().clone();
            let anchor = vs.choose(rng).unwrap().clone();
            let aty = g.vertex_type(&anchor).unwrap().clone();
            let forward = if aty == s && aty == t {
                rng.gen_bool(0.5)
            } else if aty == s {
                true
            } else if aty == t {
                false
            } else {
                continue;
            };
            let other_ty = if forward { &t } else { &s };
            let existing: Vec<Id> = g.vertices_of_type(other_ty).cloned().collect();
            let other = if !existing.is_empty() && rng.gen_bool(0.3) {
                existing.choose(rng).unwrap().clone()
            } else {
                let id = Id::new(format!("{prefix}{}", g.vertex_count()));
                g.add_vertex(id.clone(), other_ty.clone()).unwrap();
                id
            };
            let (a, b) = if forward {
                (anchor, other)
            } else {
                (other, anchor)
            };
            g.add_edge(format!("{prefix}e{}", g.edge_count()), name, a, b)
                .unwrap();
            break;
        }
    }
}

/// A condition over `ctx` of depth at most `depth`.
pub fn random_condition(
    rng: &mut Rng64,
    ctx: &Arc<QueryGraph>,
    depth: usize,
    level: usize,
) -> Condition {
    if depth == 0 {
        return Condition::True;
    }
    match rng.gen_range(0..10) {
        0 => Condition::True,
        1 | 2 => Condition::not(random_condition(rng, ctx, depth - 1, level)),
        3 => Condition::and(
            random_condition(rng, ctx, depth - 1, level),
            random_condition(rng, ctx, depth - 1, level),
        ),
        _ => random_exists(rng, ctx, depth, level),
    }
}

fn random_exists(rng: &mut Rng64, ctx: &Arc<QueryGraph>, depth: usize, level: usize) -> Condition {
    let prefix = format!("{}", (b'p' + level as u8) as char);
    let (target, anchor) = if rng.gen_bool(0.35) {
        // total anchor: extend the context pattern itself
        let mut g = ctx.graph().clone();
        let k = rng.gen_range(1..=2);
        grow(rng, &mut g, k, &prefix);
        (QueryGraph::new(g), ctx.identity())
    } else {
        // partial anchor on one context vertex, or two when they are adjacent
        let vs = ctx.sorted_vertex_ids();
        let x = vs.choose(rng).unwrap().clone();
        let mut g = TypedGraph::new(ctx.types().clone());
        let x2 = Id::new(format!("{prefix}0"));
        g.add_vertex(x2.clone(), ctx.vertex_type(&x).unwrap().clone())
            .unwrap();
        let mut pairs = vec![(x.clone(), x2.clone())];
        let k = rng.gen_range(1..=2);
        grow(rng, &mut g, k, &prefix);
        if rng.gen_bool(0.3) {
            // map a second context vertex onto a target vertex of the same type
            let others: Vec<Id> = vs.iter().filter(|y| **y != x).cloned().collect();
            if let Some(y) = others.choose(rng) {
                let yty = ctx.vertex_type(y).unwrap();
                let cands: Vec<Id> = g
                    .vertices_of_type(yty)
                    .filter(|z| **z != x2)
                    .cloned()
                    .collect();
                if let Some(z) = cands.choose(rng) {
                    pairs.push((y.clone(), z.clone()));
                }
            }
        }
        (
            QueryGraph::new(g),
            Match::from_pairs(pairs, Vec::new()).unwrap(),
        )
    };
    let target = Arc::new(target.injective(ctx.injective));
    let child = random_condition(rng, &target, depth - 1, level + 1);
    Condition::exists(anchor, target, child)
}

/// Each vertex with probability `p`, plus each edge between chosen vertices with probability 1/2.
pub fn random_relevant(rng: &mut Rng64, host: &TypedGraph, p: f64) -> RelevantSubgraph {
    let vs: BTreeSet<Id> = host
        .sorted_vertex_ids()
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .collect();
    let es: BTreeSet<Id> = host
        .sorted_edge_ids()
        .into_iter()
        .filter(|e| {
            let edge = host.edge(e).unwrap();
            vs.contains(&edge.src) && vs.contains(&edge.tgt)
        })
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    RelevantSubgraph {
        vertices: vs,
        edges: es,
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub host: TypedGraph,
    pub relevant: RelevantSubgraph,
    pub query: ExtendedQuery,
}

pub fn random_instance(seed: u64, cfg: &GenConfig) -> Instance {
    let mut rng = rng(seed);
    let types = random_types(&mut rng);
    let n = rng.gen_range(cfg.min_vertices..=cfg.max_vertices);
    let dominated = cfg.edge_dominated.unwrap_or_else(|| rng.gen_bool(0.5));
    let host = if dominated {
        edge_dominated_host(&mut rng, &types, n, cfg.max_density - 1.0)
    } else {
        let d = rng.gen_range(cfg.min_density..=cfg.max_density);
        random_host(&mut rng, &types, n, d)
    };
    let pattern = Arc::new(random_pattern(&mut rng, &types, cfg.max_query_edges, "v"));
    let depth = rng.gen_range(0..=cfg.max_depth);
    let condition = random_condition(&mut rng, &pattern, depth, 0);
    let relevant = random_relevant(&mut rng, &host, cfg.relevant_fraction);
    Instance {
        host,
        relevant,
        query: ExtendedQuery::new(pattern, condition),
    }
}

/// Up to `n` valid atomic changes of any kind against `state`.
pub fn random_changes(rng: &mut Rng64, state: &HostState, n: usize, tag: &str) -> Vec<Change> {
    let mut sim = state.clone();
    let mut out = Vec::new();
    let vts: Vec<Id> = sim.graph.types().vertex_types().cloned().collect();
    let ets = edge_types(sim.graph.types());
    let mut fresh = 0;
    for _ in 0..n * 4 {
        if out.len() == n {
            break;
        }
        let change = match rng.gen_range(0..8) {
            0 => {
                fresh += 1;
                Some(Change::AddVertex {
                    id: Id::new(format!("{tag}v{fresh}")),
                    ty: vts.choose(rng).unwrap().clone(),
                })
            }
            1 | 2 => {
                let (name, s, t) = ets.choose(rng).unwrap().clone();
                let srcs: Vec<Id> = sim.graph.vertices_of_type(&s).cloned().collect();
                let tgts: Vec<Id> = sim.graph.vertices_of_type(&t).cloned().collect();
                match (srcs.choose(rng), tgts.choose(rng)) {
                    (Some(a), Some(b)) => {
                        fresh += 1;
                        Some(Change::AddEdge {
                            id: Id::new(format!("{tag}e{fresh}")),
                            ty: name,
                            src: a.clone(),
                            tgt: b.clone(),
                        })
                    }
                    _ => None,
                }
            }
            3 => sim
                .graph
                .sorted_vertex_ids()
                .choose(rng)
                .map(|v| Change::RemoveVertex { id: v.clone() }),
            4 => sim
                .graph
                .sorted_edge_ids()
                .choose(rng)
                .map(|e| Change::RemoveEdge { id: e.clone() }),
            5 | 6 => {
                let all: Vec<Id> = sim
                    .graph
                    .sorted_vertex_ids()
                    .into_iter()
                    .chain(sim.graph.sorted_edge_ids())
                    .collect();
                all.choose(rng)
                    .map(|x| Change::RelevantAdd { id: x.clone() })
            }
            _ => {
                let all: Vec<Id> = sim
                    .relevant
                    .vertices
                    .iter()
                    .chain(&sim.relevant.edges)
                    .cloned()
                    .collect();
                all.choose(rng)
                    .map(|x| Change::RelevantRemove { id: x.clone() })
            }
        };
        if let Some(c) = change {
            sim.apply(&c).expect("generated change is valid");
            out.push(c);
        }
    }
    out
}

/// Up to `n` creations and deletions confined to the relevant subgraph. Created elements
/// join the relevant subgraph; only relevant vertices whose incident edges are all
/// relevant get deleted, so the rest of the host stays untouched.
pub fn random_restricted_changes(
    rng: &mut Rng64,
    state: &HostState,
    n: usize,
    tag: &str,
) -> Vec<Change> {
    let mut sim = state.clone();
    let mut out = Vec::new();
    let vts: Vec<Id> = sim.graph.types().vertex_types().cloned().collect();
    let ets = edge_types(sim.graph.types());
    let mut fresh = 0;
    for _ in 0..n * 4 {
        if out.len() == n {
            break;
        }
        let mut batch = Vec::new();
        match rng.gen_range(0..6) {
            0 => {
                fresh += 1;
                let id = Id::new(format!("{tag}v{fresh}"));
                batch.push(Change::AddVertex {
                    id: id.clone(),
                    ty: vts.choose(rng).unwrap().clone(),
                });
                batch.push(Change::RelevantAdd { id });
            }
            1 | 2 => {
                let (name, s, t) = ets.choose(rng).unwrap().clone();
                let pick = |ty: &Id, rng: &mut Rng64| -> Option<Id> {
                    let c: Vec<Id> = sim
                        .relevant
                        .vertices
                        .iter()
                        .filter(|v| sim.graph.vertex_type(v) == Some(ty))
                        .cloned()
                        .collect();
                    c.choose(rng).cloned()
                };
                if let (Some(a), Some(b)) = (pick(&s, rng), pick(&t, rng)) {
                    fresh += 1;
                    let id = Id::new(format!("{tag}e{fresh}"));
                    batch.push(Change::AddEdge {
                        id: id.clone(),
                        ty: name,
                        src: a,
                        tgt: b,
                    });
                    batch.push(Change::RelevantAdd { id });
                }
            }
            3 | 4 => {
                let es: Vec<Id> = sim.relevant.edges.iter().cloned().collect();
                if let Some(e) = es.choose(rng) {
                    batch.push(Change::RemoveEdge { id: e.clone() });
                }
            }
            _ => {
                let vs: Vec<Id> = sim
                    .relevant
                    .vertices
                    .iter()
                    .filter(|v| {
                        sim.graph
                            .out_edges(v)
                            .chain(sim.graph.in_edges(v))
                            .all(|e| sim.relevant.edges.contains(e))
                    })
                    .cloned()
                    .collect();
                if let Some(v) = vs.choose(rng) {
                    batch.push(Change::RemoveVertex { id: v.clone() });
                }
            }
        }
        for c in batch {
            sim.apply(&c).expect("generated change is valid");
            out.push(c);
        }
    }
    out
}
