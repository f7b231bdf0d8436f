//! Satisfaction-dependent matches (`localize^sat`), localized change detection
//! (`localize^Δ`) and the two-sided diff that turns a subgraph-restricted modification
//! into removed and added results.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{execute_order, stripped_result_set, ExecEnv, MsConfiguration};
use crate::graph::{RelevantSubgraph, TypedGraph};
use crate::marking::Marking;
use crate::modification::{validate_subgraph_restricted, Direction, GraphModification};
use crate::morphism::Match;
use crate::msnet::{
    add_rps, localize_pattern, localize_psi_into, LocalizeOptions, Localized, MsKind, MsNet,
    PsiNet, Rps, Side,
};
use crate::query::{Condition, ExtendedQuery, QueryGraph};
use crate::rete::{build_join_tree, classify_anchor, NodeId, QueryPart, ReteError};

/// Results lost and gained by a modification.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDelta {
    pub removed: BTreeSet<Match>,
    pub added: BTreeSet<Match>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("modification is not subgraph-restricted for the given relevant subgraphs")]
    PreconditionViolation,
    #[error(transparent)]
    Rete(#[from] ReteError),
}

/// Shape of a `localize^sat` net. Negations do not appear: they reuse the child's net.
#[derive(Debug, Clone)]
pub enum SatNet {
    True {
        dummy: NodeId,
    },
    Exists {
        base: Box<Localized>,
        target: Box<Localized>,
        child: Box<SatNet>,
        union: NodeId,
        rps: Rps,
        join: NodeId,
    },
    And {
        left: Box<SatNet>,
        right: Box<SatNet>,
        union: NodeId,
    },
}

impl SatNet {
    pub fn production(&self) -> NodeId {
        match self {
            SatNet::True { dummy } => *dummy,
            SatNet::Exists { join, .. } => *join,
            SatNet::And { union, .. } => *union,
        }
    }

    pub fn order(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.push_order(&mut out);
        out
    }

    fn push_order(&self, out: &mut Vec<NodeId>) {
        match self {
            SatNet::True { dummy } => out.push(*dummy),
            SatNet::Exists {
                base,
                target,
                child,
                union,
                rps,
                join,
            } => {
                out.extend(target.order());
                child.push_order(out);
                out.push(*union);
                out.extend(rps.order());
                out.extend(base.order());
                out.push(*join);
            }
            SatNet::And { left, right, union } => {
                left.push_order(out);
                right.push_order(out);
                out.push(*union);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SatLocalizedNet {
    pub net: MsNet,
    pub root: SatNet,
}

impl SatLocalizedNet {
    pub fn order(&self) -> Vec<NodeId> {
        self.root.order()
    }
}

/// Net computing (an overapproximation of) the satisfaction-dependent matches.
pub fn localize_sat(q: &ExtendedQuery) -> Result<SatLocalizedNet, ReteError> {
    let mut net = MsNet::new();
    let root = localize_sat_into(&mut net, &q.pattern, &q.condition, Side::Source)?;
    net.production = root.production();
    Ok(SatLocalizedNet { net, root })
}

pub fn order_sat(s: &SatLocalizedNet) -> Vec<NodeId> {
    s.root.order()
}

fn localize_sat_into(
    net: &mut MsNet,
    q: &Arc<QueryGraph>,
    psi: &Condition,
    side: Side,
) -> Result<SatNet, ReteError> {
    Ok(match psi {
        Condition::True => SatNet::True {
            dummy: net.add(MsKind::Dummy, QueryPart::whole(q), vec![], 0, side),
        },
        Condition::Not(child) => localize_sat_into(net, q, child, side)?,
        Condition::And(a, b) => {
            let left = localize_sat_into(net, q, a, side)?;
            let right = localize_sat_into(net, q, b, side)?;
            let (pl, pr) = (left.production(), right.production());
            let h = net.height(pl).max(net.height(pr));
            let union = net.add(MsKind::Union, QueryPart::whole(q), vec![pl, pr], h, side);
            SatNet::And {
                left: Box::new(left),
                right: Box::new(right),
                union,
            }
        }
        Condition::Exists {
            anchor,
            target,
            child,
        } => {
            let base = localize_pattern(net, q, side, false)?;
            let tnet = localize_pattern(net, target, side, false)?;
            let csat = localize_sat_into(net, target, child, side)?;
            let (pt, pc) = (tnet.production(), csat.production());
            let h = net.height(pt).max(net.height(pc));
            let union = net.add(
                MsKind::Union,
                QueryPart::whole(target),
                vec![pt, pc],
                h,
                side,
            );
            let (v, av) = anchor
                .vertex_pairs()
                .first()
                .cloned()
                .ok_or_else(|| ReteError::UnsupportedQuery("anchor maps no vertex".into()))?;
            let ext = base
                .extension_point(net, &v)
                .expect("anchor domain vertex has a vertex input");
            let rps = add_rps(
                net,
                union,
                Marking::from(h),
                Marking::INF,
                Match::single_vertex(av, v.clone()),
                QueryPart::vertex(q, &v),
                ext,
            );
            let bp = base.production();
            let query = QueryPart::whole(q);
            let variant = classify_anchor(anchor, &query, &net.nodes[union].query);
            let height = 1 + net.height(bp).max(h);
            let join = net.add(
                MsKind::SemiJoin {
                    anchor: anchor.clone(),
                    variant,
                },
                query,
                vec![bp, union],
                height,
                side,
            );
            SatNet::Exists {
                base: Box::new(base),
                target: Box::new(tnet),
                child: Box::new(csat),
                union,
                rps,
                join,
            }
        }
    })
}

/// Stripped production of the sat net: contains every satisfaction-dependent match.
pub fn compute_sat_dependent(
    q: &ExtendedQuery,
    host: &TypedGraph,
    relevant: &RelevantSubgraph,
) -> Result<BTreeSet<Match>, ReteError> {
    let s = localize_sat(q)?;
    let env = ExecEnv::single(host, relevant);
    let c = execute_order(&s.net, &env, &s.order(), MsConfiguration::empty(&s.net))?;
    Ok(stripped_result_set(&c, s.net.production))
}

/// The nodes of one `localize^Δ` net, including the sat net over the other host graph
/// whose translated results it consumes.
#[derive(Debug, Clone)]
pub struct DeltaNet {
    pub base: Localized,
    pub filter: NodeId,
    pub sat: SatNet,
    pub other_sat: SatNet,
    pub translate: NodeId,
    pub union: NodeId,
    pub psi: PsiNet,
    pub rps: Rps,
    pub join: NodeId,
}

impl DeltaNet {
    pub fn production(&self) -> NodeId {
        self.join
    }

    /// The other side's sat net first, then the order for the net itself.
    pub fn order(&self) -> Vec<NodeId> {
        let mut out = self.other_sat.order();
        out.extend(self.base.order());
        out.push(self.filter);
        out.extend(self.sat.order());
        out.push(self.translate);
        out.push(self.union);
        out.extend(self.rps.order());
        out.extend(self.psi.order());
        out.push(self.join);
        out
    }
}

#[derive(Debug, Clone)]
pub struct DeltaLocalizedNet {
    pub net: MsNet,
    pub root: DeltaNet,
}

impl DeltaLocalizedNet {
    pub fn order(&self) -> Vec<NodeId> {
        self.root.order()
    }
}

fn other(side: Side) -> Side {
    match side {
        Side::Source => Side::Target,
        Side::Target => Side::Source,
    }
}

fn toward(side: Side) -> Direction {
    match side {
        Side::Source => Direction::ToSource,
        Side::Target => Direction::ToTarget,
    }
}

/// `localize^Δ` on `side`, with the sat net for the other side bound through a translation.
pub(crate) fn localize_delta_into(
    net: &mut MsNet,
    q: &ExtendedQuery,
    side: Side,
    opts: LocalizeOptions,
) -> Result<DeltaNet, ReteError> {
    let whole = QueryPart::whole(&q.pattern);
    let h = build_join_tree(&q.pattern)?.height();
    let base = localize_pattern(net, &q.pattern, side, false)?;
    let bp = base.production();
    let filter = net.add(
        MsKind::Filter(Marking::from(h)),
        whole.clone(),
        vec![bp],
        h,
        side,
    );
    let sat = localize_sat_into(net, &q.pattern, &q.condition, side)?;
    let other_sat = localize_sat_into(net, &q.pattern, &q.condition, other(side))?;
    let op = other_sat.production();
    let translate = net.add(
        MsKind::Translate(toward(side)),
        whole.clone(),
        vec![op],
        net.height(op),
        side,
    );
    let sp = sat.production();
    let uh = h.max(net.height(sp)).max(net.height(translate));
    let union = net.add(
        MsKind::Union,
        whole.clone(),
        vec![filter, sp, translate],
        uh,
        side,
    );
    let psi = localize_psi_into(net, &q.pattern, &q.condition, side, opts, true)?;
    let v = q.pattern.sorted_vertex_ids()[0].clone();
    let ext = psi
        .base()
        .extension_point(net, &v)
        .expect("pattern vertex has a vertex input");
    let rps = add_rps(
        net,
        union,
        Marking::from(uh),
        Marking::INF,
        Match::single_vertex(v.clone(), v.clone()),
        QueryPart::vertex(&q.pattern, &v),
        ext,
    );
    let left = if opts.guard_condition_inputs {
        rps.filter
    } else {
        union
    };
    let pp = psi.production();
    let height = 1 + uh.max(net.height(pp));
    let variant = classify_anchor(&q.pattern.identity(), &whole, &net.nodes[pp].query);
    let join = net.add(
        MsKind::SemiJoin {
            anchor: q.pattern.identity(),
            variant,
        },
        whole,
        vec![left, pp],
        height,
        side,
    );
    Ok(DeltaNet {
        base,
        filter,
        sat,
        other_sat,
        translate,
        union,
        psi,
        rps,
        join,
    })
}

/// `localize^Δ` over the source graph of a modification.
pub fn localize_delta(
    q: &ExtendedQuery,
    opts: LocalizeOptions,
) -> Result<DeltaLocalizedNet, ReteError> {
    let mut net = MsNet::new();
    let root = localize_delta_into(&mut net, q, Side::Source, opts)?;
    net.production = root.production();
    Ok(DeltaLocalizedNet { net, root })
}

pub fn order_delta(d: &DeltaLocalizedNet) -> Vec<NodeId> {
    d.root.order()
}

/// Both `localize^Δ` nets with the translations and anti-joins that compare them.
#[derive(Debug, Clone)]
pub struct DiffNet {
    pub net: MsNet,
    pub delta: DeltaNet,
    pub delta_prime: DeltaNet,
    pub translate_removed: NodeId,
    pub removed: NodeId,
    pub translate_added: NodeId,
    pub added: NodeId,
}

impl DiffNet {
    pub fn build(q: &ExtendedQuery, opts: LocalizeOptions) -> Result<Self, ReteError> {
        let mut net = MsNet::new();
        let whole = QueryPart::whole(&q.pattern);
        let delta = localize_delta_into(&mut net, q, Side::Source, opts)?;
        let delta_prime = localize_delta_into(&mut net, q, Side::Target, opts)?;
        let (p, pp) = (delta.production(), delta_prime.production());
        let id = q.pattern.identity();
        let anti = |net: &mut MsNet, l: NodeId, r: NodeId, side| {
            let height = 1 + net.height(l).max(net.height(r));
            net.add(
                MsKind::AntiJoin { anchor: id.clone() },
                whole.clone(),
                vec![l, r],
                height,
                side,
            )
        };
        let translate_removed = net.add(
            MsKind::Translate(Direction::ToSource),
            whole.clone(),
            vec![pp],
            net.height(pp),
            Side::Source,
        );
        let removed = anti(&mut net, p, translate_removed, Side::Source);
        let translate_added = net.add(
            MsKind::Translate(Direction::ToTarget),
            whole.clone(),
            vec![p],
            net.height(p),
            Side::Target,
        );
        let added = anti(&mut net, pp, translate_added, Side::Target);
        net.production = removed;
        Ok(DiffNet {
            net,
            delta,
            delta_prime,
            translate_removed,
            removed,
            translate_added,
            added,
        })
    }

    pub fn order(&self) -> Vec<NodeId> {
        let mut out = self.delta.order();
        out.extend(self.delta_prime.order());
        out.extend([
            self.translate_removed,
            self.removed,
            self.translate_added,
            self.added,
        ]);
        out
    }

    pub fn execute(&self, env: &ExecEnv) -> Result<(MsConfiguration, ResultDelta), ReteError> {
        let c = execute_order(
            &self.net,
            env,
            &self.order(),
            MsConfiguration::empty(&self.net),
        )?;
        let delta = ResultDelta {
            removed: stripped_result_set(&c, self.removed),
            added: stripped_result_set(&c, self.added),
        };
        Ok((c, delta))
    }
}

/// Removed and added results of `q` under a subgraph-restricted modification.
pub fn compute_result_delta(
    q: &ExtendedQuery,
    modification: &GraphModification,
    relevant_source: &RelevantSubgraph,
    relevant_target: &RelevantSubgraph,
) -> Result<ResultDelta, DeltaError> {
    compute_result_delta_with(
        q,
        modification,
        relevant_source,
        relevant_target,
        LocalizeOptions::default(),
    )
}

pub fn compute_result_delta_with(
    q: &ExtendedQuery,
    modification: &GraphModification,
    relevant_source: &RelevantSubgraph,
    relevant_target: &RelevantSubgraph,
    opts: LocalizeOptions,
) -> Result<ResultDelta, DeltaError> {
    if !validate_subgraph_restricted(modification, relevant_source, relevant_target) {
        return Err(DeltaError::PreconditionViolation);
    }
    let diff = DiffNet::build(q, opts)?;
    let env = ExecEnv::two_sided(modification, relevant_source, relevant_target);
    Ok(diff.execute(&env)?.1)
}
