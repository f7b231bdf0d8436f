//! Cross-checks of localized nets against the brute-force oracle on one instance.

use std::collections::BTreeSet;
use std::fmt;

use crate::delta::{compute_result_delta_with, compute_sat_dependent, DeltaError};
use crate::exec::{execute_order, stripped_result_set, ExecEnv, MsConfiguration};
use crate::graph::{RelevantSubgraph, TypedGraph};
use crate::modification::{translate_match, Direction, GraphModification};
use crate::morphism::Match;
use crate::msnet::{localize, localize_psi, LocalizeOptions};
use crate::oracle::{self, touches};
use crate::query::ExtendedQuery;
use crate::rete::{build_join_tree, ReteError};

/// Which property a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Completeness,
    InfinityCharacterization,
    Correctness,
    Soundness,
    DeltaExactness,
    SatGuard,
    Execution,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::Completeness => "completeness",
            Check::InfinityCharacterization => "infinity-characterization",
            Check::Correctness => "correctness",
            Check::Soundness => "soundness",
            Check::DeltaExactness => "delta-exactness",
            Check::SatGuard => "sat-guard",
            Check::Execution => "execution",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub check: Check,
    pub detail: String,
}

impl Violation {
    fn new(check: Check, detail: impl Into<String>) -> Self {
        Violation {
            check,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

/// Completeness, ∞-characterization and soundness of the localized pattern net, plus
/// correctness and soundness of the localized net for the whole extended query.
pub fn check_localized(
    q: &ExtendedQuery,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
    opts: LocalizeOptions,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Err(e) = check_plain(q, host, hp, &mut out) {
        out.push(Violation::new(Check::Execution, e.to_string()));
    }
    if let Err(e) = check_psi(q, host, hp, opts, &mut out) {
        out.push(Violation::new(Check::Execution, e.to_string()));
    }
    out
}

fn check_plain(
    q: &ExtendedQuery,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
    out: &mut Vec<Violation>,
) -> Result<(), ReteError> {
    let l = localize(&build_join_tree(&q.pattern)?)?;
    let env = ExecEnv::single(host, hp);
    let c = execute_order(&l.net, &env, &l.order(), MsConfiguration::empty(&l.net))?;
    let p = l.net.production;
    let stripped = stripped_result_set(&c, p);
    for (_, m) in oracle::check_completeness(&stripped, &q.pattern, host, hp).violations {
        out.push(Violation::new(
            Check::Completeness,
            format!("{m:?} missing"),
        ));
    }
    for (_, m) in oracle::check_soundness(&stripped, &q.pattern, host).violations {
        out.push(Violation::new(
            Check::Soundness,
            format!("{m:?} is not a match"),
        ));
    }
    for (m, phi) in &c.sets[p] {
        if phi.is_inf() != touches(m, hp) {
            out.push(Violation::new(
                Check::InfinityCharacterization,
                format!("({m:?}, {phi})"),
            ));
        }
    }
    Ok(())
}

fn check_psi(
    q: &ExtendedQuery,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
    opts: LocalizeOptions,
    out: &mut Vec<Violation>,
) -> Result<(), ReteError> {
    let stripped = psi_results(q, host, hp, opts)?;
    for (what, m) in oracle::check_correctness(&stripped, q, host, hp).violations {
        out.push(Violation::new(Check::Correctness, format!("{what}: {m:?}")));
    }
    for (_, m) in oracle::check_soundness(&stripped, &q.pattern, host).violations {
        out.push(Violation::new(
            Check::Soundness,
            format!("{m:?} is not a match"),
        ));
    }
    Ok(())
}

/// Stripped production of the localized net for an extended query.
pub fn psi_results(
    q: &ExtendedQuery,
    host: &TypedGraph,
    hp: &RelevantSubgraph,
    opts: LocalizeOptions,
) -> Result<BTreeSet<Match>, ReteError> {
    let l = localize_psi(q, opts)?;
    let env = ExecEnv::single(host, hp);
    let c = execute_order(&l.net, &env, &l.order(), MsConfiguration::empty(&l.net))?;
    Ok(stripped_result_set(&c, l.net.production))
}

/// Delta exactness against the recompute-and-diff oracle, and the guard that matches whose
/// satisfaction flips are satisfaction-dependent on the respective side.
pub fn check_delta(
    q: &ExtendedQuery,
    m: &GraphModification,
    hp: &RelevantSubgraph,
    hp2: &RelevantSubgraph,
    opts: LocalizeOptions,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let expected = oracle::oracle_delta(q, m);
    match compute_result_delta_with(q, m, hp, hp2, opts) {
        Ok(got) => {
            for x in expected.removed.difference(&got.removed) {
                out.push(Violation::new(
                    Check::DeltaExactness,
                    format!("removal of {x:?} missed"),
                ));
            }
            for x in got.removed.difference(&expected.removed) {
                out.push(Violation::new(
                    Check::DeltaExactness,
                    format!("spurious removal of {x:?}"),
                ));
            }
            for x in expected.added.difference(&got.added) {
                out.push(Violation::new(
                    Check::DeltaExactness,
                    format!("addition of {x:?} missed"),
                ));
            }
            for x in got.added.difference(&expected.added) {
                out.push(Violation::new(
                    Check::DeltaExactness,
                    format!("spurious addition of {x:?}"),
                ));
            }
        }
        Err(DeltaError::PreconditionViolation) => {
            out.push(Violation::new(
                Check::DeltaExactness,
                "modification is not subgraph-restricted",
            ));
        }
        Err(DeltaError::Rete(e)) => out.push(Violation::new(Check::Execution, e.to_string())),
    }
    out.extend(check_sat_guard(q, m, hp, hp2));
    out
}

/// A pattern match present on both sides whose satisfaction differs must be
/// satisfaction-dependent in the source or in the target host, and the sat nets must
/// report every dependent match.
pub fn check_sat_guard(
    q: &ExtendedQuery,
    m: &GraphModification,
    hp: &RelevantSubgraph,
    hp2: &RelevantSubgraph,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let before = oracle::satisfying_matches(q, m.source());
    let after = oracle::satisfying_matches(q, m.target());
    let dep_src = oracle::satisfaction_dependent_matches(q, m.source(), hp);
    let dep_tgt = oracle::satisfaction_dependent_matches(q, m.target(), hp2);
    let (net_src, net_tgt) = match (
        compute_sat_dependent(q, m.source(), hp),
        compute_sat_dependent(q, m.target(), hp2),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return vec![Violation::new(Check::Execution, e.to_string())],
    };
    for x in &dep_src {
        if !net_src.contains(x) {
            out.push(Violation::new(
                Check::SatGuard,
                format!("sat net misses dependent source match {x:?}"),
            ));
        }
    }
    for x in &dep_tgt {
        if !net_tgt.contains(x) {
            out.push(Violation::new(
                Check::SatGuard,
                format!("sat net misses dependent target match {x:?}"),
            ));
        }
    }
    for x in oracle::enumerate_matches(&q.pattern, m.source()) {
        let Some(y) = translate_match(&x, m, Direction::ToTarget) else {
            continue;
        };
        if before.contains(&x) != after.contains(&y)
            && !(dep_src.contains(&x) || dep_tgt.contains(&y))
        {
            out.push(Violation::new(
                Check::SatGuard,
                format!("satisfaction of {x:?} flips without dependence"),
            ));
        }
    }
    out
}
