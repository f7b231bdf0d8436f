//! Benchmark scenarios over synthetic models and their CSV reports.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::delta::{DeltaError, DiffNet, ResultDelta};
use crate::exec::{ExecEnv, MsConfiguration};
use crate::graph::GraphError;
use crate::incremental::{ApplyReport, IncrementalEngine};
use crate::modification::{
    modification_from_changes, validate_subgraph_restricted, Change, HostState,
};
use crate::morphism::Match;
use crate::msnet::{localize_psi, LocalizeOptions};
use crate::oracle::{satisfying_matches, touches};
use crate::query::ExtendedQuery;
use crate::rete::{build_extended_net, ReteError};
use crate::synth::{self, SynthError, SynthParams};

/// Hosts up to this many vertices are checked against the oracle.
pub const ORACLE_VERTEX_LIMIT: usize = 60;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Rete(#[from] ReteError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Standard,
    Localized,
    Delta,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Standard, Engine::Localized, Engine::Delta];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Standard => "standard",
            Engine::Localized => "localized",
            Engine::Delta => "delta",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown engine `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryChoice {
    #[default]
    Path,
    NoSelfReference,
}

impl QueryChoice {
    pub fn query(self) -> ExtendedQuery {
        match self {
            QueryChoice::Path => synth::path_query(),
            QueryChoice::NoSelfReference => synth::no_self_reference_query(),
        }
    }
}

fn default_ten() -> usize {
    10
}

fn default_seed() -> u64 {
    1
}

fn default_sizes() -> Vec<usize> {
    vec![1, 10, 100]
}

fn default_repetitions() -> usize {
    3
}

fn default_engines() -> Vec<Engine> {
    Engine::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BenchScenario {
    pub name: String,
    #[serde(default = "default_ten")]
    pub classes_per_package: usize,
    #[serde(default = "default_ten")]
    pub fields_per_class: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_sizes")]
    pub package_counts: Vec<usize>,
    #[serde(default)]
    pub query: QueryChoice,
    /// Changesets applied after the initial run, each adding a class with its fields.
    #[serde(default = "default_ten")]
    pub updates: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_engines")]
    pub engines: Vec<Engine>,
}

impl BenchScenario {
    pub fn synthetic(name: &str) -> Self {
        serde_json::from_str(&format!(
            "{{\"name\":{}}}",
            serde_json::to_string(name).expect("string")
        ))
        .expect("defaults")
    }

    pub fn params(&self, package_count: usize) -> SynthParams {
        SynthParams {
            package_count,
            classes_per_package: self.classes_per_package,
            fields_per_class: self.fields_per_class,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 {
            return Err(BenchError::Invalid("repetitions must be positive".into()));
        }
        if self.package_counts.is_empty() || self.engines.is_empty() {
            return Err(BenchError::Invalid(
                "at least one size and one engine are required".into(),
            ));
        }
        for &n in &self.package_counts {
            self.params(n).validate()?;
        }
        Ok(())
    }
}

/// Outcome of the correctness checks of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checks {
    Passed,
    Failed,
    /// The instance is too large for the oracle.
    Skipped,
}

impl Checks {
    fn of(ok: bool) -> Self {
        if ok {
            Checks::Passed
        } else {
            Checks::Failed
        }
    }

    fn and(self, other: Checks) -> Checks {
        match (self, other) {
            (Checks::Failed, _) | (_, Checks::Failed) => Checks::Failed,
            (Checks::Skipped, x) | (x, Checks::Skipped) => x,
            _ => Checks::Passed,
        }
    }
}

impl Serialize for Checks {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Checks::Passed => "true",
            Checks::Failed => "false",
            Checks::Skipped => "skipped",
        })
    }
}

/// One CSV row: a phase of one engine at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub size: usize,
    pub engine: Engine,
    pub phase: &'static str,
    pub time_ms: f64,
    pub tuples: usize,
    pub effective_size: usize,
    pub checks_passed: Checks,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let m = if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    };
    (m * 1000.0).round() / 1000.0
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// Everything one size of a scenario needs.
struct Prepared {
    query: ExtendedQuery,
    state: HostState,
    script: Vec<Vec<Change>>,
    /// Satisfying matches before and after each update, from the standard engine.
    reference: Vec<BTreeSet<Match>>,
    /// Global result change of each update, from the standard engine.
    reference_deltas: Vec<ApplyReport>,
}

fn prepare(s: &BenchScenario, size: usize) -> Result<Prepared, BenchError> {
    let params = s.params(size);
    let (graph, relevant) = synth::generate(&params)?;
    let state = HostState::new(graph, relevant)?;
    let query = s.query.query();
    let script = synth::update_script(&params, s.updates);
    let mut engine = IncrementalEngine::for_standard(&build_extended_net(&query)?, state.clone())?;
    let mut reference = vec![engine.production().keys().cloned().collect()];
    let mut reference_deltas = Vec::new();
    for cs in &script {
        reference_deltas.push(engine.apply(cs)?);
        reference.push(engine.production().keys().cloned().collect());
    }
    Ok(Prepared {
        query,
        state,
        script,
        reference,
        reference_deltas,
    })
}

/// Localized results must contain the satisfying matches touching the relevant subgraph
/// and nothing that does not satisfy the query.
fn localized_ok(got: &BTreeSet<Match>, reference: &BTreeSet<Match>, state: &HostState) -> bool {
    got.is_subset(reference)
        && reference
            .iter()
            .filter(|m| touches(m, &state.relevant))
            .all(|m| got.contains(m))
}

fn oracle_check(p: &Prepared, state: &HostState, got: &BTreeSet<Match>) -> Checks {
    if state.graph.vertex_count() > ORACLE_VERTEX_LIMIT {
        return Checks::Skipped;
    }
    Checks::of(satisfying_matches(&p.query, &state.graph) == *got)
}

fn run_standard(
    s: &BenchScenario,
    size: usize,
    p: &Prepared,
) -> Result<Vec<RunReport>, BenchError> {
    let net = build_extended_net(&p.query)?;
    let (mut t_init, mut t_upd) = (Vec::new(), Vec::new());
    let mut rows = Vec::new();
    for rep in 0..s.repetitions {
        let host = p.state.clone();
        let t = Instant::now();
        let mut engine = IncrementalEngine::for_standard(&net, host)?;
        t_init.push(millis(t));
        let initial = (
            engine.tuples(),
            engine.effective_size(),
            engine.production().keys().cloned().collect::<BTreeSet<_>>(),
        );
        let t = Instant::now();
        for cs in &p.script {
            engine.apply(cs)?;
        }
        t_upd.push(millis(t) / p.script.len().max(1) as f64);
        if rep == 0 {
            let got: BTreeSet<Match> = engine.production().keys().cloned().collect();
            let init_checks =
                oracle_check(p, &p.state, &initial.2).and(Checks::of(initial.2 == p.reference[0]));
            let upd_checks = oracle_check(p, engine.host(), &got)
                .and(Checks::of(Some(&got) == p.reference.last()));
            rows.push((initial.0, initial.1, init_checks));
            rows.push((engine.tuples(), engine.effective_size(), upd_checks));
        }
    }
    Ok(reports(
        s,
        size,
        Engine::Standard,
        rows,
        [median(t_init), median(t_upd)],
    ))
}

fn run_localized(
    s: &BenchScenario,
    size: usize,
    p: &Prepared,
) -> Result<Vec<RunReport>, BenchError> {
    let (mut t_init, mut t_upd) = (Vec::new(), Vec::new());
    let mut rows = Vec::new();
    for rep in 0..s.repetitions {
        let host = p.state.clone();
        let t = Instant::now();
        let l = localize_psi(&p.query, LocalizeOptions::default())?;
        let mut engine = IncrementalEngine::for_localized(&l.net, &l.order(), host)?;
        t_init.push(millis(t));
        let initial = (
            engine.tuples(),
            engine.effective_size(),
            engine.production().keys().cloned().collect::<BTreeSet<_>>(),
        );
        let mut ok = true;
        let t = Instant::now();
        for (i, cs) in p.script.iter().enumerate() {
            engine.apply(cs)?;
            if rep == 0 {
                let got: BTreeSet<Match> = engine.production().keys().cloned().collect();
                ok &= localized_ok(&got, &p.reference[i + 1], engine.host());
            }
        }
        t_upd.push(millis(t) / p.script.len().max(1) as f64);
        if rep == 0 {
            rows.push((
                initial.0,
                initial.1,
                Checks::of(localized_ok(&initial.2, &p.reference[0], &p.state)),
            ));
            rows.push((engine.tuples(), engine.effective_size(), Checks::of(ok)));
        }
    }
    Ok(reports(
        s,
        size,
        Engine::Localized,
        rows,
        [median(t_init), median(t_upd)],
    ))
}

fn run_delta(s: &BenchScenario, size: usize, p: &Prepared) -> Result<Vec<RunReport>, BenchError> {
    // modifications are built once; timing covers net construction and execution
    let mut mods = Vec::new();
    let mut state = p.state.clone();
    for cs in &p.script {
        let (m, hp2) = modification_from_changes(&state, cs)?;
        if !validate_subgraph_restricted(&m, &state.relevant, &hp2) {
            return Err(DeltaError::PreconditionViolation.into());
        }
        let hp = std::mem::replace(&mut state.relevant, hp2.clone());
        state.apply_all(cs)?;
        mods.push((m, hp, hp2));
    }
    let mut times = Vec::new();
    let mut last = (0, 0);
    let mut ok = true;
    for rep in 0..s.repetitions {
        let mut total = 0.0;
        for (i, (m, hp, hp2)) in mods.iter().enumerate() {
            let t = Instant::now();
            let diff = DiffNet::build(&p.query, LocalizeOptions::default())?;
            let (c, delta): (MsConfiguration, ResultDelta) =
                diff.execute(&ExecEnv::two_sided(m, hp, hp2))?;
            total += millis(t);
            if rep == 0 {
                let r = &p.reference_deltas[i];
                ok &= delta.added == r.added.iter().cloned().collect()
                    && delta.removed == r.removed.iter().cloned().collect();
                last = (c.tuples(), c.effective_size(&diff.net));
            }
        }
        times.push(total / mods.len().max(1) as f64);
    }
    Ok(vec![RunReport {
        scenario: s.name.clone(),
        size,
        engine: Engine::Delta,
        phase: "update",
        time_ms: median(times),
        tuples: last.0,
        effective_size: last.1,
        checks_passed: Checks::of(ok),
    }])
}

fn reports(
    s: &BenchScenario,
    size: usize,
    engine: Engine,
    rows: Vec<(usize, usize, Checks)>,
    times: [f64; 2],
) -> Vec<RunReport> {
    rows.into_iter()
        .zip(["initial", "update"])
        .zip(times)
        .map(
            |(((tuples, effective_size, checks_passed), phase), time_ms)| RunReport {
                scenario: s.name.clone(),
                size,
                engine,
                phase,
                time_ms,
                tuples,
                effective_size,
                checks_passed,
            },
        )
        .collect()
}

/// Runs every engine of the scenario at one size.
pub fn run_size(s: &BenchScenario, size: usize) -> Result<Vec<RunReport>, BenchError> {
    let p = prepare(s, size)?;
    let mut out = Vec::new();
    for &e in &s.engines {
        out.extend(match e {
            Engine::Standard => run_standard(s, size, &p)?,
            Engine::Localized => run_localized(s, size, &p)?,
            Engine::Delta => run_delta(s, size, &p)?,
        });
    }
    Ok(out)
}

pub fn run_scenario(s: &BenchScenario) -> Result<Vec<RunReport>, BenchError> {
    s.validate()?;
    let mut out = Vec::new();
    for &n in &s.package_counts {
        out.extend(run_size(s, n)?);
    }
    Ok(out)
}

pub fn to_csv(rows: &[RunReport]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| BenchError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(query: QueryChoice) -> BenchScenario {
        BenchScenario {
            package_counts: vec![1, 3],
            updates: 2,
            repetitions: 1,
            query,
            ..BenchScenario::synthetic("t")
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let rows = run_scenario(&small(QueryChoice::Path)).unwrap();
        assert_eq!(rows.len(), 2 * 5);
        let csv = to_csv(&rows).unwrap();
        assert!(csv.starts_with(
            "scenario,size,engine,phase,time_ms,tuples,effective_size,checks_passed\n"
        ));
        assert!(
            rows.iter().all(|r| r.checks_passed != Checks::Failed),
            "{csv}"
        );
    }

    #[test]
    fn localized_counts_do_not_depend_on_size() {
        let rows = run_scenario(&small(QueryChoice::NoSelfReference)).unwrap();
        let pick = |size, engine, phase| {
            rows.iter()
                .find(|r| r.size == size && r.engine == engine && r.phase == phase)
                .unwrap()
                .tuples
        };
        assert_eq!(
            pick(1, Engine::Localized, "initial"),
            pick(3, Engine::Localized, "initial")
        );
        assert!(pick(3, Engine::Standard, "initial") > pick(1, Engine::Standard, "initial"));
        assert!(rows.iter().all(|r| r.checks_passed != Checks::Failed));
    }

    #[test]
    fn scenario_defaults_and_unknown_fields() {
        let s: BenchScenario =
            serde_json::from_str(r#"{"name":"x","query":"no-self-reference"}"#).unwrap();
        assert_eq!(s.package_counts, vec![1, 10, 100]);
        assert_eq!(s.engines, Engine::ALL.to_vec());
        assert!(serde_json::from_str::<BenchScenario>(r#"{"name":"x","bogus":1}"#).is_err());
        let bad = BenchScenario {
            package_counts: vec![0],
            ..BenchScenario::synthetic("x")
        };
        assert!(bad.validate().is_err());
    }
}
