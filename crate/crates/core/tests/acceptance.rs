//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use locrete::bench::{self, BenchScenario, Checks, Engine, RunReport};
use locrete::exec::{execute_order, ExecEnv, MsConfiguration};
use locrete::gen::{self, GenConfig};
use locrete::incremental::IncrementalEngine;
use locrete::modification::{modification_from_changes, HostState};
use locrete::msnet::{localize, localize_psi, LocalizeOptions};
use locrete::query::Condition;
use locrete::rete::{self, build_extended_net, build_join_tree};
use locrete::verify::{check_delta, check_localized};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, Box<dyn FnOnce() -> Outcome>);

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let r = f();
    let took = start.elapsed();
    let r = match r {
        Ok(s) if took > limit => Err(format!("{s}; took {took:.2?}, limit {limit:.0?}")),
        other => other,
    };
    (r, took)
}

fn golden(f: fn() -> Result<(), String>) -> Outcome {
    f().map(|()| "configuration as expected".into())
}

fn oracle_suite() -> Outcome {
    let cfg = GenConfig {
        min_vertices: 6,
        max_vertices: 60,
        ..GenConfig::default()
    };
    let mut violations = Vec::new();
    let (mut dominated, mut conditions) = (0, 0);
    for seed in 0..500 {
        let inst = gen::random_instance(seed, &cfg);
        dominated += inst.host.is_edge_dominated() as usize;
        conditions += (inst.query.condition != Condition::True) as usize;
        for v in check_localized(
            &inst.query,
            &inst.host,
            &inst.relevant,
            LocalizeOptions::default(),
        ) {
            violations.push(format!("seed {seed}: {v}"));
        }
    }
    summarize(
        violations,
        format!("500 instances, {dominated} edge-dominated, {conditions} with conditions"),
    )
}

fn summarize(violations: Vec<String>, ok: String) -> Outcome {
    match violations.first() {
        None => Ok(format!("{ok}, 0 violations")),
        Some(first) => Err(format!("{} violations, first: {first}", violations.len())),
    }
}

fn incremental_suite() -> Outcome {
    let cfg = GenConfig {
        max_vertices: 20,
        relevant_fraction: 0.25,
        ..GenConfig::default()
    };
    let mut violations = Vec::new();
    let mut changes_total = 0;
    for seed in 0..200u64 {
        let inst = gen::random_instance(seed, &cfg);
        let mut rng = gen::rng(seed ^ 0xc4a9);
        let state = HostState::new(inst.host, inst.relevant)
            .expect("generated relevant subgraph is closed");
        let changes = gen::random_changes(&mut rng, &state, 20, "n");
        changes_total += changes.len();
        let l = localize_psi(&inst.query, LocalizeOptions::default()).map_err(|e| e.to_string())?;
        let order = l.order();
        let std = build_extended_net(&inst.query).map_err(|e| e.to_string())?;
        let mut loc = IncrementalEngine::for_localized(&l.net, &order, state.clone())
            .map_err(|e| e.to_string())?;
        let mut sta = IncrementalEngine::for_standard(&std, state).map_err(|e| e.to_string())?;
        // Apply the sequence in chunks of varying size.
        let mut rest = &changes[..];
        while !rest.is_empty() {
            let k = 1 + (rest.len() + seed as usize) % 4;
            let (now, later) = rest.split_at(k.min(rest.len()));
            loc.apply(now).map_err(|e| format!("seed {seed}: {e}"))?;
            sta.apply(now).map_err(|e| format!("seed {seed}: {e}"))?;
            rest = later;
        }
        let host = loc.host().clone();
        let env = ExecEnv::single(&host.graph, &host.relevant);
        let batch = execute_order(&l.net, &env, &order, MsConfiguration::empty(&l.net))
            .map_err(|e| e.to_string())?;
        let got = loc.configuration();
        for n in 0..l.net.nodes.len() {
            if got.sets[n] != batch.sets[n] {
                violations.push(format!("seed {seed}: localized node {n} differs"));
            }
        }
        let sbatch = rete::execute(&std, &host.graph).map_err(|e| e.to_string())?;
        let sgot = sta.standard_configuration();
        for n in 0..std.nodes.len() {
            if sgot.sets[n] != sbatch.sets[n] {
                violations.push(format!("seed {seed}: standard node {n} differs"));
            }
        }
    }
    summarize(
        violations,
        format!("200 sequences, {changes_total} changes"),
    )
}

fn delta_suite() -> Outcome {
    let cfg = GenConfig {
        max_vertices: 20,
        min_density: 0.8,
        relevant_fraction: 0.35,
        ..GenConfig::default()
    };
    let mut violations = Vec::new();
    let (mut seed, mut done, mut nonempty) = (0u64, 0, 0);
    while done < 200 {
        seed += 1;
        let inst = gen::random_instance(seed, &cfg);
        if inst.query.condition == Condition::True {
            continue;
        }
        let state = HostState::new(inst.host, inst.relevant)
            .expect("generated relevant subgraph is closed");
        let mut rng = gen::rng(seed ^ 0xde17a);
        let changes = gen::random_restricted_changes(&mut rng, &state, 6, "d");
        let (m, hp2) = modification_from_changes(&state, &changes).map_err(|e| e.to_string())?;
        let expected = locrete::oracle::oracle_delta(&inst.query, &m);
        nonempty += (!expected.removed.is_empty() || !expected.added.is_empty()) as usize;
        for v in check_delta(
            &inst.query,
            &m,
            &state.relevant,
            &hp2,
            LocalizeOptions::default(),
        ) {
            violations.push(format!("seed {seed}: {v}"));
        }
        done += 1;
    }
    summarize(
        violations,
        format!("200 modifications, {nonempty} with result changes"),
    )
}

fn size_suite() -> Outcome {
    let cfg = GenConfig {
        edge_dominated: Some(true),
        max_vertices: 40,
        relevant_fraction: 0.2,
        ..GenConfig::default()
    };
    let mut violations = Vec::new();
    let (mut worst_plain, mut worst_psi) = (0.0f64, 0.0f64);
    let mut checked = 0;
    for seed in 0..150u64 {
        let inst = gen::random_instance(seed, &cfg);
        if !inst.host.is_edge_dominated() {
            continue;
        }
        checked += 1;
        let env = ExecEnv::single(&inst.host, &inst.relevant);
        let std = build_join_tree(&inst.query.pattern).map_err(|e| e.to_string())?;
        let std_size = rete::execute(&std, &inst.host)
            .map_err(|e| e.to_string())?
            .effective_size(&std);
        let l = localize(&std).map_err(|e| e.to_string())?;
        let lc = execute_order(&l.net, &env, &l.order(), MsConfiguration::empty(&l.net))
            .map_err(|e| e.to_string())?;
        let plain = lc.effective_size(&l.net);
        let ext = build_extended_net(&inst.query).map_err(|e| e.to_string())?;
        let ext_size = rete::execute(&ext, &inst.host)
            .map_err(|e| e.to_string())?
            .effective_size(&ext);
        let p = localize_psi(&inst.query, LocalizeOptions::default()).map_err(|e| e.to_string())?;
        let pc = execute_order(&p.net, &env, &p.order(), MsConfiguration::empty(&p.net))
            .map_err(|e| e.to_string())?;
        let psi = pc.effective_size(&p.net);
        if plain > 7 * std_size {
            violations.push(format!("seed {seed}: plain {plain} > 7 x {std_size}"));
        }
        if psi > 7 * ext_size {
            violations.push(format!("seed {seed}: conditional {psi} > 7 x {ext_size}"));
        }
        if std_size > 0 {
            worst_plain = worst_plain.max(plain as f64 / std_size as f64);
        }
        if ext_size > 0 {
            worst_psi = worst_psi.max(psi as f64 / ext_size as f64);
        }
    }
    if checked < 100 {
        return Err(format!("only {checked} edge-dominated instances"));
    }
    summarize(
        violations,
        format!(
            "{checked} instances, worst ratio {worst_plain:.2} plain, {worst_psi:.2} conditional"
        ),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn scaling_suite() -> Outcome {
    let mut s = BenchScenario::synthetic("acceptance");
    s.updates = 3;
    s.repetitions = 3;
    s.engines = vec![Engine::Standard, Engine::Localized];
    let sizes = s.package_counts.clone();
    let mut rows: Vec<Vec<RunReport>> = Vec::new();
    for &n in &sizes {
        rows.push(bench::run_size(&s, n).map_err(|e| e.to_string())?);
    }
    let pick = |i: usize, engine: Engine, phase: &str| -> Vec<&RunReport> {
        rows[i]
            .iter()
            .filter(|r| r.engine == engine && r.phase == phase)
            .collect()
    };
    let mut problems = Vec::new();
    for r in rows.iter().flatten() {
        if r.checks_passed == Checks::Failed {
            problems.push(format!(
                "{} {} at size {} failed its check",
                r.engine.as_str(),
                r.phase,
                r.size
            ));
        }
    }
    let tuples = |i, e| pick(i, e, "initial")[0].tuples;
    let time = |i, e| median(pick(i, e, "initial").iter().map(|r| r.time_ms).collect());
    let last = sizes.len() - 1;
    let loc_tuples: Vec<usize> = (0..sizes.len())
        .map(|i| tuples(i, Engine::Localized))
        .collect();
    if loc_tuples.iter().any(|&t| t != loc_tuples[0]) {
        problems.push(format!("localized tuples {loc_tuples:?}"));
    }
    let std_tuples: Vec<usize> = (0..sizes.len())
        .map(|i| tuples(i, Engine::Standard))
        .collect();
    for i in 1..sizes.len() {
        let need = std_tuples[0] as f64 * sizes[i] as f64 / sizes[0] as f64;
        if (std_tuples[i] as f64) < need {
            problems.push(format!(
                "standard tuples {std_tuples:?} grow slower than linearly"
            ));
        }
    }
    let loc_times: Vec<f64> = (0..sizes.len())
        .map(|i| time(i, Engine::Localized))
        .collect();
    let lo = loc_times.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = loc_times.iter().cloned().fold(0.0, f64::max);
    if hi >= 2.0 * lo {
        problems.push(format!(
            "localized initial times {loc_times:.2?} ms vary by {:.2}x",
            hi / lo
        ));
    }
    let std_ratio = time(last, Engine::Standard) / time(0, Engine::Standard);
    if std_ratio <= 10.0 {
        problems.push(format!("standard initial time grows only {std_ratio:.1}x"));
    }
    let ok = format!(
        "localized tuples {}, standard tuples {std_tuples:?}, localized time spread {:.2}x, standard time growth {std_ratio:.0}x",
        loc_tuples[0],
        hi / lo
    );
    match problems.first() {
        None => Ok(ok),
        Some(p) => Err(format!("{p} ({ok})")),
    }
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            "1 plain worked example",
            Duration::from_secs(1),
            Box::new(|| golden(common::plain_golden)),
        ),
        (
            "2 condition worked example",
            Duration::from_secs(1),
            Box::new(|| golden(common::condition_golden)),
        ),
        (
            "3 sat worked example",
            Duration::from_secs(1),
            Box::new(|| golden(common::sat_golden)),
        ),
        (
            "4 oracle equivalence",
            Duration::from_secs(300),
            Box::new(oracle_suite),
        ),
        (
            "5 incremental equals batch",
            Duration::MAX,
            Box::new(incremental_suite),
        ),
        ("6 delta exactness", Duration::MAX, Box::new(delta_suite)),
        ("7 size bound", Duration::MAX, Box::new(size_suite)),
        ("8 scaling", Duration::MAX, Box::new(scaling_suite)),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let (r, took) = timed(limit, f);
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{took:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{took:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
