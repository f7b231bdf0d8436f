//! `locrete`: run, benchmark, diff, validate and inspect localized RETE nets.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use locrete::bench::{self, BenchScenario};
use locrete::delta::{compute_result_delta_with, localize_sat, DeltaError, DiffNet};
use locrete::dot::{ms_to_dot, standard_to_dot};
use locrete::exec::{execute_order, ExecEnv, MsConfiguration};
use locrete::graph::TypedGraph;
use locrete::incremental::IncrementalEngine;
use locrete::io::{self, IoError};
use locrete::modification::{modification_from_changes, HostState};
use locrete::msnet::localize_psi;
use locrete::rete::{self, build_extended_net};
use locrete::verify::check_localized;
use locrete::{ExtendedQuery, LocalizeOptions};

const EXIT_VALIDATION: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "locrete",
    version,
    about = "Localized incremental graph queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RunEngine {
    Standard,
    Localized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NetKind {
    Standard,
    Localized,
    Sat,
    Delta,
}

#[derive(Debug, clap::Args)]
struct Localization {
    /// Use the condition inputs without the marking filter (unsound for negations).
    #[arg(long)]
    unguarded: bool,
    /// Replace the vertex inputs of condition subnets by empty nodes.
    #[arg(long)]
    prune: bool,
}

impl Localization {
    fn options(&self) -> LocalizeOptions {
        let base = if self.unguarded {
            LocalizeOptions::unguarded()
        } else {
            LocalizeOptions::default()
        };
        LocalizeOptions {
            prune_condition_inputs: self.prune,
            ..base
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Execute a query and print its results as JSON.
    Run {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value = "localized")]
        engine: RunEngine,
        /// Comma-separated element ids; replaces the relevant subgraph of the graph file.
        #[arg(long, value_delimiter = ',')]
        relevant: Option<Vec<String>>,
        /// Changeset applied incrementally after the initial run.
        #[arg(long)]
        changes: Option<PathBuf>,
        /// Write one JSON record per executed node to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        localization: Localization,
    },
    /// Run a benchmark scenario and print a CSV report.
    Bench {
        #[arg(long)]
        scenario: PathBuf,
        /// Package counts; replaces those of the scenario file.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the result changes a changeset causes, as JSON.
    Diff {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        changes: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_delimiter = ',')]
        relevant: Option<Vec<String>>,
        #[command(flatten)]
        localization: Localization,
    },
    /// Check input files and, for small hosts, the localized results against the oracle.
    Validate {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long)]
        changes: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        relevant: Option<Vec<String>>,
    },
    /// Print a net as Graphviz DOT.
    DumpNet {
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value = "localized")]
        engine: NetKind,
        /// Host graph whose configuration is printed with the net.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        relevant: Option<Vec<String>>,
        /// Tuples shown per node.
        #[arg(long, default_value_t = 20)]
        limit: usize,
        #[command(flatten)]
        localization: Localization,
    },
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Invalid(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(
    locrete::rete::ReteError,
    DeltaError,
    locrete::graph::GraphError,
    bench::BenchError,
    serde_json::Error
);

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Run {
            graph,
            query,
            engine,
            relevant,
            changes,
            trace,
            localization,
        } => run(
            &graph,
            &query,
            engine,
            relevant,
            changes.as_deref(),
            trace.as_deref(),
            localization.options(),
        ),
        Command::Bench {
            scenario,
            sizes,
            repetitions,
            out,
        } => bench_cmd(&scenario, sizes, repetitions, out.as_deref()),
        Command::Diff {
            graph,
            changes,
            query,
            relevant,
            localization,
        } => diff(&graph, &changes, &query, relevant, localization.options()),
        Command::Validate {
            graph,
            query,
            changes,
            relevant,
        } => validate(
            graph.as_deref(),
            query.as_deref(),
            changes.as_deref(),
            relevant,
        ),
        Command::DumpNet {
            query,
            engine,
            graph,
            relevant,
            limit,
            localization,
        } => dump_net(
            &query,
            engine,
            graph.as_deref(),
            relevant,
            limit,
            localization.options(),
        ),
    }
}

fn load_host(path: &Path, relevant: Option<Vec<String>>) -> Result<HostState, Failure> {
    let (g, hp) = io::parse_graph(&io::read_file(path)?)?;
    let hp = match relevant {
        Some(ids) => io::relevant_from_ids(&g, ids)?,
        None => hp,
    };
    Ok(HostState::new(g, hp)?)
}

fn load_query(path: &Path, host: Option<&TypedGraph>) -> Result<ExtendedQuery, Failure> {
    Ok(io::parse_query(
        &io::read_file(path)?,
        host.map(|g| g.types().clone()),
    )?)
}

fn print(text: &str) -> CliResult {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))
}

fn run(
    graph: &Path,
    query: &Path,
    engine: RunEngine,
    relevant: Option<Vec<String>>,
    changes: Option<&Path>,
    trace: Option<&Path>,
    opts: LocalizeOptions,
) -> CliResult {
    let host = load_host(graph, relevant)?;
    let q = load_query(query, Some(&host.graph))?;
    let changes = match changes {
        Some(p) => io::parse_changes(&io::read_file(p)?)?,
        None => Vec::new(),
    };
    let mut e = match engine {
        RunEngine::Standard => {
            IncrementalEngine::load_standard(&build_extended_net(&q)?, host, trace.is_some())
        }
        RunEngine::Localized => {
            let l = localize_psi(&q, opts)?;
            IncrementalEngine::load_localized(&l.net, &l.order(), host, trace.is_some())?
        }
    };
    if !changes.is_empty() {
        e.apply(&changes)?;
    }
    if let Some(path) = trace {
        let mut text = String::new();
        for r in e.take_trace() {
            text.push_str(&serde_json::to_string(&r)?);
            text.push('\n');
        }
        io::write_file(path, &text)?;
    }
    print(&io::matches_to_json(e.production().keys()))
}

fn bench_cmd(
    scenario: &Path,
    sizes: Option<Vec<usize>>,
    repetitions: Option<usize>,
    out: Option<&Path>,
) -> CliResult {
    let mut s: BenchScenario = serde_json::from_str(&io::read_file(scenario)?)?;
    if let Some(sizes) = sizes {
        s.package_counts = sizes;
    }
    if let Some(r) = repetitions {
        s.repetitions = r;
    }
    let csv = bench::to_csv(&bench::run_scenario(&s)?)?;
    match out {
        Some(p) => Ok(io::write_file(p, &csv)?),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn diff(
    graph: &Path,
    changes: &Path,
    query: &Path,
    relevant: Option<Vec<String>>,
    opts: LocalizeOptions,
) -> CliResult {
    let host = load_host(graph, relevant)?;
    let q = load_query(query, Some(&host.graph))?;
    let cs = io::parse_changes(&io::read_file(changes)?)?;
    let (m, hp2) = modification_from_changes(&host, &cs)?;
    let delta = compute_result_delta_with(&q, &m, &host.relevant, &hp2, opts)?;
    print(&serde_json::to_string_pretty(&delta)?)
}

fn validate(
    graph: Option<&Path>,
    query: Option<&Path>,
    changes: Option<&Path>,
    relevant: Option<Vec<String>>,
) -> CliResult {
    if graph.is_none() && query.is_none() && changes.is_none() {
        return Err(Failure::Invalid(
            "nothing to validate: pass --graph, --query or --changes".into(),
        ));
    }
    let mut problems: Vec<String> = Vec::new();
    let host = match graph {
        Some(p) => match load_host(p, relevant) {
            Ok(h) => {
                println!(
                    "graph: {} vertices, {} edges, {} relevant elements, ok",
                    h.graph.vertex_count(),
                    h.graph.edge_count(),
                    h.relevant.vertices.len() + h.relevant.edges.len()
                );
                Some(h)
            }
            Err(Failure::Io(m)) => return Err(Failure::Io(m)),
            Err(Failure::Invalid(m)) => {
                problems.push(format!("graph: {m}"));
                None
            }
        },
        None => None,
    };
    let q = match query {
        Some(p) => match load_query(p, host.as_ref().map(|h| &h.graph)) {
            Ok(q) => {
                println!(
                    "query: {} vertices, {} edges, condition depth {}, ok",
                    q.pattern.vertex_count(),
                    q.pattern.edge_count(),
                    q.condition.depth()
                );
                Some(q)
            }
            Err(Failure::Io(m)) => return Err(Failure::Io(m)),
            Err(Failure::Invalid(m)) => {
                problems.push(format!("query: {m}"));
                None
            }
        },
        None => None,
    };
    if let Some(p) = changes {
        let cs = io::parse_changes(&io::read_file(p)?);
        match (cs, &host) {
            (Err(e), _) => problems.push(format!("changes: {e}")),
            (Ok(cs), Some(h)) => match modification_from_changes(h, &cs) {
                Ok(_) => println!("changes: {} changes, applicable", cs.len()),
                Err(e) => problems.push(format!("changes: {e}")),
            },
            (Ok(cs), None) => println!("changes: {} changes, well-formed", cs.len()),
        }
    }
    if let (Some(h), Some(q)) = (&host, &q) {
        if h.graph.vertex_count() <= bench::ORACLE_VERTEX_LIMIT {
            let v = check_localized(q, &h.graph, &h.relevant, LocalizeOptions::default());
            if v.is_empty() {
                println!("oracle: localized results agree");
            }
            problems.extend(v.iter().map(|v| format!("oracle: {v}")));
        } else {
            println!(
                "oracle: skipped, host exceeds {} vertices",
                bench::ORACLE_VERTEX_LIMIT
            );
        }
    }
    if problems.is_empty() {
        return Ok(());
    }
    for p in &problems {
        println!("{p}");
    }
    Err(Failure::Invalid(format!("{} problem(s)", problems.len())))
}

fn dump_net(
    query: &Path,
    kind: NetKind,
    graph: Option<&Path>,
    relevant: Option<Vec<String>>,
    limit: usize,
    opts: LocalizeOptions,
) -> CliResult {
    let host = graph.map(|g| load_host(g, relevant)).transpose()?;
    let q = load_query(query, host.as_ref().map(|h| &h.graph))?;
    let dot = match kind {
        NetKind::Standard => {
            let net = build_extended_net(&q)?;
            let c = host
                .as_ref()
                .map(|h| rete::execute(&net, &h.graph))
                .transpose()?;
            standard_to_dot(&net, c.as_ref(), limit)
        }
        NetKind::Localized | NetKind::Sat => {
            let (net, order) = if kind == NetKind::Sat {
                let s = localize_sat(&q)?;
                let o = s.order();
                (s.net, o)
            } else {
                let l = localize_psi(&q, opts)?;
                let o = l.order();
                (l.net, o)
            };
            let c = match &host {
                Some(h) => Some(execute_order(
                    &net,
                    &ExecEnv::single(&h.graph, &h.relevant),
                    &order,
                    MsConfiguration::empty(&net),
                )?),
                None => None,
            };
            ms_to_dot(&net, c.as_ref(), limit)
        }
        NetKind::Delta => {
            if host.is_some() {
                return Err(Failure::Invalid(
                    "markings of the diff net need a modification; use `diff`".into(),
                ));
            }
            ms_to_dot(&DiffNet::build(&q, opts)?.net, None, limit)
        }
    };
    print(dot.trim_end())
}
