//! `dlbound` command-line tool.
//!
//! Exit codes: 0 success, 1 domain error (disconnected graph, infeasible
//! selection, failed property check), 2 usage error or malformed input.

use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dlbound::edgelist;
use dlbound::experiments::{self, EnsembleFamily, ExperimentSpec};
use dlbound::generators::{self, Family, GenSpec};
use dlbound::oracle::{self, RankMethod, RankOptions};
use dlbound::select::{self, SelectError, SelectionMode, SelectionProblem};
use dlbound::{BoundError, BoundReport, DlMatrix, Graph, LeaderSet};
use serde::Serialize;

mod output;

#[derive(Parser, Debug)]
#[command(name = "dlbound", version, about = "Distance-based controllability bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Edge-list file; `-` reads stdin.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    /// 1-based leader ids, e.g. `1,6` (a count for `experiment`).
    #[arg(long, global = true, value_name = "LIST")]
    leaders: Option<String>,
    /// Treat the input as directed regardless of its header.
    #[arg(long, global = true)]
    directed: bool,
    /// JSON output (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output.
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores. Never changes output.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance matrix, or distance-to-leaders vectors with `--leaders`.
    Dist,
    /// delta, mu and upsilon with a PMI witness.
    Bound,
    /// Rank of the controllability matrix.
    Rank(RankArgs),
    /// Zero pattern of powers of -L over sampled weightings.
    #[command(name = "check-lemma1")]
    CheckLemma1(TrialArgs),
    /// rank >= delta over sampled weightings.
    CheckTheorem(TrialArgs),
    /// Smallest leader set with delta >= k.
    SelectLeaders(SelectArgs),
    /// Generate a graph as an edge list.
    Gen(GenArgs),
    /// Random-ensemble comparison of the bounds.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Exact,
    Numerical,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Relative singular-value threshold for numerical rank.
    #[arg(long)]
    tol: Option<f64>,
    /// Replace the weights by a random integer weighting from `--seed`.
    #[arg(long, conflicts_with = "uniform")]
    sample: bool,
    /// Index of the sampled weighting.
    #[arg(long, default_value_t = 0, requires = "sample")]
    trial: u64,
    /// Replace every weight by 1.
    #[arg(long)]
    uniform: bool,
}

#[derive(Args, Debug)]
struct TrialArgs {
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Greedy,
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    #[arg(long)]
    budget: Option<usize>,
    /// Evaluate every set even when upsilon < k.
    #[arg(long)]
    no_prune: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Path,
    Cycle,
    Complete,
    Star,
    Er,
    Ba,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// Edge probability for `er`.
    #[arg(long)]
    p: Option<f64>,
    /// Attachment count for `ba`.
    #[arg(long)]
    m: Option<usize>,
    /// Redraw random families until connected.
    #[arg(long)]
    connected: bool,
    #[arg(long, default_value_t = 1000)]
    max_attempts: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    Er,
    Ba,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    family: EnsembleArg,
    /// Comma-separated grid; defaults to 0.1..0.9 for `er`, 1..10 for `ba`.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Also compute the exact rank for one weighting per trial.
    #[arg(long)]
    with_rank: bool,
    #[arg(long, default_value_t = 1000)]
    max_attempts: usize,
    /// Write the CSV to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error carrying its exit code.
#[derive(Debug)]
enum Failure {
    Domain(anyhow::Error),
    Usage(anyhow::Error),
}

type Outcome<T> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn domain(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Domain(e.into())
}

fn bound_failure(e: BoundError) -> Failure {
    match e {
        BoundError::Disconnected => domain(e),
        _ => usage(e),
    }
}

fn oracle_failure(e: oracle::OracleError) -> Failure {
    match e {
        oracle::OracleError::Bound(b) => bound_failure(b),
        e => usage(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(text) => {
            let mut out = io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Dist => dist(g),
        Command::Bound => {
            let (graph, leaders) = graph_and_leaders(g)?;
            let report = BoundReport::compute(&graph, &leaders).map_err(bound_failure)?;
            render(g, &report)
        }
        Command::Rank(a) => rank(g, a),
        Command::CheckLemma1(a) => {
            let graph = read_graph(g)?;
            let verdict = oracle::check_lemma1(&graph, a.trials, g.seed);
            verdict_output(g, &verdict)
        }
        Command::CheckTheorem(a) => {
            let (graph, leaders) = graph_and_leaders(g)?;
            if !graph.is_bound_connected() {
                return Err(bound_failure(BoundError::Disconnected));
            }
            let verdict =
                oracle::check_theorem(&graph, &leaders, a.trials, g.seed).map_err(oracle_failure)?;
            verdict_output(g, &verdict)
        }
        Command::SelectLeaders(a) => select_leaders(g, a),
        Command::Gen(a) => gen(g, a),
        Command::Experiment(a) => experiment(g, a),
    }
}

fn read_graph(g: &Global) -> Outcome<Graph> {
    let path = g
        .input
        .as_ref()
        .ok_or_else(|| usage(anyhow!("--input <PATH> is required")))?;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")
            .map_err(usage)?;
        s
    } else {
        fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(usage)?
    };
    edgelist::parse(&text, g.directed)
        .with_context(|| format!("malformed edge list {}", path.display()))
        .map_err(usage)
}

fn parse_leaders(g: &Global, n: usize) -> Outcome<Option<LeaderSet>> {
    let Some(list) = &g.leaders else {
        return Ok(None);
    };
    let ids = list
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| usage(anyhow!("--leaders expects comma-separated node ids, got `{list}`")))?;
    LeaderSet::from_ids(n, &ids).map(Some).map_err(usage)
}

fn graph_and_leaders(g: &Global) -> Outcome<(Graph, LeaderSet)> {
    let graph = read_graph(g)?;
    let leaders =
        parse_leaders(g, graph.n())?.ok_or_else(|| usage(anyhow!("--leaders is required")))?;
    Ok((graph, leaders))
}

fn render<T: Serialize>(g: &Global, value: &T) -> Outcome<String> {
    let v = serde_json::to_value(value).map_err(usage)?;
    Ok(if g.csv {
        output::record_csv(&v)
    } else {
        output::json(&v)
    })
}

fn verdict_output(g: &Global, verdict: &oracle::Verdict) -> Outcome<String> {
    let text = render(g, verdict)?;
    if verdict.passed {
        Ok(text)
    } else if verdict.counterexample == Some(oracle::Counterexample::Disconnected) {
        Err(bound_failure(BoundError::Disconnected))
    } else {
        // The counterexample is the result; print it before failing.
        print!("{text}");
        Err(domain(anyhow!("property `{}` failed", verdict.property)))
    }
}

#[derive(Serialize)]
struct DistOutput {
    n: usize,
    directed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    leaders: Option<Vec<usize>>,
    /// Rows are nodes; columns are nodes, or leaders with `--leaders`.
    /// `null` marks an unreachable pair.
    dist: Vec<Vec<Option<usize>>>,
}

fn dist(g: &Global) -> Outcome<String> {
    let graph = read_graph(g)?;
    let leaders = parse_leaders(g, graph.n())?;
    let d = graph.distances();
    let rows: Vec<Vec<Option<usize>>> = match &leaders {
        None => (0..graph.n()).map(|i| d.row(i).to_vec()).collect(),
        Some(ls) => {
            let dl = DlMatrix::from_graph(&graph, ls).map_err(bound_failure)?;
            dl.rows()
                .iter()
                .map(|r| r.iter().map(|&x| Some(x)).collect())
                .collect()
        }
    };
    if g.csv {
        return Ok(output::matrix_csv(&rows));
    }
    render(
        g,
        &DistOutput {
            n: graph.n(),
            directed: graph.is_directed(),
            leaders: leaders.map(|l| l.ids()),
            dist: rows,
        },
    )
}

fn rank(g: &Global, a: &RankArgs) -> Outcome<String> {
    let (graph, leaders) = graph_and_leaders(g)?;
    let method = match a.method {
        MethodArg::Auto => RankMethod::Auto,
        MethodArg::Exact => RankMethod::Exact,
        MethodArg::Numerical => RankMethod::Numerical,
    };
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(anyhow!("--tol must be positive, got {t}")));
        }
    }
    let report = if a.sample {
        oracle::sampled_rank(&graph, &leaders, g.seed, a.trial)
    } else if a.uniform {
        oracle::uniform_rank(&graph, &leaders)
    } else {
        oracle::controllability_rank(&graph, &leaders, RankOptions { method, rel_tol: a.tol })
    }
    .map_err(oracle_failure)?;
    render(g, &report)
}

fn select_leaders(g: &Global, a: &SelectArgs) -> Outcome<String> {
    let graph = read_graph(g)?;
    let mode = match a.mode {
        ModeArg::Exhaustive => SelectionMode::Exhaustive,
        ModeArg::Greedy => SelectionMode::Greedy,
    };
    let problem = SelectionProblem {
        budget: a.budget,
        prune: !a.no_prune,
        ..SelectionProblem::new(a.k, mode)
    };
    let result = select::select(&graph, &problem).map_err(|e| match e {
        SelectError::BadTarget { .. } => usage(e),
        SelectError::BudgetExceeded { .. } => domain(e),
        SelectError::Bound(b) => bound_failure(b),
    })?;
    render(g, &result)
}

fn gen(g: &Global, a: &GenArgs) -> Outcome<String> {
    let need = |flag: &str| usage(anyhow!("--family {:?} needs --{flag}", a.family));
    let family = match a.family {
        FamilyArg::Path => Family::Path,
        FamilyArg::Cycle => Family::Cycle,
        FamilyArg::Complete => Family::Complete,
        FamilyArg::Star => Family::Star,
        FamilyArg::Er => Family::ErdosRenyi {
            p: a.p.ok_or_else(|| need("p"))?,
        },
        FamilyArg::Ba => Family::BarabasiAlbert {
            m: a.m.ok_or_else(|| need("m"))?,
        },
    };
    let spec = GenSpec::new(family, a.n, g.seed);
    spec.validate().map_err(usage)?;
    let graph = if a.connected {
        let (graph, attempts) =
            generators::resample_until_connected(&spec, a.max_attempts).map_err(domain)?;
        eprintln!("connected after {attempts} attempt(s)");
        graph
    } else {
        generators::generate(&spec).map_err(usage)?
    };
    let text = edgelist::write(&graph);
    match &a.out {
        Some(path) => {
            fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(usage)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn experiment(g: &Global, a: &ExperimentArgs) -> Outcome<String> {
    let family = match a.family {
        EnsembleArg::Er => EnsembleFamily::ErdosRenyi,
        EnsembleArg::Ba => EnsembleFamily::BarabasiAlbert,
    };
    let leaders = match &g.leaders {
        None => 2,
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| usage(anyhow!("experiment --leaders expects a count, got `{s}`")))?,
    };
    let spec = ExperimentSpec {
        grid: a.grid.clone().unwrap_or_else(|| family.default_grid()),
        n: a.n,
        trials: a.trials,
        leaders,
        with_rank: a.with_rank,
        max_attempts: a.max_attempts,
        ..ExperimentSpec::new(family, g.seed)
    };
    let rows = experiments::run_experiment(&spec).map_err(|e| match e {
        experiments::ExperimentError::Invalid(_) => usage(e),
        experiments::ExperimentError::Violation { .. } => domain(e),
    })?;
    let text = if g.json {
        output::json(&serde_json::to_value(&rows).map_err(usage)?)
    } else {
        experiments::emit_csv(&rows)
    };
    match &a.out {
        Some(path) => {
            fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(usage)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
