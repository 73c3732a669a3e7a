use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use secmatch_core::arrival::{ArrivalStep, ExactOracle, McOracle};
use secmatch_core::bench::analyze::{
    edge_alpha_table, hyper_alpha_table, ordinal_sweep, p_table, threshold_table, Table,
};
use secmatch_core::bench::{
    run_experiment, write_rows, Algorithm, ExperimentConfig, FamilyKind, Format, InstanceFamily, OracleMode,
    ReportRow,
};
use secmatch_core::edge::{run_edge_algorithm, EdgeInstance};
use secmatch_core::graph::WeightedGraph;
use secmatch_core::hyper::{run_hypergraph_algorithm, BipartiteHypergraph};
use secmatch_core::ordinal::{gradient, objective, simulate_ordinal, OrdinalPolicy};
use secmatch_core::stats::{stream_rng, Stream};
use secmatch_core::verify::run_suites;
use secmatch_core::vertex::{run_vertex_algorithm, run_vertex_ordinal_greedy, ArrivalOrder, VertexInstance};
use secmatch_core::{Error, Result};

const THREADS_ENV: &str = "SECMATCH_THREADS";

#[derive(Parser)]
#[command(
    name = "secmatch",
    version,
    about = "Secretary matching algorithms, closed forms and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment over a family, or trace one run on an input file
    Simulate(SimulateArgs),
    /// Print closed-form tables
    Analyze(AnalyzeArgs),
    /// Run the invariant suites; exits 2 if any check fails
    Verify(VerifyArgs),
    /// Sweep experiments over several sizes and algorithms into one report
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Clone)]
struct FamilyArgs {
    #[arg(long, default_value = "uniform-complete")]
    family: String,
    /// vertex count (graph families, hard-ordinal)
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// online vertex count (hypergraph)
    #[arg(long, default_value_t = 6)]
    m: usize,
    /// offline vertex count (hypergraph)
    #[arg(long, default_value_t = 6)]
    r: usize,
    /// hyperedge size bound
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// edge probability (sparse-random)
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// hyperedges per online vertex
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// auxiliary vertices (padded-triangle)
    #[arg(long, default_value_t = 0)]
    m_aux: usize,
}

impl FamilyArgs {
    fn family(&self, n: usize) -> Result<InstanceFamily> {
        let mut f = InstanceFamily::new(self.family.parse::<FamilyKind>()?).with_n(n);
        f.m = self.m;
        f.r = self.r;
        f.d = self.d;
        f.p = self.p;
        f.degree = self.degree;
        f.m_aux = self.m_aux;
        Ok(f)
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// exploration length of the vertex algorithm
    #[arg(long, conflicts_with = "l")]
    k: Option<usize>,
    /// threshold of the ordinal policy
    #[arg(long)]
    l: Option<usize>,
    /// availability oracle: exact or mc
    #[arg(long, default_value = "exact")]
    oracle: String,
    /// Monte Carlo budget for top-level availability queries
    #[arg(long, default_value_t = 1000)]
    outer_trials: u64,
    /// Monte Carlo budget for nested availability queries
    #[arg(long, default_value_t = 200)]
    inner_trials: u64,
    /// draw a fresh instance for every trial
    #[arg(long)]
    resample: bool,
}

impl RunArgs {
    fn config(&self, algorithm: Algorithm, family: InstanceFamily) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(algorithm, family, self.trials, self.seed);
        cfg.k_or_l = self.k.or(self.l);
        cfg.oracle = self.oracle.parse()?;
        cfg.outer_trials = self.outer_trials;
        cfg.inner_trials = self.inner_trials;
        cfg.resample = self.resample;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value = "vertex")]
    algorithm: String,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    run: RunArgs,
    /// graph JSON to trace one run on (vertex, vertex-ordinal-greedy, edge)
    #[arg(long, conflicts_with_all = ["hypergraph", "policy"])]
    graph: Option<PathBuf>,
    /// hypergraph JSON to trace one run on
    #[arg(long, conflicts_with = "policy")]
    hypergraph: Option<PathBuf>,
    /// policy JSON to simulate on the ordinal process
    #[arg(long)]
    policy: Option<PathBuf>,
    /// where to write the trace JSON (stdout when omitted)
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(subcommand)]
    table: AnalyzeTable,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyzeTable {
    /// p(k, t) for t = k..t_max
    P {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t_max: usize,
    },
    /// edge-arrival α_t for t = 1..m
    Alpha {
        #[arg(long)]
        m: usize,
    },
    /// hypergraph α_t for t = 1..m
    HyperAlpha {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
    },
    /// ALG(ℓ) for every threshold ℓ
    Threshold {
        #[arg(long)]
        n: usize,
    },
    /// best threshold and its gap below 5/12 for each n
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// objective and gradient of a policy file, as JSON
    Policy {
        #[arg(long)]
        policy: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// restrict to these suites (graph, vertex, edge, hyper, ordinal)
    #[arg(long = "suite")]
    suites: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    /// algorithms to run, comma separated
    #[arg(long, value_delimiter = ',', default_value = "vertex")]
    algorithm: Vec<String>,
    #[command(flatten)]
    family: FamilyArgs,
    /// sizes to sweep, comma separated (overrides --n)
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

/// Failure of a command: bad input or a failed invariant.
enum Failure {
    Error(Error),
    Invariant,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let res = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant) => ExitCode::from(2),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .map_err(|_| Error::Input(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Input(format!("cannot configure thread pool: {e}")))
}

/// Writer for `--out`, or stdout.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit_rows(rows: &[ReportRow], format: FormatArg, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    write_rows(rows, format.into(), &mut w)?;
    w.flush()
        .map_err(|e| io_error(out.unwrap_or(Path::new("<stdout>")), e))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| io_error(out.unwrap_or(Path::new("<stdout>")), e))
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let algorithm: Algorithm = a.algorithm.parse()?;
    if let Some(path) = &a.graph {
        let g = WeightedGraph::read_json(path)?;
        return Ok(trace_graph(algorithm, g, &a.run, a.trace_out.as_deref())?);
    }
    if let Some(path) = &a.hypergraph {
        if algorithm != Algorithm::Hypergraph {
            return Err(Error::Input("--hypergraph needs --algorithm hypergraph".into()).into());
        }
        let h = BipartiteHypergraph::read_json(path)?;
        let mut order_rng = stream_rng(a.run.seed, 0, Stream::Order);
        let mut coins = stream_rng(a.run.seed, 0, Stream::Coins);
        let order = shuffled(h.m(), &mut order_rng);
        let trace = match a.run.oracle.parse::<OracleMode>()? {
            OracleMode::Exact => {
                run_hypergraph_algorithm(&h, &order, &mut ExactOracle::build(&h)?, &mut coins)?
            }
            OracleMode::Mc => {
                let mut o = McOracle::new(&h, a.run.outer_trials, a.run.inner_trials, a.run.seed)?;
                run_hypergraph_algorithm(&h, &order, &mut o, &mut coins)?
            }
        };
        return Ok(emit_json(&trace, a.trace_out.as_deref())?);
    }
    if let Some(path) = &a.policy {
        let policy = OrdinalPolicy::read_json(path)?;
        let est = simulate_ordinal(&policy, a.run.trials, a.run.seed)?;
        let summary = PolicySimulation {
            n: policy.n(),
            objective: objective(&policy),
            simulated: est.mean,
            stderr: est.stderr,
            trials: est.trials,
        };
        return Ok(emit_json(&summary, a.out.as_deref())?);
    }
    let cfg = a.run.config(algorithm, a.family.family(a.family.n)?)?;
    let res = run_experiment(&cfg)?;
    Ok(emit_rows(&[res.row], a.format, a.out.as_deref())?)
}

#[derive(Serialize)]
struct PolicySimulation {
    n: usize,
    objective: f64,
    simulated: f64,
    stderr: f64,
    trials: u64,
}

/// Edge-arrival trace with the accepted edges as `[u, v]` pairs.
#[derive(Serialize)]
struct EdgeTraceJson<'a> {
    matching: Vec<(usize, usize)>,
    weight: f64,
    steps: &'a [ArrivalStep],
}

fn shuffled<R: rand::Rng>(m: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..m).collect();
    v.shuffle(rng);
    v
}

fn trace_graph(algorithm: Algorithm, g: WeightedGraph, run: &RunArgs, out: Option<&Path>) -> Result<()> {
    let mut order_rng = stream_rng(run.seed, 0, Stream::Order);
    let mut coins = stream_rng(run.seed, 0, Stream::Coins);
    match algorithm {
        Algorithm::Vertex | Algorithm::VertexOrdinalGreedy => {
            let inst = VertexInstance::new(g);
            let k = run.k.unwrap_or(inst.n() / 2);
            let order = ArrivalOrder::random(inst.n(), &mut order_rng);
            let trace = if algorithm == Algorithm::Vertex {
                run_vertex_algorithm(&inst, &order, k, &mut coins)?
            } else {
                run_vertex_ordinal_greedy(&inst, &order, k, &mut coins)?
            };
            emit_json(&trace, out)
        }
        Algorithm::Edge => {
            let inst = EdgeInstance::new(g)?;
            let order = shuffled(inst.m(), &mut order_rng);
            let trace = match run.oracle.parse::<OracleMode>()? {
                OracleMode::Exact => {
                    run_edge_algorithm(&inst, &order, &mut ExactOracle::build(&inst)?, &mut coins)?
                }
                OracleMode::Mc => {
                    let mut o = McOracle::new(&inst, run.outer_trials, run.inner_trials, run.seed)?;
                    run_edge_algorithm(&inst, &order, &mut o, &mut coins)?
                }
            };
            let edges = inst.edges();
            let json = EdgeTraceJson {
                matching: trace.accepted.iter().map(|&i| (edges[i].0, edges[i].1)).collect(),
                weight: trace.weight,
                steps: &trace.steps,
            };
            emit_json(&json, out)
        }
        _ => Err(Error::Input(format!(
            "--graph does not apply to algorithm {algorithm}"
        ))),
    }
}

fn analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let table: Table = match a.table {
        AnalyzeTable::P { k, t_max } => p_table(k, t_max)?,
        AnalyzeTable::Alpha { m } => edge_alpha_table(m)?,
        AnalyzeTable::HyperAlpha { m, d } => hyper_alpha_table(m, d)?,
        AnalyzeTable::Threshold { n } => threshold_table(n)?,
        AnalyzeTable::Sweep { n } => ordinal_sweep(&n)?,
        AnalyzeTable::Policy { policy } => {
            let p = OrdinalPolicy::read_json(&policy)?;
            #[derive(Serialize)]
            struct Out {
                n: usize,
                objective: f64,
                gradient: Vec<f64>,
            }
            let out = Out {
                n: p.n(),
                objective: objective(&p),
                gradient: gradient(&p),
            };
            return Ok(emit_json(&out, a.out.as_deref())?);
        }
    };
    let mut w = output(a.out.as_deref())?;
    table.write_csv(&mut w)?;
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let results = run_suites(&a.suites, a.seed)?;
    let mut failed = 0;
    for r in &results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        if r.passed {
            println!("{mark} {}: {}", r.suite, r.check);
        } else {
            failed += 1;
            println!("{mark} {}: {} ({})", r.suite, r.check, r.detail);
        }
    }
    println!("{} checks, {failed} failed", results.len());
    if failed > 0 {
        Err(Failure::Invariant)
    } else {
        Ok(())
    }
}

fn report(a: ReportArgs) -> Result<(), Failure> {
    let sizes = if a.sizes.is_empty() {
        vec![a.family.n]
    } else {
        a.sizes.clone()
    };
    let mut rows = Vec::new();
    for name in &a.algorithm {
        let algorithm: Algorithm = name.parse()?;
        for &n in &sizes {
            let cfg = a.run.config(algorithm, a.family.family(n)?)?;
            rows.push(run_experiment(&cfg)?.row);
        }
    }
    Ok(emit_rows(&rows, a.format, a.out.as_deref())?)
}
