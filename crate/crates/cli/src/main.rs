//! `qlsearch`: solve Ising/QUBO problems with simulated quantum local search
//! and run the reproducible experiments.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use toml::Table;

use qlsearch::auxiliary::AuxiliaryObjective;
use qlsearch::baselines::{brute_force, local_search, BRUTE_FORCE_MAX_SPINS};
use qlsearch::harness::{
    default_solver_for, run, ExperimentKind, ExperimentSpec, GraphSource, SolverKind, Weights,
};
use qlsearch::model::{
    approximation_ratio, build_graph_coloring, build_maxcut, coloring_conflicts,
    default_coloring_penalty, qubo_to_ising, Graph, PolynomialModel,
};
use qlsearch::neighborhood::enumerate_full;
use qlsearch::optimizer::{
    build_encoding, circuit_width, initial_solution, solve, EncodingChoice, InitPolicy, Shots,
    SolverConfig,
};

use config::{fill_defaults, read_file, runtime, take, to_table, typed, usage, Failure, Overrides};

/// Default output directory when neither `--out` nor the config sets one.
const OUT_ENV: &str = "QLSEARCH_OUT";

const AFTER_HELP: &str = "\
Config files are TOML and use the flag names as keys: top-level `seed`,
`jobs`, `output`, `id`, `repetitions`, `problem`, `colors`, `lambda`, and the
tables [graph], [solver], [sweep] and [experiment] (e.g. `--layers` is
solver.layers, `--shot-counts` is experiment.shots). Flags override the file.

Experiment tables are CSV files with these columns, identical on every rerun
with the same seed: experiment, kind, row, repetition, seed, solver, r,
encoding, layers, alpha, m_scale, shots, samples, rounds_cap, optimizer,
n_qubits, estimate_shots, exact_value, mse, energy, optimum, eta, rounds,
shots_used, conflicts, success, error. Wall times go to <id>.timing.csv and
the effective config plus per-configuration summaries to <id>.json.

Exit status: 0 on success, 1 on usage or config errors, 2 when the run fails.";

#[derive(Parser)]
#[command(name = "qlsearch", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// TOML config file; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed; all randomness derives from it
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: one per core)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory [default: $QLSEARCH_OUT, else ./results]
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with the quantum local search
    Solve(SolveArgs),
    /// Classical r-local search from the configured start
    LocalSearch(SolveArgs),
    /// Compare solvers on MaxCut over seeds and sweeps
    Bench(BenchArgs),
    /// MSE of shot estimates of the objective versus shot count
    Mse(MseArgs),
    /// Graph coloring runs with color-swap groups
    Coloring(ColoringArgs),
    /// Shot-noise optimization with best-of-S recovery
    QpuSim(QpuArgs),
    /// Write a generated graph in the text format read by --graph
    GenGraph(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum Problem {
    #[default]
    Maxcut,
    Coloring,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingFlag {
    Full,
    Unranked,
    BaseN,
    Sparse,
    Bitmask,
    Connected,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitFlag {
    AllOnes,
    Random,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OptimizerFlag {
    QuasiNewton,
    Spsa,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum WeightsFlag {
    Unit,
    Uniform,
}

#[derive(Args, Default)]
struct GraphArgs {
    /// Graph file (`p edge n m` header, `e u v [w]` lines, 1-based)
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// Random regular graph on N vertices (see --degree)
    #[arg(long, value_name = "N", conflicts_with_all = ["graph", "complete", "mycielski"])]
    regular: Option<usize>,
    /// Degree of --regular
    #[arg(long, default_value_t = 3, requires = "regular")]
    degree: usize,
    /// Complete graph on N vertices
    #[arg(long, value_name = "N", conflicts_with_all = ["graph", "mycielski"])]
    complete: Option<usize>,
    /// K-th Mycielski graph (3 gives 11 vertices)
    #[arg(long, value_name = "K", conflicts_with = "graph")]
    mycielski: Option<usize>,
    /// Edge weights of generated graphs
    #[arg(long, value_enum)]
    weights: Option<WeightsFlag>,
}

impl GraphArgs {
    fn apply(&self, o: &mut Overrides) -> Result<(), Failure> {
        let source = if let Some(path) = &self.graph {
            Some(GraphSource::File { path: path.clone() })
        } else if let Some(n) = self.regular {
            Some(GraphSource::RandomRegular {
                n,
                d: self.degree,
                weights: self.weights(),
            })
        } else if let Some(n) = self.complete {
            Some(GraphSource::Complete {
                n,
                weights: self.weights(),
            })
        } else {
            self.mycielski.map(|k| GraphSource::Mycielski { k })
        };
        o.set("graph", source)
    }

    fn weights(&self) -> Weights {
        match self.weights {
            Some(WeightsFlag::Unit) => Weights::Unit,
            _ => Weights::Uniform,
        }
    }
}

#[derive(Args, Default)]
struct SolverArgs {
    /// Largest group size
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_enum)]
    encoding: Option<EncodingFlag>,
    /// Circuit layers
    #[arg(long)]
    layers: Option<usize>,
    /// Shots per estimate, or `exact`
    #[arg(long)]
    shots: Option<Shots>,
    /// Shots for the final estimate of each round
    #[arg(long)]
    final_shots: Option<Shots>,
    /// Transform sharpness
    #[arg(long)]
    alpha: Option<f64>,
    /// Transform scale M (default: number of spins)
    #[arg(long)]
    m_scale: Option<f64>,
    /// Most probable configurations decoded per round
    #[arg(long)]
    samples: Option<usize>,
    /// Round cap
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, value_enum)]
    optimizer: Option<OptimizerFlag>,
    /// SPSA iterations
    #[arg(long)]
    spsa_iters: Option<usize>,
    /// Starting solution
    #[arg(long, value_enum)]
    init: Option<InitFlag>,
}

impl SolverArgs {
    fn apply(&self, o: &mut Overrides) -> Result<(), Failure> {
        o.set("solver.r", self.r)?;
        o.set(
            "solver.encoding",
            self.encoding.map(|e| match e {
                EncodingFlag::Full => EncodingChoice::Full,
                EncodingFlag::Unranked => EncodingChoice::Unranked,
                EncodingFlag::BaseN => EncodingChoice::BaseN,
                EncodingFlag::Sparse => EncodingChoice::Sparse,
                EncodingFlag::Bitmask => EncodingChoice::Bitmask,
                EncodingFlag::Connected => EncodingChoice::Connected,
            }),
        )?;
        o.set("solver.layers", self.layers)?;
        o.set("solver.shots", self.shots)?;
        o.set("solver.final_shots", self.final_shots)?;
        o.set("solver.alpha", self.alpha)?;
        o.set("solver.m_scale", self.m_scale)?;
        o.set("solver.samples", self.samples)?;
        o.set("solver.rounds", self.rounds)?;
        o.set("solver.optimizer", self.optimizer)?;
        o.set("solver.spsa.iters", self.spsa_iters)?;
        o.set(
            "solver.init",
            self.init.map(|i| match i {
                InitFlag::AllOnes => InitPolicy::AllOnes,
                InitFlag::Random => InitPolicy::Random,
            }),
        )
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum)]
    problem: Option<Problem>,
    /// Colors for --problem coloring
    #[arg(long)]
    colors: Option<usize>,
    /// Coloring penalty weight (default: 1 + max degree)
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Table name; files are <out>/<id>.csv, .json and .timing.csv
    #[arg(long)]
    id: Option<String>,
    /// Runs per configuration, each with its own derived seed
    #[arg(long)]
    repetitions: Option<usize>,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Sweep over group sizes, e.g. 1,2
    #[arg(long, value_delimiter = ',')]
    sweep_r: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    sweep_layers: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    sweep_alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    sweep_m_scale: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    sweep_samples: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    sweep_shots: Option<Vec<Shots>>,
}

impl ExperimentArgs {
    fn apply(&self, o: &mut Overrides) -> Result<(), Failure> {
        o.set("id", self.id.clone())?;
        o.set("repetitions", self.repetitions)?;
        self.graph.apply(o)?;
        self.solver.apply(o)?;
        o.set("sweep.r", self.sweep_r.clone())?;
        o.set("sweep.layers", self.sweep_layers.clone())?;
        o.set("sweep.alpha", self.sweep_alpha.clone())?;
        o.set("sweep.m_scale", self.sweep_m_scale.clone())?;
        o.set("sweep.samples", self.sweep_samples.clone())?;
        o.set("sweep.shots", self.sweep_shots.clone())
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SolverFlag {
    Quantum,
    LocalSearch,
    Bilinear,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Solvers to compare
    #[arg(long, value_enum, value_delimiter = ',')]
    solvers: Option<Vec<SolverFlag>>,
}

#[derive(Args)]
struct MseArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Shot counts N, e.g. 1,16,256
    #[arg(long, value_delimiter = ',')]
    shot_counts: Option<Vec<u64>>,
    /// Estimates per shot count
    #[arg(long)]
    estimates: Option<usize>,
}

#[derive(Args)]
struct ColoringArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    #[arg(long)]
    colors: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct QpuArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Values of S to report, e.g. 1,2,4,8
    #[arg(long, value_delimiter = ',')]
    sample_counts: Option<Vec<usize>>,
    /// Shots of the final estimate (default: --shots)
    #[arg(long)]
    estimate_shots: Option<u64>,
    /// Also recover from the exact final distribution
    #[arg(long)]
    compare_exact: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Write here instead of stdout
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli) {
        Ok(summary) => {
            if !summary.is_empty() {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

/// Config after merging file and flags, minus the CLI-only keys.
struct Prepared {
    table: Table,
    out: PathBuf,
}

fn prepare(
    cli: &Cli,
    fill: impl FnOnce(&mut Overrides) -> Result<(), Failure>,
) -> Result<Prepared, Failure> {
    let mut table = read_file(cli.config.as_deref())?;
    let mut o = Overrides::default();
    o.set("seed", cli.seed)?;
    o.set("jobs", cli.jobs)?;
    o.set("output", cli.out.as_ref().map(|p| p.display().to_string()))?;
    fill(&mut o)?;
    o.apply(&mut table)?;

    if let Some(jobs) = take::<usize>(&mut table, "jobs")? {
        if jobs == 0 {
            return Err(usage("jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(runtime)?;
    }
    let out = match table.get("output").and_then(|v| v.as_str()) {
        Some(p) => PathBuf::from(p),
        None => std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("results"), PathBuf::from),
    };
    Ok(Prepared { table, out })
}

fn execute(cli: Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Solve(a) => single(&cli, a, false),
        Command::LocalSearch(a) => single(&cli, a, true),
        Command::Bench(a) => experiment(&cli, "bench", &a.common, |o| {
            o.set("experiment.solvers", a.solvers.clone())
        }),
        Command::Mse(a) => experiment(&cli, "mse", &a.common, |o| {
            o.set("experiment.shots", a.shot_counts.clone())?;
            o.set("experiment.estimates", a.estimates)
        }),
        Command::Coloring(a) => experiment(&cli, "coloring", &a.common, |o| {
            o.set("experiment.k", a.colors)?;
            o.set("experiment.lambda", a.lambda)
        }),
        Command::QpuSim(a) => experiment(&cli, "qpu-sim", &a.common, |o| {
            o.set("experiment.samples", a.sample_counts.clone())?;
            o.set("experiment.final_shots", a.estimate_shots)?;
            o.set("experiment.compare_exact", a.compare_exact.then_some(true))
        }),
        Command::GenGraph(a) => gen_graph(&cli, a),
    }
}

/// Effective config of `solve` and `local-search`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleConfig {
    #[serde(default)]
    seed: u64,
    graph: GraphSource,
    #[serde(default)]
    problem: Problem,
    colors: Option<usize>,
    lambda: Option<f64>,
    #[serde(default)]
    solver: SolverConfig,
    output: Option<String>,
}

fn build_model(c: &SingleConfig, graph: &Graph) -> Result<PolynomialModel, Failure> {
    match c.problem {
        Problem::Maxcut => Ok(build_maxcut(graph)),
        Problem::Coloring => {
            let k = c
                .colors
                .ok_or_else(|| usage("--problem coloring needs --colors"))?;
            let lambda = c.lambda.unwrap_or_else(|| default_coloring_penalty(graph));
            Ok(qubo_to_ising(
                &build_graph_coloring(graph, k, lambda).map_err(usage)?,
            ))
        }
    }
}

fn single(cli: &Cli, a: &SolveArgs, classical: bool) -> Result<String, Failure> {
    let p = prepare(cli, |o| {
        a.graph.apply(o)?;
        o.set("problem", a.problem)?;
        o.set("colors", a.colors)?;
        o.set("lambda", a.lambda)?;
        a.solver.apply(o)
    })?;
    let mut table = p.table;
    let problem = table
        .get("problem")
        .and_then(|v| v.as_str())
        .unwrap_or("maxcut")
        .to_string();
    let mut defaults = Table::new();
    let mut solver_defaults = to_table(&SolverConfig {
        init: InitPolicy::Random,
        ..Default::default()
    });
    if problem == "coloring" {
        if let Some(k) = table.get("colors").cloned() {
            let mut swap = Table::new();
            swap.insert("kind".into(), "coloring-swap".into());
            swap.insert("k".into(), k.clone());
            let mut init = Table::new();
            init.insert("kind".into(), "random-one-hot".into());
            init.insert("k".into(), k);
            solver_defaults.insert("encoding".into(), swap.into());
            solver_defaults.insert("init".into(), init.into());
        }
    }
    defaults.insert("solver".into(), solver_defaults.into());
    fill_defaults(&mut table, defaults);
    if !table.contains_key("graph") {
        return Err(usage(
            "no graph given; use --graph, --regular, --complete or --mycielski",
        ));
    }
    let mut c: SingleConfig = typed(table)?;
    c.solver.seed = c.seed;
    c.solver.validate().map_err(usage)?;
    let graph = c.graph.instance(c.seed).map_err(usage)?;
    let model = build_model(&c, &graph)?;
    let n = model.n_spins();

    let (solution, energy, rounds, qubits, history) = if classical {
        let z0 = initial_solution(n, &c.solver.init, c.seed).map_err(usage)?;
        let encoding = build_encoding(&model, &c.solver).map_err(usage)?;
        let groups = match encoding.groups() {
            Some(g) => g.to_vec(),
            None => enumerate_full(n, c.solver.r).map_err(usage)?,
        };
        let res = local_search(&model, &z0, &groups).map_err(runtime)?;
        (res.solution, res.energy, res.steps, None, None)
    } else {
        let out = solve(&model, &c.solver).map_err(runtime)?;
        let obj = AuxiliaryObjective::compile(
            &model,
            out.best_solution(),
            &build_encoding(&model, &c.solver).map_err(usage)?,
        )
        .map_err(runtime)?;
        (
            out.best_solution().clone(),
            out.best_energy(),
            out.rounds(),
            Some(circuit_width(&obj)),
            Some(out.history),
        )
    };

    let mut line = format!("energy={energy:.6}");
    let mut optimum = None;
    let mut eta = None;
    let mut conflicts = None;
    match c.problem {
        Problem::Maxcut if n <= BRUTE_FORCE_MAX_SPINS => {
            let opt = brute_force(&model).map_err(runtime)?.1;
            optimum = Some(opt);
            eta = approximation_ratio(energy, opt).ok();
            if let Some(e) = eta {
                line.push_str(&format!(" eta={e:.4}"));
            }
        }
        Problem::Coloring => {
            let k = c.colors.unwrap_or(1);
            conflicts = coloring_conflicts(&graph, &solution, k);
            line.push_str(&match conflicts {
                Some(k) => format!(" conflicts={k}"),
                None => " conflicts=infeasible".to_string(),
            });
        }
        _ => {}
    }
    line.push_str(&format!(
        " {}={rounds}",
        if classical { "moves" } else { "rounds" }
    ));
    if let Some(q) = qubits {
        line.push_str(&format!(" qubits={q}"));
    }

    let name = if classical { "local-search" } else { "solve" };
    let report = serde_json::json!({
        "config": c,
        "energy": energy,
        "optimum": optimum,
        "eta": eta,
        "conflicts": conflicts,
        "solution": solution,
        "history": history,
    });
    let path = write_json(&p.out, name, &report)?;
    Ok(format!("{line} -> {}", path.display()))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(value).map_err(runtime)? + "\n";
    std::fs::write(&path, text)
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Defaults for experiment-specific keys the user may leave out.
fn experiment_defaults(kind: &str) -> Table {
    let mut t = Table::new();
    t.insert("kind".into(), kind.into());
    let list = |v: &[i64]| toml::Value::Array(v.iter().map(|&x| x.into()).collect());
    match kind {
        "mse" => {
            t.insert("shots".into(), list(&[1, 16, 256, 4096, 65536]));
        }
        "benchmark" => {
            let solvers =
                [SolverKind::Quantum, SolverKind::LocalSearch].map(|s| toml::Value::from(s.name()));
            t.insert("solvers".into(), toml::Value::Array(solvers.to_vec()));
        }
        "qpu-emulation" => {
            t.insert("samples".into(), list(&[1, 2, 4, 8, 16]));
        }
        _ => {}
    }
    t
}

fn experiment(
    cli: &Cli,
    name: &str,
    args: &ExperimentArgs,
    extra: impl FnOnce(&mut Overrides) -> Result<(), Failure>,
) -> Result<String, Failure> {
    let kind = match name {
        "bench" => "benchmark",
        "qpu-sim" => "qpu-emulation",
        other => other,
    };
    let p = prepare(cli, |o| {
        args.apply(o)?;
        extra(o)
    })?;
    let mut table = p.table;
    if let Some(k) = table
        .get("experiment")
        .and_then(|e| e.get("kind"))
        .and_then(|k| k.as_str())
    {
        if k != kind {
            return Err(usage(format!(
                "config describes a `{k}` experiment, not `{kind}`"
            )));
        }
    }
    let mut defaults = Table::new();
    defaults.insert("id".into(), name.into());
    defaults.insert("repetitions".into(), 1.into());
    defaults.insert("seed".into(), 0.into());
    defaults.insert("experiment".into(), experiment_defaults(kind).into());
    let kind_value: ExperimentKind = typed(experiment_defaults_for_solver(kind))?;
    defaults.insert(
        "solver".into(),
        to_table(&default_solver_for(&kind_value)).into(),
    );
    fill_defaults(&mut table, defaults);
    if !table.contains_key("graph") {
        return Err(usage(
            "no graph given; use --graph, --regular, --complete or --mycielski",
        ));
    }
    let spec: ExperimentSpec = typed(table)?;
    spec.validate().map_err(usage)?;

    let result = run(&spec).map_err(runtime)?;
    let files = result.write(&spec, &p.out).map_err(runtime)?;
    let errors = result.rows.iter().filter(|r| r.error.is_some()).count();
    let mut line = format!("{}: {} rows, {errors} errors", spec.id, result.rows.len());
    let etas: Vec<f64> = result.summary().iter().filter_map(|s| s.mean_eta).collect();
    if let Some(best) = etas.iter().cloned().reduce(f64::max) {
        line.push_str(&format!(", best mean eta {best:.4}"));
    }
    line.push_str(&format!(" -> {}", files[0].display()));
    if errors > 0 {
        let first = result
            .rows
            .iter()
            .find_map(|r| r.error.clone())
            .unwrap_or_default();
        return Err(runtime(format!("{line}; first error: {first}")));
    }
    Ok(line)
}

/// A minimal experiment table of the given kind, only used to pick the
/// solver defaults that suit it.
fn experiment_defaults_for_solver(kind: &str) -> Table {
    let mut t = experiment_defaults(kind);
    if kind == "coloring" {
        t.insert("k".into(), 2.into());
    }
    t
}

fn gen_graph(cli: &Cli, a: &GenArgs) -> Result<String, Failure> {
    let p = prepare(cli, |o| {
        a.graph.apply(o)?;
        o.set("file", a.file.as_ref().map(|f| f.display().to_string()))
    })?;
    let mut table = p.table;
    let seed: u64 = take(&mut table, "seed")?.unwrap_or(0);
    let file: Option<String> = take(&mut table, "file")?;
    let source: GraphSource = take(&mut table, "graph")?
        .ok_or_else(|| usage("no graph given; use --regular, --complete or --mycielski"))?;
    table.remove("output");
    if let Some(k) = table.keys().next() {
        return Err(usage(format!("unknown config key `{k}` for gen-graph")));
    }
    let graph = source.instance(seed).map_err(usage)?;
    let text = graph.to_text();
    let summary = format!(
        "{} vertices, {} edges",
        graph.n_vertices(),
        graph.edges().len()
    );
    match file {
        Some(f) => {
            std::fs::write(&f, &text).map_err(|e| runtime(format!("cannot write {f}: {e}")))?;
            Ok(format!("{summary} -> {f}"))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(runtime(e)),
                _ => {}
            }
            eprintln!("{summary}");
            Ok(String::new())
        }
    }
}
