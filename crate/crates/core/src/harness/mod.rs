//! Reproducible experiments over seeds and hyperparameter sweeps.
//!
//! Every experiment is a pure function of its [`ExperimentSpec`]: each job
//! draws randomness only from streams derived from the master seed, jobs run
//! in a work pool, and rows are collected back in job order.

pub mod generators;
mod table;

use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auxiliary::{q_vector_from_shots, AuxiliaryObjective};
use crate::baselines::{brute_force, local_search, optimize_bilinear, BRUTE_FORCE_MAX_SPINS};
use crate::error::{Error, Result};
use crate::model::{
    approximation_ratio, build_graph_coloring, build_maxcut, coloring_conflicts,
    default_coloring_penalty, parse_graph, qubo_to_ising, Graph, PolynomialModel,
};
use crate::neighborhood::enumerate_full;
use crate::optimizer::{
    build_encoding, circuit_width, initial_solution, solve, Composite, EncodingChoice, InitPolicy,
    OptimizerKind, Shots, SolverConfig,
};
use crate::recovery::recover_best;
use crate::rng::{derive_seed, par_map, stream_rng};
use crate::simulator::{prepare, probabilities, sample_probabilities, AnsatzShape};

pub use generators::{complete_graph, mycielski, mycielskian, random_regular_graph, Weights};
pub use table::{LayerMatch, ResultRow, SummaryRow, Table};

/// Stream reserved for instance generation.
const GRAPH_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSource {
    File {
        path: PathBuf,
    },
    RandomRegular {
        n: usize,
        d: usize,
        #[serde(default)]
        weights: Weights,
    },
    Complete {
        n: usize,
        #[serde(default)]
        weights: Weights,
    },
    Mycielski {
        k: usize,
    },
}

impl GraphSource {
    pub fn build(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
                parse_graph(&text)
            }
            GraphSource::RandomRegular { n, d, weights } => {
                random_regular_graph(*n, *d, *weights, seed)
            }
            GraphSource::Complete { n, weights } => complete_graph(*n, *weights, seed),
            GraphSource::Mycielski { k } => mycielski(*k),
        }
    }

    /// The instance an experiment with master seed `master` runs on.
    pub fn instance(&self, master: u64) -> Result<Graph> {
        self.build(derive_seed(master, GRAPH_STREAM))
    }
}

/// Lists of values swept over; an empty list keeps the base config's value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub r: Vec<usize>,
    pub layers: Vec<usize>,
    pub alpha: Vec<f64>,
    pub m_scale: Vec<f64>,
    pub samples: Vec<usize>,
    pub shots: Vec<Shots>,
}

impl Sweep {
    /// Cartesian product over the non-empty lists, in field order.
    pub fn configs(&self, base: &SolverConfig) -> Vec<SolverConfig> {
        fn expand<T: Clone>(
            out: Vec<SolverConfig>,
            values: &[T],
            set: impl Fn(&mut SolverConfig, T),
        ) -> Vec<SolverConfig> {
            if values.is_empty() {
                return out;
            }
            out.iter()
                .flat_map(|c| {
                    values.iter().map(|v| {
                        let mut c = c.clone();
                        set(&mut c, v.clone());
                        c
                    })
                })
                .collect()
        }
        let mut out = vec![base.clone()];
        out = expand(out, &self.r, |c, v| c.r = v);
        out = expand(out, &self.layers, |c, v| c.layers = v);
        out = expand(out, &self.alpha, |c, v| c.alpha = v);
        out = expand(out, &self.m_scale, |c, v| c.m_scale = Some(v));
        out = expand(out, &self.samples, |c, v| c.samples = v);
        out = expand(out, &self.shots, |c, v| c.shots = v);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Quantum,
    LocalSearch,
    Bilinear,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Quantum => "quantum",
            SolverKind::LocalSearch => "local-search",
            SolverKind::Bilinear => "bilinear",
        }
    }
}

fn default_estimates() -> usize {
    1000
}

fn default_solvers() -> Vec<SolverKind> {
    vec![SolverKind::Quantum, SolverKind::LocalSearch]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Mean squared error of shot estimates of the objective at a random
    /// circuit, per shot count.
    Mse {
        shots: Vec<u64>,
        #[serde(default = "default_estimates")]
        estimates: usize,
    },
    /// MaxCut runs of the chosen solvers; approximation ratios use the
    /// exhaustive optimum when the graph is small enough.
    Benchmark {
        #[serde(default = "default_solvers")]
        solvers: Vec<SolverKind>,
    },
    /// One-hot `k`-coloring with color-swap groups from random colorings.
    Coloring { k: usize, lambda: Option<f64> },
    /// Shot-based optimization, then best-of-`S` recovery for each `S` in
    /// `samples`, from a final shot estimate (and optionally the exact `q`).
    QpuEmulation {
        samples: Vec<usize>,
        final_shots: Option<u64>,
        #[serde(default)]
        compare_exact: bool,
    },
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Mse { .. } => "mse",
            ExperimentKind::Benchmark { .. } => "bench",
            ExperimentKind::Coloring { .. } => "coloring",
            ExperimentKind::QpuEmulation { .. } => "qpu-sim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: String,
    pub experiment: ExperimentKind,
    pub graph: GraphSource,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: Sweep,
    pub repetitions: usize,
    pub seed: u64,
    /// Where the CLI writes the table; not used by the runners.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions must be at least 1"));
        }
        let empty = match &self.experiment {
            ExperimentKind::Mse { shots, estimates } => shots.is_empty() || *estimates == 0,
            ExperimentKind::Benchmark { solvers } => solvers.is_empty(),
            ExperimentKind::Coloring { .. } => false,
            ExperimentKind::QpuEmulation { samples, .. } => {
                samples.is_empty() || samples.contains(&0)
            }
        };
        if empty {
            return Err(Error::invalid("sweep lists must be non-empty"));
        }
        for c in self.sweep.configs(&self.solver) {
            c.validate()?;
        }
        Ok(())
    }

    pub fn instance(&self) -> Result<Graph> {
        self.graph.instance(self.seed)
    }
}

/// Runs whichever experiment the spec describes.
pub fn run(spec: &ExperimentSpec) -> Result<Table> {
    match spec.experiment {
        ExperimentKind::Mse { .. } => run_mse_experiment(spec),
        ExperimentKind::Benchmark { .. } => run_benchmark(spec),
        ExperimentKind::Coloring { .. } => run_coloring(spec),
        ExperimentKind::QpuEmulation { .. } => run_qpu_emulation(spec),
    }
}

fn optimum(model: &PolynomialModel) -> Result<Option<f64>> {
    if model.n_spins() <= BRUTE_FORCE_MAX_SPINS {
        Ok(Some(brute_force(model)?.1))
    } else {
        Ok(None)
    }
}

fn eta(energy: f64, opt: Option<f64>) -> Option<f64> {
    opt.and_then(|o| approximation_ratio(energy, o).ok())
}

struct Job<T> {
    config: SolverConfig,
    repetition: usize,
    seed: u64,
    extra: T,
}

/// Runs every job in the pool and flattens the rows in job order. A failing
/// job yields one row carrying the error.
fn execute<T: Sync>(
    spec: &ExperimentSpec,
    jobs: Vec<Job<T>>,
    work: impl Fn(&Job<T>) -> Result<Vec<ResultRow>> + Sync + Send,
) -> Table {
    let results = par_map(jobs.len(), |i| {
        let job = &jobs[i];
        let start = Instant::now();
        let out = work(job);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match out {
            Ok(mut rows) => {
                for r in &mut rows {
                    r.wall_time_ms = ms;
                }
                rows
            }
            Err(e) => {
                let mut row = ResultRow::new(spec, &job.config, job.repetition, job.seed, "error");
                row.error = Some(e.to_string());
                row.wall_time_ms = ms;
                vec![row]
            }
        }
    });
    let mut rows: Vec<ResultRow> = results.into_iter().flatten().collect();
    for (i, r) in rows.iter_mut().enumerate() {
        r.row = i;
    }
    Table { rows }
}

/// Exact objective at a random circuit versus its shot estimates.
pub fn run_mse_experiment(spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let ExperimentKind::Mse { shots, estimates } = &spec.experiment else {
        return Err(Error::invalid("not an MSE experiment"));
    };
    let model = build_maxcut(&spec.instance()?);
    let mut jobs = Vec::new();
    for config in spec.sweep.configs(&spec.solver) {
        for rep in 0..spec.repetitions {
            let seed = derive_seed(spec.seed, jobs.len() as u64);
            jobs.push(Job {
                config: config.clone(),
                repetition: rep,
                seed,
                extra: (),
            });
        }
    }
    Ok(execute(spec, jobs, |job| {
        let config = &job.config;
        let encoding = build_encoding(&model, config)?;
        let z0 = initial_solution(model.n_spins(), &config.init, job.seed)?;
        let obj = AuxiliaryObjective::compile(&model, &z0, &encoding)?;
        let params = config.transform(model.n_spins())?;
        let shape = AnsatzShape::new(circuit_width(&obj), config.layers)?;
        let mut rng = stream_rng(job.seed, 1);
        let theta: Vec<f64> = (0..shape.n_params())
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        let probs = probabilities(&prepare(&shape, &theta)?);
        let exact = Composite::new(&obj, shape, params)?.eval(&theta, Shots::Exact, 0)?;
        let mut rows = Vec::with_capacity(shots.len());
        for &n in shots {
            let n_seed = derive_seed(job.seed, 2 + n);
            let errs = par_map(*estimates, |i| {
                let dist = sample_probabilities(&probs, n, derive_seed(n_seed, i as u64))?;
                let est = obj.eval(&q_vector_from_shots(&dist, &params, obj.encoding()))?;
                Ok((est - exact).powi(2))
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            let mut row = ResultRow::new(spec, config, job.repetition, job.seed, "mse");
            row.n_qubits = shape.n_qubits;
            row.estimate_shots = Some(n);
            row.exact_value = Some(exact);
            row.mse = Some(errs.iter().sum::<f64>() / errs.len() as f64);
            rows.push(row);
        }
        Ok(rows)
    }))
}

/// Groups a classical local search uses for the same neighborhood.
fn classical_groups(
    model: &PolynomialModel,
    config: &SolverConfig,
) -> Result<Vec<crate::neighborhood::Group>> {
    let encoding = build_encoding(model, config)?;
    match encoding.groups() {
        Some(g) => Ok(g.to_vec()),
        None => enumerate_full(model.n_spins(), config.r),
    }
}

/// Solver comparison on MaxCut. Repetition `k` uses the same initial
/// solution for every solver and config.
pub fn run_benchmark(spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let ExperimentKind::Benchmark { solvers } = &spec.experiment else {
        return Err(Error::invalid("not a benchmark experiment"));
    };
    let model = build_maxcut(&spec.instance()?);
    let opt = optimum(&model)?;
    let n = model.n_spins();
    let mut jobs = Vec::new();
    for config in spec.sweep.configs(&spec.solver) {
        for &solver in solvers {
            for rep in 0..spec.repetitions {
                let seed = derive_seed(spec.seed, rep as u64);
                let config = SolverConfig {
                    seed,
                    ..config.clone()
                };
                jobs.push(Job {
                    config,
                    repetition: rep,
                    seed,
                    extra: solver,
                });
            }
        }
    }
    Ok(execute(spec, jobs, |job| {
        let config = &job.config;
        let mut row = ResultRow::new(spec, config, job.repetition, job.seed, job.extra.name());
        let energy = match job.extra {
            SolverKind::Quantum => {
                let out = solve(&model, config)?;
                row.rounds = Some(out.rounds());
                row.shots_used = Some(out.shots_used());
                row.n_qubits = circuit_width(&AuxiliaryObjective::compile(
                    &model,
                    out.best_solution(),
                    &build_encoding(&model, config)?,
                )?);
                out.best_energy()
            }
            SolverKind::LocalSearch => {
                let z0 = initial_solution(n, &config.init, config.seed)?;
                let res = local_search(&model, &z0, &classical_groups(&model, config)?)?;
                row.rounds = Some(res.steps);
                res.energy
            }
            SolverKind::Bilinear => {
                let mut rng = stream_rng(config.seed, 3);
                let q0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                optimize_bilinear(&model, &q0)?.1
            }
        };
        row.energy = Some(energy);
        row.optimum = opt;
        row.eta = eta(energy, opt);
        Ok(vec![row])
    }))
}

/// Coloring runs from random one-hot colorings with color-swap groups.
pub fn run_coloring(spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let ExperimentKind::Coloring { k, lambda } = spec.experiment else {
        return Err(Error::invalid("not a coloring experiment"));
    };
    let graph = spec.instance()?;
    let lambda = lambda.unwrap_or_else(|| default_coloring_penalty(&graph));
    let model = qubo_to_ising(&build_graph_coloring(&graph, k, lambda)?);
    let mut jobs = Vec::new();
    for config in spec.sweep.configs(&spec.solver) {
        for rep in 0..spec.repetitions {
            let seed = derive_seed(spec.seed, rep as u64);
            let config = SolverConfig {
                seed,
                encoding: EncodingChoice::ColoringSwap { k },
                init: InitPolicy::RandomOneHot { k },
                ..config.clone()
            };
            jobs.push(Job {
                config,
                repetition: rep,
                seed,
                extra: (),
            });
        }
    }
    Ok(execute(spec, jobs, |job| {
        let out = solve(&model, &job.config)?;
        let objective = model.objective(out.best_solution())?;
        let mut row = ResultRow::new(spec, &job.config, job.repetition, job.seed, "quantum");
        row.n_qubits = circuit_width(&AuxiliaryObjective::compile(
            &model,
            out.best_solution(),
            &build_encoding(&model, &job.config)?,
        )?);
        row.energy = Some(objective);
        row.optimum = Some(0.0);
        row.rounds = Some(out.rounds());
        row.shots_used = Some(out.shots_used());
        row.conflicts = coloring_conflicts(&graph, out.best_solution(), k);
        row.success = Some(objective.abs() < 1e-9);
        Ok(vec![row])
    }))
}

/// Shot-noise optimization followed by best-of-`S` recovery.
pub fn run_qpu_emulation(spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let ExperimentKind::QpuEmulation {
        samples,
        final_shots,
        compare_exact,
    } = &spec.experiment
    else {
        return Err(Error::invalid("not a QPU emulation experiment"));
    };
    let model = build_maxcut(&spec.instance()?);
    let opt = optimum(&model)?;
    let s_max = *samples.iter().max().expect("validated non-empty");
    let mut jobs = Vec::new();
    for config in spec.sweep.configs(&spec.solver) {
        for rep in 0..spec.repetitions {
            let seed = derive_seed(spec.seed, rep as u64);
            let config = SolverConfig {
                seed,
                rounds: 1,
                samples: s_max,
                ..config.clone()
            };
            jobs.push(Job {
                config,
                repetition: rep,
                seed,
                extra: (),
            });
        }
    }
    Ok(execute(spec, jobs, |job| {
        let config = &job.config;
        let n_final = match (final_shots, config.shots) {
            (Some(n), _) => *n,
            (None, Shots::Finite(n)) => n,
            (None, Shots::Exact) => {
                return Err(Error::invalid("QPU emulation needs a finite shot count"))
            }
        };
        let out = solve(&model, config)?;
        let z0 = initial_solution(model.n_spins(), &config.init, config.seed)?;
        let encoding = build_encoding(&model, config)?;
        let obj = AuxiliaryObjective::compile(&model, &z0, &encoding)?;
        let shape = AnsatzShape::new(circuit_width(&obj), config.layers)?;
        let composite = Composite::new(&obj, shape, config.transform(model.n_spins())?)?;
        let theta = &out.result.theta_final;

        let mut modes = vec![("shots", Shots::Finite(n_final))];
        if *compare_exact {
            modes.push(("exact", Shots::Exact));
        }
        let mut rows = Vec::new();
        for (name, shots) in modes {
            let q = composite.q_vector(theta, shots, derive_seed(config.seed, 0x5150))?;
            let rec = recover_best(&obj, &q, s_max)?;
            for &s in samples {
                let energy = rec.best_prefix[s.min(rec.best_prefix.len()) - 1];
                let mut row = ResultRow::new(
                    spec,
                    config,
                    job.repetition,
                    job.seed,
                    &format!("qpu-{name}"),
                );
                row.samples = s;
                row.n_qubits = shape.n_qubits;
                row.estimate_shots = match shots {
                    Shots::Finite(n) => Some(n),
                    Shots::Exact => None,
                };
                row.energy = Some(energy);
                row.optimum = opt;
                row.eta = eta(energy, opt);
                row.rounds = Some(1);
                row.shots_used = Some(out.shots_used());
                rows.push(row);
            }
        }
        Ok(rows)
    }))
}

/// Base solver config suited to an experiment kind: random starts for
/// MaxCut, SPSA with shots for the QPU emulation.
pub fn default_solver_for(kind: &ExperimentKind) -> SolverConfig {
    let mut c = SolverConfig {
        init: InitPolicy::Random,
        ..Default::default()
    };
    if let ExperimentKind::QpuEmulation { .. } = kind {
        c.optimizer = OptimizerKind::Spsa;
        c.shots = Shots::Finite(1000);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(experiment: ExperimentKind, graph: GraphSource) -> ExperimentSpec {
        ExperimentSpec {
            id: "t".into(),
            solver: default_solver_for(&experiment),
            experiment,
            graph,
            sweep: Sweep::default(),
            repetitions: 2,
            seed: 3,
            output: None,
        }
    }

    #[test]
    fn sweep_is_cartesian() {
        let sweep = Sweep {
            r: vec![1, 2],
            layers: vec![2, 4, 6],
            ..Default::default()
        };
        let configs = sweep.configs(&SolverConfig::default());
        assert_eq!(configs.len(), 6);
        assert_eq!((configs[0].r, configs[0].layers), (1, 2));
        assert_eq!((configs[5].r, configs[5].layers), (2, 6));
        assert_eq!(Sweep::default().configs(&SolverConfig::default()).len(), 1);
    }

    #[test]
    fn layer_threshold_is_first_matching_l() {
        let s = spec(
            ExperimentKind::Benchmark {
                solvers: vec![SolverKind::Quantum, SolverKind::LocalSearch],
            },
            GraphSource::Complete {
                n: 4,
                weights: Weights::Unit,
            },
        );
        let row = |solver: &str, layers: usize, eta: f64| {
            let config = SolverConfig {
                layers,
                ..s.solver.clone()
            };
            ResultRow {
                eta: Some(eta),
                ..ResultRow::new(&s, &config, 0, 0, solver)
            }
        };
        let mut rows = vec![row("local-search", 2, 0.8), row("local-search", 2, 0.9)];
        for (l, eta) in [(2, 0.5), (2, 0.6), (4, 0.85), (4, 0.87), (6, 0.9), (6, 0.9)] {
            rows.push(row("quantum", l, eta));
        }
        let m = Table { rows }.layers_to_match();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].layers, Some(4));
        assert_eq!(
            m[0].curve.iter().map(|c| c.0).collect::<Vec<_>>(),
            vec![2, 4, 6]
        );
        assert!((m[0].classical_mean_eta - 0.85).abs() < 1e-12);
        assert!(!m[0].key.contains("L="));
    }

    #[test]
    fn mse_rows_per_shot_count() {
        let mut s = spec(
            ExperimentKind::Mse {
                shots: vec![1, 7],
                estimates: 20,
            },
            GraphSource::RandomRegular {
                n: 4,
                d: 1,
                weights: Weights::Unit,
            },
        );
        s.solver.layers = 1;
        let t = run_mse_experiment(&s).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t
            .rows
            .iter()
            .all(|r| r.mse.unwrap() >= 0.0 && r.error.is_none()));
    }

    #[test]
    fn one_hot_distribution_estimates_exactly() {
        let model = build_maxcut(&Graph::unweighted(3, &[(0, 1), (1, 2)]).unwrap());
        let config = SolverConfig::default();
        let obj = AuxiliaryObjective::compile(
            &model,
            &crate::model::SpinVector::all_ones(3),
            &build_encoding(&model, &config).unwrap(),
        )
        .unwrap();
        let params = config.transform(3).unwrap();
        let probs = [0.0, 1.0, 0.0, 0.0];
        let dense: Vec<(u64, f64)> = (0..3)
            .map(|mu| {
                (
                    mu,
                    crate::auxiliary::q_from_p(probs[mu as usize], &params).0,
                )
            })
            .collect();
        let exact = obj
            .eval(&crate::auxiliary::QVector::new(dense).unwrap())
            .unwrap();
        for n in [1, 5, 1000] {
            let dist = sample_probabilities(&probs, n, n).unwrap();
            assert_eq!(
                obj.eval(&q_vector_from_shots(&dist, &params, obj.encoding()))
                    .unwrap(),
                exact
            );
        }
    }

    #[test]
    fn benchmark_is_deterministic_and_complete() {
        let mut s = spec(
            ExperimentKind::Benchmark {
                solvers: vec![
                    SolverKind::Quantum,
                    SolverKind::LocalSearch,
                    SolverKind::Bilinear,
                ],
            },
            GraphSource::RandomRegular {
                n: 8,
                d: 3,
                weights: Weights::Uniform,
            },
        );
        s.solver.layers = 2;
        let a = run_benchmark(&s).unwrap();
        let b = run_benchmark(&s).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.rows.len(), 6);
        for r in &a.rows {
            let e = r.eta.unwrap();
            assert!(e <= 1.0 + 1e-12, "{r:?}");
        }
        let summary = a.summary();
        assert_eq!(summary.len(), 3);
        assert!(summary
            .iter()
            .all(|s| s.etas.windows(2).all(|w| w[0] <= w[1])));
    }

    #[test]
    fn coloring_triangle_with_two_colors_never_succeeds() {
        let mut s = spec(
            ExperimentKind::Coloring { k: 2, lambda: None },
            GraphSource::File {
                path: PathBuf::new(),
            },
        );
        s.graph = GraphSource::Complete {
            n: 3,
            weights: Weights::Unit,
        };
        s.solver.layers = 2;
        s.solver.rounds = 3;
        let t = run_coloring(&s).unwrap();
        assert!(t.rows.iter().all(|r| r.success == Some(false)));
        assert!(t.rows.iter().all(|r| r.energy.unwrap() > 0.0));
    }

    #[test]
    fn qpu_curve_is_monotone() {
        let mut s = spec(
            ExperimentKind::QpuEmulation {
                samples: vec![1, 2, 4, 8],
                final_shots: Some(200),
                compare_exact: true,
            },
            GraphSource::RandomRegular {
                n: 8,
                d: 3,
                weights: Weights::Uniform,
            },
        );
        s.solver.layers = 2;
        s.solver.shots = Shots::Finite(100);
        s.solver.spsa.iters = 20;
        let t = run_qpu_emulation(&s).unwrap();
        assert_eq!(t.rows.len(), 2 * 2 * 4);
        for chunk in t.rows.chunks(4) {
            for w in chunk.windows(2) {
                assert!(w[1].energy.unwrap() <= w[0].energy.unwrap());
            }
        }
    }

    #[test]
    fn failing_jobs_become_error_rows() {
        let mut s = spec(
            ExperimentKind::Benchmark {
                solvers: vec![SolverKind::Quantum],
            },
            GraphSource::RandomRegular {
                n: 6,
                d: 3,
                weights: Weights::Unit,
            },
        );
        s.solver.encoding = EncodingChoice::ColoringSwap { k: 4 };
        let t = run_benchmark(&s).unwrap();
        assert!(t.rows.iter().all(|r| r.error.is_some()));
    }
}
