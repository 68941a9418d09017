use rand::Rng;
use serde::{Deserialize, Serialize};

use super::composite::{circuit_width, Composite};
use super::lbfgs::{minimize_quasi_newton, QuasiNewtonOptions};
use super::spsa::{minimize_spsa, SpsaOptions};
use super::{OptimizeResult, Shots};
use crate::auxiliary::{AuxiliaryObjective, TransformParams};
use crate::error::{Error, Result};
use crate::model::{PolynomialModel, SpinVector};
use crate::neighborhood::{
    coloring_swap_groups, enumerate_connected, enumerate_full, full_neighborhood_size, Group,
    GroupEncoding, MATERIALIZATION_CAP,
};
use crate::recovery::recover_best;
use crate::rng::{derive_seed, stream_rng};
use crate::simulator::AnsatzShape;

/// Which flip groups the circuit encodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EncodingChoice {
    /// All subsets of size `<= r`, listed explicitly while the list fits in
    /// memory and unranked on the fly beyond that.
    Full,
    Unranked,
    BaseN,
    /// Neighbor walks on the interaction graph.
    Sparse,
    Bitmask,
    /// Connected subsets of size `<= r` of the interaction graph, listed.
    Connected,
    /// Color swaps for one-hot coloring with `k` colors per vertex.
    ColoringSwap {
        k: usize,
    },
    Groups {
        groups: Vec<Group>,
    },
}

/// Starting solution of the first round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitPolicy {
    AllOnes,
    Random,
    /// One random color per vertex for `k`-coloring layouts.
    RandomOneHot {
        k: usize,
    },
    Given {
        spins: Vec<i8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    QuasiNewton,
    Spsa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Largest group size.
    pub r: usize,
    pub encoding: EncodingChoice,
    pub layers: usize,
    /// Shots per objective estimate during optimization.
    pub shots: Shots,
    /// Shots for the final `q` estimate; `None` reuses `shots`.
    pub final_shots: Option<Shots>,
    pub alpha: f64,
    /// Transform scale `M`; `None` uses the number of spins.
    pub m_scale: Option<f64>,
    /// Most probable configurations decoded per round.
    pub samples: usize,
    /// Round cap.
    pub rounds: usize,
    pub optimizer: OptimizerKind,
    pub quasi_newton: QuasiNewtonOptions,
    pub spsa: SpsaOptions,
    pub init: InitPolicy,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r: 1,
            encoding: EncodingChoice::Full,
            layers: 4,
            shots: Shots::Exact,
            final_shots: None,
            alpha: 2.0,
            m_scale: None,
            samples: 1,
            rounds: 1,
            optimizer: OptimizerKind::QuasiNewton,
            quasi_newton: QuasiNewtonOptions::default(),
            spsa: SpsaOptions::default(),
            init: InitPolicy::AllOnes,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.layers == 0 || self.samples == 0 || self.rounds == 0 {
            return Err(Error::invalid(
                "r, layers, samples and rounds must all be at least 1",
            ));
        }
        if let Some(m) = self.m_scale {
            TransformParams::new(self.alpha, m)?;
        } else {
            TransformParams::new(self.alpha, 1.0)?;
        }
        Ok(())
    }

    pub fn transform(&self, n_spins: usize) -> Result<TransformParams> {
        TransformParams::new(self.alpha, self.m_scale.unwrap_or(n_spins as f64))
    }
}

pub fn build_encoding(model: &PolynomialModel, config: &SolverConfig) -> Result<GroupEncoding> {
    let n = model.n_spins();
    let r = config.r;
    match &config.encoding {
        EncodingChoice::Full => {
            if r > n {
                return Err(Error::invalid(format!("r = {r} exceeds n = {n}")));
            }
            if full_neighborhood_size(n, r) <= MATERIALIZATION_CAP.into() {
                GroupEncoding::explicit(n, enumerate_full(n, r)?)
            } else {
                GroupEncoding::unranked(n, r)
            }
        }
        EncodingChoice::Unranked => GroupEncoding::unranked(n, r),
        EncodingChoice::BaseN => GroupEncoding::base_n(n, r),
        EncodingChoice::Sparse => GroupEncoding::sparse(&model.interaction_graph(), r),
        EncodingChoice::Bitmask => GroupEncoding::bitmask(n),
        EncodingChoice::Connected => {
            GroupEncoding::explicit(n, enumerate_connected(&model.interaction_graph(), r)?)
        }
        EncodingChoice::ColoringSwap { k } => {
            if *k == 0 || !n.is_multiple_of(*k) {
                return Err(Error::invalid(format!(
                    "{n} spins do not split into blocks of {k} colors"
                )));
            }
            GroupEncoding::explicit(n, coloring_swap_groups(n / k, *k)?)
        }
        EncodingChoice::Groups { groups } => GroupEncoding::explicit(n, groups.clone()),
    }
}

/// First-round solution; random policies draw from stream 0 of `seed`.
pub fn initial_solution(n: usize, init: &InitPolicy, seed: u64) -> Result<SpinVector> {
    let mut rng = stream_rng(seed, 0);
    match init {
        InitPolicy::AllOnes => Ok(SpinVector::all_ones(n)),
        InitPolicy::Random => SpinVector::new(
            (0..n)
                .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
                .collect(),
        ),
        InitPolicy::RandomOneHot { k } => {
            if *k == 0 || !n.is_multiple_of(*k) {
                return Err(Error::invalid(format!(
                    "{n} spins do not split into blocks of {k} colors"
                )));
            }
            let mut bits = vec![0u8; n];
            for v in 0..n / k {
                bits[v * k + rng.random_range(0..*k)] = 1;
            }
            SpinVector::from_binary(&bits)
        }
        InitPolicy::Given { spins } => {
            if spins.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: spins.len(),
                });
            }
            SpinVector::new(spins.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundResult {
    /// 1-based round number.
    pub round: usize,
    /// Best solution found so far.
    pub best_solution: SpinVector,
    pub best_energy: f64,
    /// Energy of this round's recovered solution.
    pub recovered_energy: f64,
    /// Rank of the recovered configuration among the decoded ones.
    pub recovered_rank: usize,
    pub improved: bool,
    pub theta_final: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Shots spent this round, including the final estimate.
    pub shots_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    /// Last round; its best fields are the overall result.
    pub result: RoundResult,
    pub history: Vec<RoundResult>,
}

impl SolveOutcome {
    pub fn best_solution(&self) -> &SpinVector {
        &self.result.best_solution
    }

    pub fn best_energy(&self) -> f64 {
        self.result.best_energy
    }

    pub fn rounds(&self) -> usize {
        self.history.len()
    }

    pub fn shots_used(&self) -> u64 {
        self.history.iter().map(|r| r.shots_used).sum()
    }
}

fn optimize(
    c: &Composite,
    config: &SolverConfig,
    theta0: &[f64],
    seed: u64,
) -> Result<OptimizeResult> {
    let shots = config.shots;
    match config.optimizer {
        OptimizerKind::QuasiNewton => {
            let mut call = 0u64;
            minimize_quasi_newton(
                |theta| {
                    call += 1;
                    c.value_and_grad(theta, shots, derive_seed(seed, call))
                },
                theta0,
                &config.quasi_newton,
            )
        }
        OptimizerKind::Spsa => minimize_spsa(
            |theta, k| c.eval(theta, shots, derive_seed(seed, k + 1)),
            theta0,
            &config.spsa,
            derive_seed(seed, 0),
        ),
    }
}

/// Rounds of compile, optimize and recover. Each round re-anchors at the
/// best solution so far; the loop stops at the first round that does not
/// strictly improve it, or after `config.rounds`.
pub fn solve(model: &PolynomialModel, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let n = model.n_spins();
    let encoding = build_encoding(model, config)?;
    let params = config.transform(n)?;
    let final_shots = config.final_shots.unwrap_or(config.shots);

    let mut z0 = initial_solution(n, &config.init, config.seed)?;
    let mut best_energy = model.energy(&z0)?;
    let mut history = Vec::new();
    for round in 1..=config.rounds {
        let seed = derive_seed(config.seed, round as u64);
        let obj = AuxiliaryObjective::compile(model, &z0, &encoding)?;
        let shape = AnsatzShape::new(circuit_width(&obj), config.layers)?;
        let composite = Composite::new(&obj, shape, params)?;

        let mut rng = stream_rng(seed, 0);
        let theta0: Vec<f64> = (0..shape.n_params())
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        let opt = optimize(&composite, config, &theta0, derive_seed(seed, 1))?;
        let q = composite.q_vector(&opt.theta, final_shots, derive_seed(seed, 2))?;
        let rec = recover_best(&obj, &q, config.samples)?;

        let improved = rec.energy < best_energy - 1e-12;
        if improved {
            z0 = rec.solution;
            best_energy = model.energy(&z0)?;
        }
        history.push(RoundResult {
            round,
            best_solution: z0.clone(),
            best_energy,
            recovered_energy: rec.energy,
            recovered_rank: rec.rank,
            improved,
            theta_final: opt.theta,
            objective_value: opt.value,
            iterations: opt.iterations,
            evaluations: opt.evaluations,
            shots_used: composite.shots_used(),
        });
        if !improved {
            break;
        }
    }
    let result = history.last().cloned().expect("at least one round");
    Ok(SolveOutcome { result, history })
}
