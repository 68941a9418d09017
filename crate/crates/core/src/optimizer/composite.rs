use std::sync::atomic::{AtomicU64, Ordering};

use super::Shots;
use crate::auxiliary::{q_from_p, AuxiliaryObjective, QVector, TransformParams};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, par_map};
use crate::simulator::{
    prepare, probabilities, sample, shift_pair, weighted_prob_gradient, AnsatzShape,
    ShotDistribution,
};

/// Circuit width used for an objective: the encoding's qubit count, but at
/// least 2 so the entangling layer exists.
pub fn circuit_width(obj: &AuxiliaryObjective) -> usize {
    obj.encoding().n_qubits().max(2)
}

/// The objective as a function of circuit parameters, `E[q(P(theta))]`.
///
/// Holds the list of outcomes that decode to a group so repeated
/// evaluations skip the codec.
pub struct Composite<'a> {
    obj: &'a AuxiliaryObjective,
    shape: AnsatzShape,
    params: TransformParams,
    valid: Vec<u64>,
    shots_used: AtomicU64,
}

impl<'a> Composite<'a> {
    pub fn new(
        obj: &'a AuxiliaryObjective,
        shape: AnsatzShape,
        params: TransformParams,
    ) -> Result<Self> {
        if shape.n_qubits < obj.encoding().n_qubits() {
            return Err(Error::invalid(format!(
                "circuit has {} qubits but the encoding needs {}",
                shape.n_qubits,
                obj.encoding().n_qubits()
            )));
        }
        let valid = (0..shape.dim() as u64)
            .filter(|&mu| obj.group(mu).is_some())
            .collect();
        Ok(Self {
            obj,
            shape,
            params,
            valid,
            shots_used: AtomicU64::new(0),
        })
    }

    pub fn shape(&self) -> &AnsatzShape {
        &self.shape
    }

    pub fn objective(&self) -> &AuxiliaryObjective {
        self.obj
    }

    /// Circuit executions so far times shots per execution.
    pub fn shots_used(&self) -> u64 {
        self.shots_used.load(Ordering::Relaxed)
    }

    fn run(&self, theta: &[f64], n: u64, seed: u64) -> Result<ShotDistribution> {
        self.shots_used.fetch_add(n, Ordering::Relaxed);
        sample(&prepare(&self.shape, theta)?, n, seed)
    }

    /// `q` (and `dq/dP`) over every decodable outcome from a dense `P`.
    fn q_dense(&self, probs: &[f64]) -> Result<(QVector, Vec<f64>)> {
        let mut entries = Vec::with_capacity(self.valid.len());
        let mut dq = Vec::with_capacity(self.valid.len());
        for &mu in &self.valid {
            let (q, d) = q_from_p(probs[mu as usize], &self.params);
            entries.push((mu, q));
            dq.push(d);
        }
        Ok((QVector::new(entries)?, dq))
    }

    /// `q` over the given outcomes from shot frequencies; unobserved outcomes
    /// get `P = 0`.
    fn q_sparse(&self, shots: &ShotDistribution, support: &[u64]) -> Result<(QVector, Vec<f64>)> {
        let total = shots.total() as f64;
        let mut entries = Vec::with_capacity(support.len());
        let mut dq = Vec::with_capacity(support.len());
        for &mu in support {
            let (q, d) = q_from_p(shots.count(mu) as f64 / total, &self.params);
            entries.push((mu, q));
            dq.push(d);
        }
        Ok((QVector::new(entries)?, dq))
    }

    fn decodable(&self, mu: u64) -> bool {
        self.valid.binary_search(&mu).is_ok()
    }

    /// The `q` vector that recovery reads: exact, or from `N` fresh shots.
    pub fn q_vector(&self, theta: &[f64], shots: Shots, seed: u64) -> Result<QVector> {
        match shots {
            Shots::Exact => Ok(self
                .q_dense(&probabilities(&prepare(&self.shape, theta)?))?
                .0),
            Shots::Finite(n) => {
                let dist = self.run(theta, n, seed)?;
                let support: Vec<u64> = dist
                    .counts()
                    .iter()
                    .map(|e| e.0)
                    .filter(|&mu| self.decodable(mu))
                    .collect();
                Ok(self.q_sparse(&dist, &support)?.0)
            }
        }
    }

    pub fn eval(&self, theta: &[f64], shots: Shots, seed: u64) -> Result<f64> {
        self.obj.eval(&self.q_vector(theta, shots, seed)?)
    }

    /// Value and gradient over `theta` by the chain rule. In exact mode the
    /// contraction with `dP/dtheta` runs as one reverse sweep over the
    /// circuit. In shot mode `dP/dtheta` comes from parameter shifts: every
    /// circuit (base and each shift) is sampled with its own sub-seed, and
    /// the objective gradient is taken over the union of observed outcomes.
    pub fn value_and_grad(
        &self,
        theta: &[f64],
        shots: Shots,
        seed: u64,
    ) -> Result<(f64, Vec<f64>)> {
        let n_params = self.shape.n_params();
        match shots {
            Shots::Exact => {
                let probs = probabilities(&prepare(&self.shape, theta)?);
                let (q, dq) = self.q_dense(&probs)?;
                let (value, g) = self.obj.value_and_grad(&q)?;
                let mut w = vec![0.0; self.shape.dim()];
                for ((&(mu, _), gk), dk) in q.entries().iter().zip(&g).zip(&dq) {
                    w[mu as usize] = gk * dk;
                }
                let grad = weighted_prob_gradient(&self.shape, theta, &w)?;
                Ok((value, grad))
            }
            Shots::Finite(n) => {
                let base = self.run(theta, n, derive_seed(seed, 0))?;
                let shifted = par_map(n_params, |j| {
                    let (plus, minus) = shift_pair(theta, j);
                    let p = self.run(&plus, n, derive_seed(seed, 1 + 2 * j as u64))?;
                    let m = self.run(&minus, n, derive_seed(seed, 2 + 2 * j as u64))?;
                    Ok((p, m))
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
                let mut support: Vec<u64> = base.counts().iter().map(|e| e.0).collect();
                for (p, m) in &shifted {
                    support.extend(p.counts().iter().map(|e| e.0));
                    support.extend(m.counts().iter().map(|e| e.0));
                }
                support.sort_unstable();
                support.dedup();
                support.retain(|&mu| self.decodable(mu));

                let (q, dq) = self.q_sparse(&base, &support)?;
                let (_, g) = self.obj.value_and_grad(&q)?;
                // the reported value only counts observed outcomes, which
                // equals the full-support value since q = 1 elsewhere
                let value = self.obj.eval(&q)?;
                let w: Vec<f64> = g.iter().zip(&dq).map(|(a, b)| a * b).collect();
                let nf = n as f64;
                let grad = shifted
                    .iter()
                    .map(|(p, m)| {
                        support
                            .iter()
                            .zip(&w)
                            .map(|(&mu, wk)| {
                                wk * 0.5 * (p.count(mu) as f64 - m.count(mu) as f64) / nf
                            })
                            .sum()
                    })
                    .collect();
                Ok((value, grad))
            }
        }
    }
}

/// One-off evaluation; see [`Composite::eval`].
pub fn composite_eval(
    obj: &AuxiliaryObjective,
    shape: &AnsatzShape,
    theta: &[f64],
    shots: Shots,
    params: &TransformParams,
    seed: u64,
) -> Result<f64> {
    Composite::new(obj, *shape, *params)?.eval(theta, shots, seed)
}

/// One-off gradient; see [`Composite::value_and_grad`].
pub fn composite_grad(
    obj: &AuxiliaryObjective,
    shape: &AnsatzShape,
    theta: &[f64],
    shots: Shots,
    params: &TransformParams,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(Composite::new(obj, *shape, *params)?
        .value_and_grad(theta, shots, seed)?
        .1)
}
