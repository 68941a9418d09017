//! Dense statevector simulation of the hardware-efficient ansatz.
//!
//! Layout: Hadamard on every qubit, then `L` layers of `RZ` on each qubit,
//! ECR on pairs `(0,1), (2,3), ...` then `(1,2), (3,4), ...`, and `RY` on
//! each qubit. Qubit 0 is the least significant bit of the outcome index.
//! Parameter `layer * 2 * n_qubits + q` drives the `RZ` on qubit `q` and
//! `layer * 2 * n_qubits + n_qubits + q` drives its `RY`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest simulated register.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzShape {
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl AnsatzShape {
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::invalid(format!(
                "ansatz needs at least 2 qubits, got {n_qubits}"
            )));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooLarge(format!(
                "{n_qubits} qubits exceed the simulator cap of {MAX_QUBITS}"
            )));
        }
        Ok(Self { n_qubits, n_layers })
    }

    pub fn n_params(&self) -> usize {
        2 * self.n_qubits * self.n_layers
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                expected: self.n_params(),
                actual: theta.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_rz(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let lo = Complex64::new(c, -s);
        let hi = Complex64::new(c, s);
        let bit = 1 << q;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if i & bit == 0 { lo } else { hi };
        }
    }

    fn apply_ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let bit = 1 << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | bit] = a0 * s + a1 * c;
            }
        }
    }

    /// ECR with `control` as the high bit of the 2-qubit basis index.
    fn apply_ecr(&mut self, control: usize, target: usize) {
        let i_unit = Complex64::new(0.0, 1.0);
        let (cb, tb) = (1 << control, 1 << target);
        for base in 0..self.amplitudes.len() {
            if base & (cb | tb) != 0 {
                continue;
            }
            let idx = [base, base | tb, base | cb, base | cb | tb];
            let [a0, a1, a2, a3] = idx.map(|k| self.amplitudes[k]);
            let out = [
                a1 + i_unit * a3,
                a0 - i_unit * a2,
                i_unit * a1 + a3,
                -i_unit * a0 + a2,
            ];
            for (k, v) in idx.iter().zip(out) {
                self.amplitudes[*k] = v * FRAC_1_SQRT_2;
            }
        }
    }
}

/// Runs the ansatz on `|0...0>`.
pub fn prepare(shape: &AnsatzShape, theta: &[f64]) -> Result<StateVector> {
    shape.check(theta)?;
    let n = shape.n_qubits;
    let amp = Complex64::new((shape.dim() as f64).sqrt().recip(), 0.0);
    let mut state = StateVector {
        amplitudes: vec![amp; shape.dim()],
    };
    for layer in theta.chunks_exact(2 * n) {
        let (rz, ry) = layer.split_at(n);
        for (q, &t) in rz.iter().enumerate() {
            state.apply_rz(q, t);
        }
        for start in [0, 1] {
            for c in (start..n.saturating_sub(1)).step_by(2) {
                state.apply_ecr(c, c + 1);
            }
        }
        for (q, &t) in ry.iter().enumerate() {
            state.apply_ry(q, t);
        }
    }
    Ok(state)
}

pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// Convenience: `probabilities(prepare(shape, theta))`.
pub fn probabilities_at(shape: &AnsatzShape, theta: &[f64]) -> Result<Vec<f64>> {
    Ok(probabilities(&prepare(shape, theta)?))
}

/// Measurement counts; `counts` is sorted by outcome and holds no zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotDistribution {
    counts: Vec<(u64, u64)>,
    total: u64,
}

impl ShotDistribution {
    pub fn from_counts(counts: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut merged = std::collections::BTreeMap::new();
        for (mu, c) in counts {
            *merged.entry(mu).or_insert(0u64) += c;
        }
        let counts: Vec<_> = merged.into_iter().filter(|&(_, c)| c > 0).collect();
        let total = counts.iter().map(|&(_, c)| c).sum();
        if total == 0 {
            return Err(Error::invalid("shot distribution needs at least one shot"));
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[(u64, u64)] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, mu: u64) -> u64 {
        self.counts
            .binary_search_by_key(&mu, |&(m, _)| m)
            .map_or(0, |i| self.counts[i].1)
    }
}

/// `n_shots` multinomial draws from `probs`, as a chain of conditional
/// binomials. Deterministic for a given seed.
pub fn sample_probabilities(probs: &[f64], n_shots: u64, seed: u64) -> Result<ShotDistribution> {
    if n_shots == 0 {
        return Err(Error::invalid("need at least one shot"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining_mass: f64 = probs.iter().sum();
    let mut remaining = n_shots;
    let mut counts = Vec::new();
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (mu, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let k = if mu == last {
            remaining
        } else {
            let ratio = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining, ratio)
                .map_err(|e| Error::NonFinite(format!("binomial draw: {e}")))?
                .sample(&mut rng)
        };
        if k > 0 {
            counts.push((mu as u64, k));
        }
        remaining -= k;
        remaining_mass -= p;
    }
    Ok(ShotDistribution {
        counts,
        total: n_shots,
    })
}

pub fn sample(state: &StateVector, n_shots: u64, seed: u64) -> Result<ShotDistribution> {
    sample_probabilities(&probabilities(state), n_shots, seed)
}

fn shifted(theta: &[f64], j: usize, delta: f64) -> Vec<f64> {
    let mut t = theta.to_vec();
    t[j] += delta;
    t
}

/// `dP/dtheta_j = (P(theta_j + pi/2) - P(theta_j - pi/2)) / 2`.
pub fn prob_jacobian_column(shape: &AnsatzShape, theta: &[f64], j: usize) -> Result<Vec<f64>> {
    shape.check(theta)?;
    if j >= theta.len() {
        return Err(Error::OutOfRange(format!(
            "parameter index {j} >= {}",
            theta.len()
        )));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let plus = probabilities_at(shape, &shifted(theta, j, half_pi))?;
    let minus = probabilities_at(shape, &shifted(theta, j, -half_pi))?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| 0.5 * (a - b))
        .collect())
}

/// `sum_mu w_mu dP_mu/dtheta_j` for every `j` in one reverse sweep.
///
/// Gives the same numbers as contracting `w` with every
/// [`prob_jacobian_column`], at the cost of about three circuit runs instead
/// of `2 * n_params`.
pub fn weighted_prob_gradient(shape: &AnsatzShape, theta: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if w.len() != shape.dim() {
        return Err(Error::DimensionMismatch {
            expected: shape.dim(),
            actual: w.len(),
        });
    }
    let mut phi = prepare(shape, theta)?;
    let mut lambda = StateVector {
        amplitudes: phi.amplitudes.iter().zip(w).map(|(a, &x)| a * x).collect(),
    };
    let n = shape.n_qubits;
    let mut grad = vec![0.0; theta.len()];
    // d/dtheta of <psi|W|psi> through exp(-i theta G / 2) is Im<lambda|G phi>
    // with both vectors taken right after the gate.
    for (l, layer) in theta.chunks_exact(2 * n).enumerate().rev() {
        let (rz, ry) = layer.split_at(n);
        for q in (0..n).rev() {
            let bit = 1 << q;
            let mut acc = 0.0;
            for i in 0..phi.amplitudes.len() {
                if i & bit == 0 {
                    let (p0, p1) = (phi.amplitudes[i], phi.amplitudes[i | bit]);
                    let (l0, l1) = (lambda.amplitudes[i], lambda.amplitudes[i | bit]);
                    // Y maps (p0, p1) to (-i p1, i p0)
                    acc += (l0.conj() * Complex64::new(0.0, -1.0) * p1
                        + l1.conj() * Complex64::new(0.0, 1.0) * p0)
                        .im;
                }
            }
            grad[l * 2 * n + n + q] = acc;
            phi.apply_ry(q, -ry[q]);
            lambda.apply_ry(q, -ry[q]);
        }
        for start in [1, 0] {
            let pairs: Vec<usize> = (start..n.saturating_sub(1)).step_by(2).collect();
            for &c in pairs.iter().rev() {
                phi.apply_ecr(c, c + 1);
                lambda.apply_ecr(c, c + 1);
            }
        }
        for q in (0..n).rev() {
            let bit = 1 << q;
            let mut acc = 0.0;
            for (i, (p, lm)) in phi.amplitudes.iter().zip(&lambda.amplitudes).enumerate() {
                let z = if i & bit == 0 { 1.0 } else { -1.0 };
                acc += z * (lm.conj() * p).im;
            }
            grad[l * 2 * n + q] = acc;
            phi.apply_rz(q, -rz[q]);
            lambda.apply_rz(q, -rz[q]);
        }
    }
    Ok(grad)
}

/// Shifted parameter vectors `(theta + pi/2 e_j, theta - pi/2 e_j)`.
pub(crate) fn shift_pair(theta: &[f64], j: usize) -> (Vec<f64>, Vec<f64>) {
    let half_pi = std::f64::consts::FRAC_PI_2;
    (shifted(theta, j, half_pi), shifted(theta, j, -half_pi))
}
