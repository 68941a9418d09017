//! Classical reference solvers: incremental group flips, first-improvement
//! local search, the bilinear relaxation and exhaustive search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PolynomialModel, SpinVector};
use crate::neighborhood::{size_lex_cmp, Group};

/// Improvements smaller than this are not accepted as moves.
const IMPROVE_EPS: f64 = 1e-12;

/// Largest model handled by [`brute_force`].
pub const BRUTE_FORCE_MAX_SPINS: usize = 24;

/// `E(Z with G flipped) - E(Z)`, touching only terms that meet `G`.
///
/// A term changes sign iff it shares an odd number of spins with `G`, so the
/// increment is `-2 * sum` of those terms' current values.
pub fn delta_flip(model: &PolynomialModel, z: &SpinVector, g: &Group) -> Result<f64> {
    if z.len() != model.n_spins() {
        return Err(Error::DimensionMismatch {
            expected: model.n_spins(),
            actual: z.len(),
        });
    }
    if let Some(&bad) = g.members().iter().find(|&&i| i >= model.n_spins()) {
        return Err(Error::OutOfRange(format!(
            "group member {bad} >= {}",
            model.n_spins()
        )));
    }
    Ok(delta_unchecked(model, z.as_slice(), g.members()))
}

pub(crate) fn delta_unchecked(model: &PolynomialModel, z: &[i8], members: &[usize]) -> f64 {
    let terms = model.terms();
    let mut delta = 0.0;
    if let [i] = members {
        for &t in model.incident_terms(*i) {
            delta += term_value(&terms[t].vars, terms[t].coeff, z);
        }
        return -2.0 * delta;
    }
    let mut touched: Vec<usize> = members
        .iter()
        .flat_map(|&i| model.incident_terms(i).iter().copied())
        .collect();
    touched.sort_unstable();
    touched.dedup();
    for t in touched {
        let term = &terms[t];
        let overlap = term
            .vars
            .iter()
            .filter(|i| members.binary_search(i).is_ok())
            .count();
        if overlap % 2 == 1 {
            delta += term_value(&term.vars, term.coeff, z);
        }
    }
    -2.0 * delta
}

fn term_value(vars: &[usize], coeff: f64, z: &[i8]) -> f64 {
    vars.iter()
        .fold(coeff, |acc, &i| if z[i] < 0 { -acc } else { acc })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchResult {
    pub solution: SpinVector,
    pub energy: f64,
    /// Accepted moves.
    pub steps: usize,
    /// Group flips evaluated.
    pub evaluations: usize,
}

/// First-improvement local search: scan `groups` in size-then-lexicographic
/// order, apply the first flip that lowers the energy, and rescan from the
/// first group. Stops after a full scan without improvement.
pub fn local_search(
    model: &PolynomialModel,
    z0: &SpinVector,
    groups: &[Group],
) -> Result<LocalSearchResult> {
    let mut z = z0.clone();
    model.energy(&z)?;
    let mut order: Vec<&Group> = groups.iter().collect();
    order.sort_by(|a, b| size_lex_cmp(a, b));
    for g in &order {
        if let Some(&bad) = g.members().iter().find(|&&i| i >= model.n_spins()) {
            return Err(Error::OutOfRange(format!(
                "group member {bad} >= {}",
                model.n_spins()
            )));
        }
    }
    let mut steps = 0;
    let mut evaluations = 0;
    'scan: loop {
        for g in &order {
            evaluations += 1;
            let d = delta_unchecked(model, z.as_slice(), g.members());
            if d < -IMPROVE_EPS {
                for &i in g.members() {
                    z.flip(i);
                }
                steps += 1;
                continue 'scan;
            }
        }
        break;
    }
    let energy = model.energy(&z)?;
    Ok(LocalSearchResult {
        solution: z,
        energy,
        steps,
        evaluations,
    })
}

/// Minimizes the bilinear relaxation over `[-1, 1]^n` by projected gradient
/// descent with Armijo backtracking, then rounds by sign (0 maps to +1).
pub fn optimize_bilinear(model: &PolynomialModel, q0: &[f64]) -> Result<(SpinVector, f64)> {
    let n = model.n_spins();
    if q0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: q0.len(),
        });
    }
    if !model.is_quadratic() {
        return Err(Error::invalid(
            "bilinear relaxation needs a model without higher-order terms",
        ));
    }
    if q0.iter().any(|v| !v.is_finite() || v.abs() > 1.0) {
        return Err(Error::OutOfRange(
            "starting point must lie in [-1, 1]^n".into(),
        ));
    }
    let value = |q: &[f64]| -> f64 {
        model
            .terms()
            .iter()
            .map(|t| t.vars.iter().fold(t.coeff, |acc, &i| acc * q[i]))
            .sum()
    };
    let grad = |q: &[f64], g: &mut [f64]| {
        g.fill(0.0);
        for t in model.terms() {
            match t.vars.as_slice() {
                [i] => g[*i] += t.coeff,
                [i, j] => {
                    g[*i] += t.coeff * q[*j];
                    g[*j] += t.coeff * q[*i];
                }
                _ => unreachable!("quadratic model"),
            }
        }
    };
    let project = |x: f64| x.clamp(-1.0, 1.0);

    let mut q = q0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = value(&q);
    let mut step = 1.0;
    for _ in 0..10_000 {
        grad(&q, &mut g);
        let mut accepted = false;
        let mut t = step;
        while t > 1e-14 {
            let cand: Vec<f64> = q.iter().zip(&g).map(|(x, d)| project(x - t * d)).collect();
            let moved: f64 = cand.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
            if moved == 0.0 {
                break;
            }
            let fc = value(&cand);
            if fc <= f - 1e-4 / t * moved {
                q = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (t * 2.0).min(1e6);
    }
    let z = SpinVector::new(q.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect())?;
    let e = model.energy(&z)?;
    Ok((z, e))
}

/// Exhaustive minimum over all `2^n` spin vectors.
///
/// Gray-code order with incremental single-spin deltas; ties within 1e-9
/// go to the lexicographically smallest vector (-1 before +1), and the
/// winner's energy is recomputed directly.
pub fn brute_force(model: &PolynomialModel) -> Result<(SpinVector, f64)> {
    let n = model.n_spins();
    if n > BRUTE_FORCE_MAX_SPINS {
        return Err(Error::TooLarge(format!(
            "brute force limited to {BRUTE_FORCE_MAX_SPINS} spins, got {n}"
        )));
    }
    let mut z = vec![1i8; n];
    let mut e = model.energy_unchecked(&z);
    let mut best = z.clone();
    let mut best_e = e;
    for k in 1u64..1 << n {
        let i = k.trailing_zeros() as usize;
        e += delta_unchecked(model, &z, &[i]);
        z[i] = -z[i];
        if e < best_e - 1e-9 || (e <= best_e + 1e-9 && z < best) {
            best_e = e;
            best.copy_from_slice(&z);
        }
    }
    let best = SpinVector::new(best)?;
    let e = model.energy(&best)?;
    Ok((best, e))
}
