//! Turning optimized `q` values back into spin vectors.
//!
//! Each auxiliary variable is an independent Bernoulli flip with
//! `p = (1 - q) / 2`. [`top_s`] lists the `S` most probable joint
//! configurations; [`recover_best`] decodes them and keeps the lowest energy.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::auxiliary::{AuxiliaryObjective, QVector};
use crate::error::{Error, Result};
use crate::model::SpinVector;
use crate::neighborhood::GroupEncoding;

/// Sparse flip probabilities; absent outcomes have `p = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FlipProbabilities {
    entries: Vec<(u64, f64)>,
}

impl FlipProbabilities {
    pub fn new(entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut entries: Vec<(u64, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("duplicate flip probability entry"));
        }
        if let Some(&(mu, p)) = entries.iter().find(|e| !(0.0..=1.0).contains(&e.1)) {
            return Err(Error::OutOfRange(format!("p[{mu}] = {p} outside [0, 1]")));
        }
        Ok(Self { entries })
    }

    pub fn from_q(q: &QVector) -> Self {
        Self {
            entries: q
                .entries()
                .iter()
                .map(|&(mu, q)| (mu, ((1.0 - q) / 2.0).clamp(0.0, 1.0)))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }
}

/// One configuration: the variables with `z = -1` and its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedConfig {
    pub flips: Vec<u64>,
    pub probability: f64,
}

/// Tie order between equally probable configurations: compare the flip
/// indicators variable by variable in increasing outcome order; at the first
/// variable where they differ, the configuration that does not flip it
/// comes first.
pub fn tie_order(a: &[u64], b: &[u64]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                // `a` flips x and `b` does not
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            },
        }
    }
}

struct Partial {
    /// Indices into the deviation list, ascending.
    devs: Vec<usize>,
    /// Flip ratios of `devs`, ascending, so equal multisets give equal products.
    ratios: Vec<f64>,
    prob: f64,
    /// Absolute flip set restricted to processed variables plus fixed flips.
    flips: Vec<u64>,
}

fn product(base: f64, ratios: &[f64]) -> f64 {
    ratios.iter().fold(base, |acc, &g| acc * g)
}

/// The `s` most probable configurations, probability non-increasing, ties
/// in [`tie_order`].
///
/// Variables with `p = 0` never flip and variables with `p = 1` always flip;
/// neither branches. For the rest, the most probable state flips exactly when
/// `p > 0.5`, and deviating from it scales the probability by
/// `g = min(p, 1-p) / max(p, 1-p) <= 1`. Variables are added one at a time
/// and only the best `s` partial configurations survive each step; since
/// every `g <= 1`, a pruned branch cannot outrank a kept one.
pub fn top_s(p: &FlipProbabilities, s: usize) -> Result<Vec<RankedConfig>> {
    if s == 0 {
        return Err(Error::invalid("S must be at least 1"));
    }
    let mut base = 1.0;
    let mut fixed: Vec<u64> = Vec::new();
    // (outcome, flipped in the most probable state, g)
    let mut vars: Vec<(u64, bool, f64)> = Vec::new();
    for &(mu, pk) in &p.entries {
        if pk == 0.0 {
            continue;
        }
        if pk == 1.0 {
            fixed.push(mu);
            continue;
        }
        let flip = pk > 0.5;
        let (hi, lo) = if flip { (pk, 1.0 - pk) } else { (1.0 - pk, pk) };
        base *= hi;
        vars.push((mu, flip, lo / hi));
    }

    let mut partials = vec![Partial {
        devs: Vec::new(),
        ratios: Vec::new(),
        prob: base,
        flips: Vec::new(),
    }];
    for (v, &(mu, flip, g)) in vars.iter().enumerate() {
        let mut next = Vec::with_capacity(2 * partials.len());
        for part in partials {
            let mut dev = Partial {
                devs: part.devs.clone(),
                ratios: part.ratios.clone(),
                prob: 0.0,
                flips: part.flips.clone(),
            };
            dev.devs.push(v);
            let at = dev.ratios.partition_point(|&x| x < g);
            dev.ratios.insert(at, g);
            dev.prob = product(base, &dev.ratios);
            if !flip {
                dev.flips.push(mu);
            }
            let mut keep = part;
            if flip {
                keep.flips.push(mu);
            }
            next.push(keep);
            next.push(dev);
        }
        next.sort_by(|a, b| {
            b.prob
                .total_cmp(&a.prob)
                .then_with(|| tie_order(&a.flips, &b.flips))
        });
        next.truncate(s);
        partials = next;
    }

    Ok(partials
        .into_iter()
        .map(|part| {
            let mut flips = part.flips;
            flips.extend_from_slice(&fixed);
            flips.sort_unstable();
            RankedConfig {
                flips,
                probability: part.prob,
            }
        })
        .collect())
}

/// `Z_i = Z0_i * (-1)^{number of flipped groups containing i}`.
pub fn decode_solution(
    flips: &[u64],
    encoding: &GroupEncoding,
    z0: &SpinVector,
) -> Result<SpinVector> {
    if z0.len() != encoding.n_spins() {
        return Err(Error::DimensionMismatch {
            expected: encoding.n_spins(),
            actual: z0.len(),
        });
    }
    let mut z = z0.clone();
    for &mu in flips {
        let g = encoding.decode(mu).ok_or(Error::Decode(mu))?;
        for &i in g.members() {
            z.flip(i);
        }
    }
    Ok(z)
}

/// Result of decoding the `S` most probable configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovered {
    pub solution: SpinVector,
    pub energy: f64,
    /// Position of the winner in the probability ranking.
    pub rank: usize,
    /// Best energy among the first `k + 1` configurations, for each `k`.
    pub best_prefix: Vec<f64>,
}

/// Decodes the `s` most probable configurations of `q` and keeps the one
/// with the lowest energy (the earliest on ties).
pub fn recover_best(obj: &AuxiliaryObjective, q: &QVector, s: usize) -> Result<Recovered> {
    let mut entries = Vec::with_capacity(q.len());
    for &(mu, qv) in q.entries() {
        if obj.group(mu).is_some() {
            entries.push((mu, ((1.0 - qv) / 2.0).clamp(0.0, 1.0)));
        }
    }
    let ranked = top_s(&FlipProbabilities { entries }, s)?;
    let mut best: Option<(SpinVector, f64, usize)> = None;
    let mut best_prefix = Vec::with_capacity(ranked.len());
    for (rank, cfg) in ranked.iter().enumerate() {
        let mut z = obj.z0().clone();
        for &mu in &cfg.flips {
            let g = obj.group(mu).ok_or(Error::Decode(mu))?;
            for &i in g.members() {
                z.flip(i);
            }
        }
        let e = obj.model().energy(&z)?;
        if best.as_ref().is_none_or(|b| e < b.1) {
            best = Some((z, e, rank));
        }
        best_prefix.push(best.as_ref().expect("set above").1);
    }
    let (solution, energy, rank) = best.expect("top_s returns at least one configuration");
    Ok(Recovered {
        solution,
        energy,
        rank,
        best_prefix,
    })
}
