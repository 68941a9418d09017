use rand::Rng;
use serde::{Deserialize, Serialize};

use super::OptimizeResult;
use crate::error::Result;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsaOptions {
    pub iters: usize,
    pub a: f64,
    pub c: f64,
    /// Stability offset; `None` means `iters / 10`.
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for SpsaOptions {
    fn default() -> Self {
        Self {
            iters: 1000,
            a: 0.15,
            c: 0.1,
            big_a: None,
            alpha: 0.602,
            gamma: 0.101,
        }
    }
}

/// Simultaneous perturbation stochastic approximation.
///
/// `f(theta, k)` receives a distinct evaluation index `k` so stochastic
/// objectives can derive independent noise per call. Each iteration
/// evaluates `f` at the current point and at `theta +/- c_k * delta` with a
/// Rademacher `delta`; the best observed point is returned. Non-finite
/// evaluations skip the update.
pub fn minimize_spsa<F>(
    mut f: F,
    theta0: &[f64],
    opts: &SpsaOptions,
    seed: u64,
) -> Result<OptimizeResult>
where
    F: FnMut(&[f64], u64) -> Result<f64>,
{
    let mut theta = theta0.to_vec();
    let mut best = (theta.clone(), f64::INFINITY);
    let mut rng = stream_rng(seed, 0);
    let big_a = opts.big_a.unwrap_or(opts.iters as f64 / 10.0);
    let mut calls = 0u64;
    let mut eval = |x: &[f64], calls: &mut u64| -> Result<f64> {
        let v = f(x, *calls)?;
        *calls += 1;
        Ok(v)
    };
    for k in 0..opts.iters {
        let fk = eval(&theta, &mut calls)?;
        if fk.is_finite() && fk < best.1 {
            best = (theta.clone(), fk);
        }
        let ak = opts.a / (k as f64 + 1.0 + big_a).powf(opts.alpha);
        let ck = opts.c / (k as f64 + 1.0).powf(opts.gamma);
        let delta: Vec<f64> = (0..theta.len())
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let fp = eval(&plus, &mut calls)?;
        let fm = eval(&minus, &mut calls)?;
        for (x, fx) in [(&plus, fp), (&minus, fm)] {
            if fx.is_finite() && fx < best.1 {
                best = (x.clone(), fx);
            }
        }
        if !(fp.is_finite() && fm.is_finite()) {
            continue;
        }
        let scale = (fp - fm) / (2.0 * ck);
        for (t, d) in theta.iter_mut().zip(&delta) {
            *t -= ak * scale * d;
        }
    }
    if opts.iters == 0 {
        return Ok(OptimizeResult {
            theta,
            value: f64::NAN,
            iterations: 0,
            evaluations: 0,
        });
    }
    let fk = eval(&theta, &mut calls)?;
    if fk.is_finite() && fk < best.1 {
        best = (theta.clone(), fk);
    }
    Ok(OptimizeResult {
        theta: best.0,
        value: best.1,
        iterations: opts.iters,
        evaluations: calls as usize,
    })
}
