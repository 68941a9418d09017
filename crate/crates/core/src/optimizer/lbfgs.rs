use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::OptimizeResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNewtonOptions {
    pub max_iters: usize,
    /// Stop when the largest gradient component falls below this.
    pub grad_tol: f64,
    /// Stop when `(f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1)` falls below this.
    pub rel_tol: f64,
    /// Number of stored correction pairs.
    pub memory: usize,
}

impl Default for QuasiNewtonOptions {
    fn default() -> Self {
        Self {
            max_iters: 15_000,
            grad_tol: 1e-8,
            rel_tol: 1e-12,
            memory: 10,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + alpha * b).collect()
}

fn check_finite(f: f64, g: &[f64]) -> Result<()> {
    if !f.is_finite() {
        return Err(Error::NonFinite(format!("objective value {f}")));
    }
    if let Some(i) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("gradient component {i}")));
    }
    Ok(())
}

struct Point {
    alpha: f64,
    f: f64,
    g: Vec<f64>,
    slope: f64,
}

/// Minimizer of the cubic through two points with known slopes, or the
/// midpoint when it falls outside the bracket.
fn cubic_step(lo: &Point, hi: &Point) -> f64 {
    let d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (lo.alpha - hi.alpha);
    let disc = d1 * d1 - lo.slope * hi.slope;
    let mid = 0.5 * (lo.alpha + hi.alpha);
    if disc < 0.0 {
        return mid;
    }
    let d2 = (hi.alpha - lo.alpha).signum() * disc.sqrt();
    let t =
        hi.alpha - (hi.alpha - lo.alpha) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
    let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
    let margin = 0.1 * (b - a);
    if t.is_finite() && t > a + margin && t < b - margin {
        t
    } else {
        mid
    }
}

/// Strong Wolfe line search (bracketing then zoom). Returns `None` when no
/// acceptable step is found within the evaluation budget.
fn line_search<F>(
    fg: &mut F,
    x: &[f64],
    f0: f64,
    slope0: f64,
    d: &[f64],
    alpha0: f64,
    evals: &mut usize,
) -> Result<Option<Point>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    const MAX_EVALS: usize = 30;

    let mut probe = |alpha: f64, evals: &mut usize| -> Result<Point> {
        let (f, g) = fg(&axpy(x, alpha, d))?;
        *evals += 1;
        check_finite(f, &g)?;
        let slope = dot(&g, d);
        Ok(Point { alpha, f, g, slope })
    };

    let mut prev = Point {
        alpha: 0.0,
        f: f0,
        g: Vec::new(),
        slope: slope0,
    };
    let mut alpha = alpha0;
    let mut used = 0;
    let (mut lo, mut hi) = loop {
        let cur = probe(alpha, evals)?;
        used += 1;
        if cur.f > f0 + C1 * alpha * slope0 || (used > 1 && cur.f >= prev.f) {
            break (prev, cur);
        }
        if cur.slope.abs() <= -C2 * slope0 {
            return Ok(Some(cur));
        }
        if cur.slope >= 0.0 {
            break (cur, prev);
        }
        if used >= MAX_EVALS {
            return Ok(Some(cur));
        }
        prev = cur;
        alpha *= 2.0;
    };

    while used < MAX_EVALS {
        if (hi.alpha - lo.alpha).abs() <= 1e-16 * lo.alpha.abs().max(1.0) {
            break;
        }
        let trial = cubic_step(&lo, &hi);
        let cur = probe(trial, evals)?;
        used += 1;
        if cur.f > f0 + C1 * trial * slope0 || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.slope.abs() <= -C2 * slope0 {
                return Ok(Some(cur));
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    // Accept the best sufficient-decrease point if the curvature test never passed.
    if lo.alpha > 0.0 && lo.f < f0 {
        return Ok(Some(lo));
    }
    Ok(None)
}

/// Limited-memory BFGS with a strong Wolfe line search over unbounded
/// parameters. Returns the best point seen.
pub fn minimize_quasi_newton<F>(
    mut fg: F,
    theta0: &[f64],
    opts: &QuasiNewtonOptions,
) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut x = theta0.to_vec();
    let (mut f, mut g) = fg(&x)?;
    check_finite(f, &g)?;
    let mut evaluations = 1;
    let mut best = (x.clone(), f);
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gmax < opts.grad_tol {
            break;
        }
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 || !slope.is_finite() {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let alpha0 = if mem.is_empty() {
            (1.0 / dot(&g, &g).sqrt()).min(1.0)
        } else {
            1.0
        };
        let mut found = line_search(&mut fg, &x, f, slope, &d, alpha0, &mut evaluations)?;
        if found.is_none() && !mem.is_empty() {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
            let alpha0 = (1.0 / slope.abs().sqrt()).min(1.0);
            found = line_search(&mut fg, &x, f, slope, &d, alpha0, &mut evaluations)?;
        }
        let Some(step) = found else { break };
        iterations += 1;

        let x_new = axpy(&x, step.alpha, &d);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if mem.len() == opts.memory.max(1) {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        let rel = (f - step.f) / f.abs().max(step.f.abs()).max(1.0);
        x = x_new;
        f = step.f;
        g = step.g;
        if f < best.1 {
            best = (x.clone(), f);
        }
        if rel <= opts.rel_tol {
            break;
        }
    }
    Ok(OptimizeResult {
        theta: best.0,
        value: best.1,
        iterations,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let c = [1.5, -2.0, 0.25];
        let r = minimize_quasi_newton(
            |x| {
                let f = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                let g = x.iter().zip(&c).map(|(a, b)| 2.0 * (a - b)).collect();
                Ok((f, g))
            },
            &[0.0; 3],
            &QuasiNewtonOptions::default(),
        )
        .unwrap();
        for (a, b) in r.theta.iter().zip(&c) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    fn rosenbrock(x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ];
        Ok((f, g))
    }

    #[test]
    fn rosenbrock_from_standard_start() {
        let r = minimize_quasi_newton(rosenbrock, &[-1.2, 1.0], &QuasiNewtonOptions::default())
            .unwrap();
        assert!(
            (r.theta[0] - 1.0).abs() < 1e-4 && (r.theta[1] - 1.0).abs() < 1e-4,
            "{:?}",
            r.theta
        );
    }

    #[test]
    fn zero_budget_returns_start() {
        let opts = QuasiNewtonOptions {
            max_iters: 0,
            ..Default::default()
        };
        let r = minimize_quasi_newton(rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(r.theta, vec![-1.2, 1.0]);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn non_finite_aborts() {
        let r = minimize_quasi_newton(
            |_| Ok((f64::NAN, vec![0.0])),
            &[0.0],
            &QuasiNewtonOptions::default(),
        );
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
