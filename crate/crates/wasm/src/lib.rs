//! Browser bindings for the static demo page in `www/`.
//!
//! Results cross the boundary as JSON strings or `Float64Array`s.

use qlsearch::auxiliary::{q_from_p, TransformParams};
use qlsearch::baselines::brute_force;
use qlsearch::harness::{random_regular_graph, Weights};
use qlsearch::model::{approximation_ratio, build_maxcut};
use qlsearch::optimizer::{solve, EncodingChoice, InitPolicy, SolverConfig};
use qlsearch::recovery::{top_s, FlipProbabilities};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest graph the demo will solve; the exact optimum is brute-forced.
pub const MAX_DEMO_VERTICES: usize = 16;

/// `q(P)` at `points` evenly spaced values of `P` in `[0, p_max]`.
#[wasm_bindgen]
pub fn q_curve(alpha: f64, m_scale: f64, p_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    q_curve_impl(alpha, m_scale, p_max, points).map_err(|e| JsError::new(&e))
}

/// The `s` most probable flip configurations of independent variables with
/// flip probabilities `p`, as a JSON array of `{flips, probability}`.
#[wasm_bindgen]
pub fn top_configurations(p: Vec<f64>, s: usize) -> Result<String, JsError> {
    top_impl(&p, s).map_err(|e| JsError::new(&e))
}

/// Solves MaxCut on a random `degree`-regular graph with `U[-1, 1]` weights
/// and reports the result next to the exact optimum.
#[wasm_bindgen]
pub fn solve_maxcut(
    n: usize,
    degree: usize,
    r: usize,
    layers: usize,
    seed: u64,
) -> Result<String, JsError> {
    solve_impl(n, degree, r, layers, seed).map_err(|e| JsError::new(&e))
}

fn q_curve_impl(alpha: f64, m_scale: f64, p_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let params = TransformParams::new(alpha, m_scale).map_err(|e| e.to_string())?;
    if !(p_max > 0.0 && p_max <= 1.0) || points < 2 {
        return Err("need 0 < p_max <= 1 and at least 2 points".into());
    }
    let step = p_max / (points - 1) as f64;
    Ok((0..points)
        .map(|i| q_from_p(i as f64 * step, &params).0)
        .collect())
}

fn top_impl(p: &[f64], s: usize) -> Result<String, String> {
    let probs = FlipProbabilities::new(p.iter().enumerate().map(|(i, &v)| (i as u64, v)))
        .map_err(|e| e.to_string())?;
    let ranked = top_s(&probs, s).map_err(|e| e.to_string())?;
    serde_json::to_string(&ranked).map_err(|e| e.to_string())
}

fn solve_impl(
    n: usize,
    degree: usize,
    r: usize,
    layers: usize,
    seed: u64,
) -> Result<String, String> {
    if n > MAX_DEMO_VERTICES {
        return Err(format!(
            "the demo solves at most {MAX_DEMO_VERTICES} vertices"
        ));
    }
    let graph =
        random_regular_graph(n, degree, Weights::Uniform, seed).map_err(|e| e.to_string())?;
    let model = build_maxcut(&graph);
    let config = SolverConfig {
        r,
        encoding: EncodingChoice::Connected,
        layers,
        alpha: 4.0,
        samples: 4,
        rounds: 10,
        init: InitPolicy::Random,
        seed,
        ..Default::default()
    };
    let out = solve(&model, &config).map_err(|e| e.to_string())?;
    let optimum = brute_force(&model).map_err(|e| e.to_string())?.1;
    let energy = out.best_energy();
    let side: Vec<u8> = out.best_solution().to_binary();
    let edges: Vec<_> = graph
        .edges()
        .iter()
        .map(|e| json!([e.u, e.v, e.w]))
        .collect();
    Ok(json!({
        "n": n,
        "edges": edges,
        "side": side,
        "energy": energy,
        "optimum": optimum,
        "eta": approximation_ratio(energy, optimum).ok(),
        "rounds": out.rounds(),
        "history": out.history.iter().map(|r| r.best_energy).collect::<Vec<_>>(),
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_starts_at_one_and_decreases() {
        let q = q_curve_impl(3.0, 8.0, 0.5, 51).unwrap();
        assert_eq!(q.len(), 51);
        assert_eq!(q[0], 1.0);
        assert!(q.windows(2).all(|w| w[1] <= w[0]));
        assert!(q[50] < -0.99);
        assert!(q_curve_impl(3.0, 8.0, 0.0, 10).is_err());
    }

    #[test]
    fn top_configurations_are_ranked() {
        let v: serde_json::Value =
            serde_json::from_str(&top_impl(&[0.9, 0.2], 4).unwrap()).unwrap();
        let flips: Vec<_> = v
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["flips"].clone())
            .collect();
        assert_eq!(
            flips,
            vec![json!([0]), json!([0, 1]), json!([]), json!([1])]
        );
        assert!(top_impl(&[1.5], 1).is_err());
    }

    #[test]
    fn small_solve_reports_a_valid_ratio() {
        let v: serde_json::Value =
            serde_json::from_str(&solve_impl(8, 3, 1, 3, 1).unwrap()).unwrap();
        let eta = v["eta"].as_f64().unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&eta), "{eta}");
        assert_eq!(v["side"].as_array().unwrap().len(), 8);
        assert!(solve_impl(40, 3, 1, 3, 1).is_err());
    }
}
