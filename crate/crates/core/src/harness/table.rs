use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentSpec;
use crate::error::{Error, Result};
use crate::optimizer::{Shots, SolverConfig};

/// One measurement. Columns not meaningful for an experiment stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub kind: String,
    pub row: usize,
    pub repetition: usize,
    pub seed: u64,
    pub solver: String,
    pub r: usize,
    pub encoding: String,
    pub layers: usize,
    pub alpha: f64,
    /// Transform scale; empty when it defaults to the number of spins.
    pub m_scale: Option<f64>,
    pub shots: Shots,
    pub samples: usize,
    pub rounds_cap: usize,
    pub optimizer: String,
    pub n_qubits: usize,
    /// Shots behind one estimate (MSE and QPU rows).
    pub estimate_shots: Option<u64>,
    pub exact_value: Option<f64>,
    pub mse: Option<f64>,
    pub energy: Option<f64>,
    pub optimum: Option<f64>,
    pub eta: Option<f64>,
    pub rounds: Option<usize>,
    pub shots_used: Option<u64>,
    pub conflicts: Option<usize>,
    pub success: Option<bool>,
    pub error: Option<String>,
    /// Kept out of the CSV so tables are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

fn kebab<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(serde_json::Value::Object(m)) => m
            .get("kind")
            .and_then(|k| k.as_str())
            .unwrap_or("custom")
            .to_string(),
        _ => String::new(),
    }
}

impl ResultRow {
    pub fn new(
        spec: &ExperimentSpec,
        config: &SolverConfig,
        repetition: usize,
        seed: u64,
        solver: &str,
    ) -> Self {
        Self {
            experiment: spec.id.clone(),
            kind: spec.experiment.name().to_string(),
            row: 0,
            repetition,
            seed,
            solver: solver.to_string(),
            r: config.r,
            encoding: kebab(&config.encoding),
            layers: config.layers,
            alpha: config.alpha,
            m_scale: config.m_scale,
            shots: config.shots,
            samples: config.samples,
            rounds_cap: config.rounds,
            optimizer: kebab(&config.optimizer),
            n_qubits: 0,
            estimate_shots: None,
            exact_value: None,
            mse: None,
            energy: None,
            optimum: None,
            eta: None,
            rounds: None,
            shots_used: None,
            conflicts: None,
            success: None,
            error: None,
            wall_time_ms: 0.0,
        }
    }

    /// Rows sharing a key belong to the same configuration.
    fn key(&self) -> String {
        format!(
            "{}|r={}|{}|L={}|a={}|M={}|N={}|S={}|R={}|{}|n={}",
            self.solver,
            self.r,
            self.encoding,
            self.layers,
            self.alpha,
            self.m_scale.map_or("n".into(), |m| m.to_string()),
            self.shots,
            self.samples,
            self.rounds_cap,
            self.optimizer,
            self.estimate_shots.map_or("-".into(), |n| n.to_string()),
        )
    }
}

/// Aggregate over the repetitions of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub key: String,
    pub runs: usize,
    pub errors: usize,
    pub mean_energy: Option<f64>,
    pub mean_eta: Option<f64>,
    pub mean_mse: Option<f64>,
    pub success_rate: Option<f64>,
    pub min_conflicts: Option<usize>,
    /// Sorted approximation ratios, ready for an empirical CDF.
    pub etas: Vec<f64>,
}

/// Layer count at which a quantum configuration first matches classical
/// local search of the same `r`, for benchmarks that sweep `layers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerMatch {
    /// The quantum configuration key without its layer count.
    pub key: String,
    pub r: usize,
    pub classical_mean_eta: f64,
    /// First `L` whose mean ratio is at least the classical mean.
    pub layers: Option<usize>,
    /// Mean ratio per layer count, ascending in `L`.
    pub curve: Vec<(usize, f64)>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub rows: Vec<ResultRow>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)
                .map_err(|e| Error::invalid(format!("CSV encoding: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::invalid(format!("CSV encoding: {e}")))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    /// Per-configuration aggregates, ordered by key.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut groups: BTreeMap<String, Vec<&ResultRow>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry(r.key()).or_default().push(r);
        }
        groups
            .into_iter()
            .map(|(key, rows)| {
                let ok: Vec<&&ResultRow> = rows.iter().filter(|r| r.error.is_none()).collect();
                let energies: Vec<f64> = ok.iter().filter_map(|r| r.energy).collect();
                let mses: Vec<f64> = ok.iter().filter_map(|r| r.mse).collect();
                let mut etas: Vec<f64> = ok.iter().filter_map(|r| r.eta).collect();
                etas.sort_by(f64::total_cmp);
                let successes: Vec<bool> = ok.iter().filter_map(|r| r.success).collect();
                SummaryRow {
                    key,
                    runs: rows.len(),
                    errors: rows.len() - ok.len(),
                    mean_energy: mean(&energies),
                    mean_eta: mean(&etas),
                    mean_mse: mean(&mses),
                    success_rate: (!successes.is_empty()).then(|| {
                        successes.iter().filter(|&&s| s).count() as f64 / successes.len() as f64
                    }),
                    min_conflicts: ok.iter().filter_map(|r| r.conflicts).min(),
                    etas,
                }
            })
            .collect()
    }

    /// Threshold layer counts for every quantum configuration that has a
    /// local-search reference at the same `r`.
    pub fn layers_to_match(&self) -> Vec<LayerMatch> {
        let ok = |r: &&ResultRow| r.error.is_none() && r.eta.is_some();
        let mut classical: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for row in self
            .rows
            .iter()
            .filter(ok)
            .filter(|r| r.solver == "local-search")
        {
            classical.entry(row.r).or_default().extend(row.eta);
        }
        let mut curves: BTreeMap<(String, usize), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
        for row in self
            .rows
            .iter()
            .filter(ok)
            .filter(|r| r.solver == "quantum")
        {
            let key = row.key().replace(&format!("|L={}|", row.layers), "|");
            curves
                .entry((key, row.r))
                .or_default()
                .entry(row.layers)
                .or_default()
                .extend(row.eta);
        }
        curves
            .into_iter()
            .filter_map(|((key, r), by_layers)| {
                let classical_mean_eta = mean(classical.get(&r)?)?;
                let curve: Vec<(usize, f64)> = by_layers
                    .into_iter()
                    .filter_map(|(l, etas)| Some((l, mean(&etas)?)))
                    .collect();
                let layers = curve
                    .iter()
                    .find(|(_, m)| *m >= classical_mean_eta)
                    .map(|(l, _)| *l);
                Some(LayerMatch {
                    key,
                    r,
                    classical_mean_eta,
                    layers,
                    curve,
                })
            })
            .collect()
    }

    /// Writes `<id>.csv`, the `<id>.json` sidecar (spec and summary) and
    /// `<id>.timing.csv` (wall times, not reproducible) into `dir`.
    pub fn write(&self, spec: &ExperimentSpec, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |p: &Path, e: std::io::Error| {
            Error::invalid(format!("cannot write {}: {e}", p.display()))
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let csv_path = dir.join(format!("{}.csv", spec.id));
        std::fs::write(&csv_path, self.to_csv()?).map_err(|e| io(&csv_path, e))?;

        let mut sidecar = serde_json::json!({ "spec": spec, "summary": self.summary() });
        let matches = self.layers_to_match();
        if !matches.is_empty() {
            sidecar["layers_to_match"] = serde_json::json!(matches);
        }
        let json_path = dir.join(format!("{}.json", spec.id));
        let text = serde_json::to_string_pretty(&sidecar).expect("JSON values serialize");
        std::fs::write(&json_path, text + "\n").map_err(|e| io(&json_path, e))?;

        let mut timing = String::from("row,wall_time_ms\n");
        for r in &self.rows {
            timing.push_str(&format!("{},{:.3}\n", r.row, r.wall_time_ms));
        }
        let timing_path = dir.join(format!("{}.timing.csv", spec.id));
        std::fs::write(&timing_path, timing).map_err(|e| io(&timing_path, e))?;
        Ok(vec![csv_path, json_path, timing_path])
    }
}
