//! The auxiliary objective over group-flip variables.
//!
//! With `Z_i = Z0_i * prod_{k : i in G_k} z_k`, a model term `J_S prod_S Z_i`
//! becomes `J_S prod_S Z0_i * prod_{k in V(S)} z_k`, where `V(S)` holds the
//! variables whose group meets `S` an odd number of times. Replacing `z_k`
//! by `q_k in [-1, 1]` gives the multilinear extension evaluated here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sign_product, PolynomialModel, SpinVector};
use crate::neighborhood::{Group, GroupEncoding};
use crate::simulator::ShotDistribution;

/// Compiled coefficients below this magnitude are dropped.
const COEFF_EPS: f64 = 1e-15;

/// Groups are cached for every outcome when the register is at most this wide.
const DECODE_CACHE_QUBITS: usize = 16;

/// Sparse assignment of auxiliary variables; absent outcomes read as `q = 1`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QVector {
    entries: Vec<(u64, f64)>,
}

impl QVector {
    /// Entries are sorted by outcome; duplicates and values outside
    /// `[-1, 1]` are rejected.
    pub fn new(entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut entries: Vec<(u64, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(mu, _)| mu);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid(format!(
                    "duplicate q entry for outcome {}",
                    w[0].0
                )));
            }
        }
        for &(mu, q) in &entries {
            if !q.is_finite() {
                return Err(Error::NonFinite(format!("q[{mu}]")));
            }
            if !(-1.0..=1.0).contains(&q) {
                return Err(Error::OutOfRange(format!("q[{mu}] = {q} outside [-1, 1]")));
            }
        }
        Ok(Self { entries })
    }

    /// A ±1 vertex given densely over variables `0..z.len()`.
    pub fn from_vertex(z: &[i8]) -> Result<Self> {
        Self::new(z.iter().enumerate().map(|(k, &v)| (k as u64, f64::from(v))))
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, mu: u64) -> f64 {
        self.entries
            .binary_search_by_key(&mu, |&(m, _)| m)
            .map_or(1.0, |i| self.entries[i].1)
    }
}

/// Hyperparameters of the probability-to-variable transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub alpha: f64,
    pub m_scale: f64,
}

impl TransformParams {
    pub fn new(alpha: f64, m_scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(m_scale > 0.0 && m_scale.is_finite()) {
            return Err(Error::invalid(format!(
                "need alpha > 0 and M > 0, got alpha={alpha}, M={m_scale}"
            )));
        }
        Ok(Self { alpha, m_scale })
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `q = 2 (tanh(a (1 - M P)) + 1) / (tanh a + 1) - 1` and `dq/dP`.
///
/// Evaluated through `tanh x + 1 = 2 sigmoid(2x)` to avoid cancellation.
pub fn q_from_p(p: f64, params: &TransformParams) -> (f64, f64) {
    let TransformParams { alpha, m_scale } = *params;
    let s = sigmoid(2.0 * alpha * (1.0 - m_scale * p));
    let norm = sigmoid(2.0 * alpha);
    let q = 2.0 * s / norm - 1.0;
    let dq = -4.0 * alpha * m_scale * s * (1.0 - s) / norm;
    (q.clamp(-1.0, 1.0), dq)
}

/// `q` for every observed, decodable outcome, with `P = N_mu / N_total`
/// (discarded shots still count toward the total).
pub fn q_vector_from_shots(
    shots: &ShotDistribution,
    params: &TransformParams,
    encoding: &GroupEncoding,
) -> QVector {
    let total = shots.total() as f64;
    let entries = shots
        .counts()
        .iter()
        .filter(|&&(mu, _)| encoding.decode(mu).is_some())
        .map(|&(mu, c)| (mu, q_from_p(c as f64 / total, params).0))
        .collect();
    QVector { entries }
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: f64,
    vars: Vec<u32>,
}

#[derive(Debug, Clone)]
enum Form {
    /// Explicit group list: terms over variables `0..l`.
    Compiled {
        constant: f64,
        terms: Vec<CompiledTerm>,
    },
    /// Implicit codec: terms are built against the support of `q` per call.
    Lazy { cache: Option<Vec<Option<Group>>> },
}

/// The auxiliary objective anchored at `z0`.
#[derive(Debug, Clone)]
pub struct AuxiliaryObjective {
    model: PolynomialModel,
    z0: SpinVector,
    encoding: GroupEncoding,
    /// `J_S prod_S Z0_i` per model term, in model order.
    signed: Vec<f64>,
    form: Form,
}

/// Indices present an odd number of times across the given sorted lists.
fn odd_union(lists: &[&[u32]], scratch: &mut Vec<u32>) -> Vec<u32> {
    match lists {
        [] => Vec::new(),
        [a] => a.to_vec(),
        [a, b] => {
            let mut out = Vec::with_capacity(a.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => {
                        out.push(a[i]);
                        i += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        out.push(b[j]);
                        j += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                }
            }
            out.extend_from_slice(&a[i..]);
            out.extend_from_slice(&b[j..]);
            out
        }
        _ => {
            scratch.clear();
            for l in lists {
                scratch.extend_from_slice(l);
            }
            scratch.sort_unstable();
            let mut out: Vec<u32> = Vec::new();
            for &k in scratch.iter() {
                if out.last() == Some(&k) {
                    out.pop();
                } else {
                    out.push(k);
                }
            }
            out
        }
    }
}

/// Value and gradient of `sum_t c_t prod_{k in V_t} q_k` with prefix/suffix
/// products, so zero entries are handled exactly.
fn multilinear(constant: f64, terms: &[CompiledTerm], q: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let mut value = constant;
    match grad {
        None => {
            for t in terms {
                value += t.coeff * t.vars.iter().map(|&k| q[k as usize]).product::<f64>();
            }
        }
        Some(grad) => {
            let mut prefix = Vec::new();
            for t in terms {
                let m = t.vars.len();
                prefix.clear();
                prefix.push(1.0);
                for &k in &t.vars {
                    let last = *prefix.last().expect("non-empty");
                    prefix.push(last * q[k as usize]);
                }
                value += t.coeff * prefix[m];
                let mut suffix = 1.0;
                for idx in (0..m).rev() {
                    let k = t.vars[idx] as usize;
                    grad[k] += t.coeff * prefix[idx] * suffix;
                    suffix *= q[k];
                }
            }
        }
    }
    value
}

impl AuxiliaryObjective {
    pub fn compile(
        model: &PolynomialModel,
        z0: &SpinVector,
        encoding: &GroupEncoding,
    ) -> Result<Self> {
        let n = model.n_spins();
        if z0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: z0.len(),
            });
        }
        if encoding.n_spins() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: encoding.n_spins(),
            });
        }
        let signed: Vec<f64> = model
            .terms()
            .iter()
            .map(|t| t.coeff * sign_product(z0.as_slice(), &t.vars))
            .collect();
        let form = match encoding.groups() {
            Some(groups) => {
                let mut member_of: Vec<Vec<u32>> = vec![Vec::new(); n];
                for (k, g) in groups.iter().enumerate() {
                    for &i in g.members() {
                        member_of[i].push(k as u32);
                    }
                }
                let mut constant = 0.0;
                let mut terms = Vec::new();
                let mut scratch = Vec::new();
                for (t, &c) in model.terms().iter().zip(&signed) {
                    let lists: Vec<&[u32]> =
                        t.vars.iter().map(|&i| member_of[i].as_slice()).collect();
                    let vars = odd_union(&lists, &mut scratch);
                    if vars.is_empty() {
                        constant += c;
                    } else if c.abs() >= COEFF_EPS {
                        terms.push(CompiledTerm { coeff: c, vars });
                    }
                }
                Form::Compiled { constant, terms }
            }
            None => {
                let cache = (encoding.n_qubits() <= DECODE_CACHE_QUBITS).then(|| {
                    (0..1u64 << encoding.n_qubits())
                        .map(|mu| encoding.decode(mu))
                        .collect()
                });
                Form::Lazy { cache }
            }
        };
        Ok(Self {
            model: model.clone(),
            z0: z0.clone(),
            encoding: encoding.clone(),
            signed,
            form,
        })
    }

    pub fn model(&self) -> &PolynomialModel {
        &self.model
    }

    pub fn z0(&self) -> &SpinVector {
        &self.z0
    }

    pub fn encoding(&self) -> &GroupEncoding {
        &self.encoding
    }

    /// Number of auxiliary variables (outcome indices `0..n_variables`).
    pub fn n_variables(&self) -> usize {
        self.encoding.n_variables()
    }

    /// Group of outcome `mu`, `None` for discarded outcomes.
    pub fn group(&self, mu: u64) -> Option<Group> {
        match &self.form {
            Form::Lazy { cache: Some(cache) } => cache.get(mu as usize).cloned().flatten(),
            _ => self.encoding.decode(mu),
        }
    }

    fn check_q(&self, q: &QVector) -> Result<()> {
        // QVector construction already enforces the range; this guards
        // against outcomes beyond the register.
        if let Some(&(mu, _)) = q.entries.last() {
            if self.encoding.n_qubits() < 64 && mu >> self.encoding.n_qubits().max(2) != 0 {
                return Err(Error::OutOfRange(format!(
                    "outcome {mu} beyond the register"
                )));
            }
        }
        Ok(())
    }

    /// Terms built against the support of `q`; variables are positions in
    /// `q.entries()`. Discarded outcomes do not participate.
    fn lazy_terms(&self, q: &QVector) -> (f64, Vec<CompiledTerm>) {
        let n = self.model.n_spins();
        let mut member_of: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (k, &(mu, _)) in q.entries.iter().enumerate() {
            if let Some(g) = self.group(mu) {
                for &i in g.members() {
                    member_of[i].push(k as u32);
                }
            }
        }
        let mut constant = 0.0;
        let mut terms = Vec::new();
        let mut scratch = Vec::new();
        for (t, &c) in self.model.terms().iter().zip(&self.signed) {
            let lists: Vec<&[u32]> = t.vars.iter().map(|&i| member_of[i].as_slice()).collect();
            let vars = odd_union(&lists, &mut scratch);
            if vars.is_empty() {
                constant += c;
            } else if c.abs() >= COEFF_EPS {
                terms.push(CompiledTerm { coeff: c, vars });
            }
        }
        (constant, terms)
    }

    fn dense_q(&self, q: &QVector) -> Vec<f64> {
        let l = self.n_variables();
        let mut dense = vec![1.0; l];
        for &(mu, v) in &q.entries {
            if let Some(slot) = usize::try_from(mu).ok().and_then(|i| dense.get_mut(i)) {
                *slot = v;
            }
        }
        dense
    }

    /// Value of the multilinear objective at `q`.
    pub fn eval(&self, q: &QVector) -> Result<f64> {
        self.check_q(q)?;
        Ok(match &self.form {
            Form::Compiled { constant, terms } => {
                multilinear(*constant, terms, &self.dense_q(q), None)
            }
            Form::Lazy { .. } => {
                let (constant, terms) = self.lazy_terms(q);
                let vals: Vec<f64> = q.entries.iter().map(|e| e.1).collect();
                multilinear(constant, &terms, &vals, None)
            }
        })
    }

    /// Value and `dE/dq` for each entry of `q`, aligned with `q.entries()`.
    /// Entries for discarded outcomes get a zero derivative.
    pub fn value_and_grad(&self, q: &QVector) -> Result<(f64, Vec<f64>)> {
        self.check_q(q)?;
        Ok(match &self.form {
            Form::Compiled { constant, terms } => {
                let dense = self.dense_q(q);
                let mut g = vec![0.0; dense.len()];
                let v = multilinear(*constant, terms, &dense, Some(&mut g));
                let grad = q
                    .entries
                    .iter()
                    .map(|&(mu, _)| {
                        usize::try_from(mu)
                            .ok()
                            .and_then(|i| g.get(i))
                            .copied()
                            .unwrap_or(0.0)
                    })
                    .collect();
                (v, grad)
            }
            Form::Lazy { .. } => {
                let (constant, terms) = self.lazy_terms(q);
                let vals: Vec<f64> = q.entries.iter().map(|e| e.1).collect();
                let mut g = vec![0.0; vals.len()];
                let v = multilinear(constant, &terms, &vals, Some(&mut g));
                (v, g)
            }
        })
    }

    /// `dE/dq_mu` for each `mu` in the support of `q`.
    pub fn grad_q(&self, q: &QVector) -> Result<Vec<(u64, f64)>> {
        let (_, g) = self.value_and_grad(q)?;
        Ok(q.entries.iter().map(|e| e.0).zip(g).collect())
    }

    /// Objective at a ±1 assignment of all `n_variables()` variables.
    pub fn eval_discrete(&self, z: &[i8]) -> Result<f64> {
        let l = self.n_variables();
        if z.len() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                actual: z.len(),
            });
        }
        if z.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::invalid("auxiliary vertex entries must be -1 or +1"));
        }
        let flipped = z
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == -1)
            .map(|(k, _)| (k as u64, -1.0));
        self.eval(&QVector {
            entries: flipped.collect(),
        })
    }
}
