//! Problem representations: Ising/PUBO polynomial models, QUBO matrices,
//! spin vectors, problem builders and graph ingestion.

mod graph;
mod qubo;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use graph::{parse_graph, Edge, Graph};
pub use qubo::{
    build_graph_coloring, coloring_conflicts, decode_coloring, default_coloring_penalty,
    qubo_to_ising, QuboMatrix,
};

/// A vector of spins, each exactly -1 or +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!(
                "spin {pos} has value {}, expected -1 or +1",
                values[pos]
            )));
        }
        Ok(Self(values))
    }

    pub fn all_ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Spins from binary variables with `Z = 1 - 2x`.
    pub fn from_binary(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(1),
                1 => Ok(-1),
                other => Err(Error::invalid(format!("binary value {other}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn to_binary(&self) -> Vec<u8> {
        self.0.iter().map(|&s| u8::from(s < 0)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    /// Copy with every spin in `indices` negated.
    pub fn flipped(&self, indices: &[usize]) -> Self {
        let mut out = self.clone();
        for &i in indices {
            out.flip(i);
        }
        out
    }
}

impl TryFrom<Vec<i8>> for SpinVector {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpinVector> for Vec<i8> {
    fn from(s: SpinVector) -> Self {
        s.0
    }
}

/// One monomial `coeff * prod_{i in vars} Z_i`; `vars` is sorted and
/// duplicate-free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub vars: Vec<usize>,
    pub coeff: f64,
}

/// Sparse multilinear energy model
/// `E(Z) = sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j + sum_S J_S prod_{i in S} Z_i`,
/// plus a constant offset kept separately from `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct PolynomialModel {
    n_spins: usize,
    terms: Vec<Term>,
    offset: f64,
    incidence: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    n_spins: usize,
    offset: f64,
    terms: Vec<Term>,
}

impl TryFrom<ModelRepr> for PolynomialModel {
    type Error = Error;
    fn try_from(r: ModelRepr) -> Result<Self> {
        Self::from_terms(
            r.n_spins,
            r.terms.into_iter().map(|t| (t.vars, t.coeff)),
            r.offset,
        )
    }
}

impl From<PolynomialModel> for ModelRepr {
    fn from(m: PolynomialModel) -> Self {
        ModelRepr {
            n_spins: m.n_spins,
            offset: m.offset,
            terms: m.terms,
        }
    }
}

impl PolynomialModel {
    /// Builds a model from arbitrary monomials. Repeated indices inside a
    /// monomial cancel in pairs (`Z^2 = 1`), equal monomials are merged, zero
    /// coefficients are dropped and empty monomials go into the offset.
    pub fn from_terms<I>(n_spins: usize, terms: I, offset: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut offset = offset;
        for (mut vars, coeff) in terms {
            if !coeff.is_finite() {
                return Err(Error::NonFinite(format!("coefficient of term {vars:?}")));
            }
            if let Some(&bad) = vars.iter().find(|&&i| i >= n_spins) {
                return Err(Error::invalid(format!("spin index {bad} >= {n_spins}")));
            }
            vars.sort_unstable();
            let reduced = reduce_pairs(&vars);
            if reduced.is_empty() {
                offset += coeff;
            } else {
                *acc.entry(reduced).or_insert(0.0) += coeff;
            }
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(vars, coeff)| Term { vars, coeff })
            .collect();
        terms.sort_by(|a, b| {
            a.vars
                .len()
                .cmp(&b.vars.len())
                .then_with(|| a.vars.cmp(&b.vars))
        });

        let mut incidence = vec![Vec::new(); n_spins];
        for (t, term) in terms.iter().enumerate() {
            for &i in &term.vars {
                incidence[i].push(t);
            }
        }
        Ok(Self {
            n_spins,
            terms,
            offset,
            incidence,
        })
    }

    /// Ising model from fields `h` and couplings `(i, j, J_ij)`.
    pub fn ising(h: &[f64], couplings: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(i, _, _)) = couplings.iter().find(|(i, j, _)| i == j) {
            return Err(Error::invalid(format!("coupling of spin {i} with itself")));
        }
        let linear = h.iter().enumerate().map(|(i, &c)| (vec![i], c));
        let quad = couplings.iter().map(|&(i, j, c)| (vec![i, j], c));
        Self::from_terms(h.len(), linear.chain(quad), 0.0)
    }

    pub fn zero(n_spins: usize) -> Self {
        Self::from_terms(n_spins, std::iter::empty(), 0.0).expect("empty model is valid")
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Indices (into [`terms`](Self::terms)) of the terms containing spin `i`.
    pub fn incident_terms(&self, i: usize) -> &[usize] {
        &self.incidence[i]
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.coefficient(&[i])
    }

    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        self.coefficient(&[i.min(j), i.max(j)])
    }

    /// Coefficient of the monomial over the sorted index set `vars`.
    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        self.terms
            .binary_search_by(|t| {
                t.vars
                    .len()
                    .cmp(&vars.len())
                    .then_with(|| t.vars.as_slice().cmp(vars))
            })
            .map(|k| self.terms[k].coeff)
            .unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.vars.len()).max().unwrap_or(0)
    }

    pub fn is_quadratic(&self) -> bool {
        self.max_degree() <= 2
    }

    /// Energy without the offset.
    pub fn energy(&self, z: &SpinVector) -> Result<f64> {
        if z.len() != self.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins,
                actual: z.len(),
            });
        }
        Ok(self.energy_unchecked(z.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, z: &[i8]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * sign_product(z, &t.vars))
            .sum()
    }

    /// Energy plus offset; for a model produced by [`qubo_to_ising`] this is
    /// the QUBO objective value.
    pub fn objective(&self, z: &SpinVector) -> Result<f64> {
        Ok(self.energy(z)? + self.offset)
    }

    /// Interaction graph: spins sharing any term are adjacent. Edge weights
    /// are set to 1.
    pub fn interaction_graph(&self) -> Graph {
        let mut pairs = std::collections::BTreeSet::new();
        for t in &self.terms {
            for (a, &i) in t.vars.iter().enumerate() {
                for &j in &t.vars[a + 1..] {
                    pairs.insert((i, j));
                }
            }
        }
        let edges = pairs
            .into_iter()
            .map(|(u, v)| Edge { u, v, w: 1.0 })
            .collect();
        Graph::new(self.n_spins, edges).expect("term indices are in range and distinct")
    }
}

impl fmt::Display for PolynomialModel {
    /// One term per line: `term <i> <j> ... <coeff>`, preceded by the size
    /// and offset.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "spins {}", self.n_spins)?;
        writeln!(f, "offset {:?}", self.offset)?;
        for t in &self.terms {
            write!(f, "term")?;
            for i in &t.vars {
                write!(f, " {i}")?;
            }
            writeln!(f, " {:?}", t.coeff)?;
        }
        Ok(())
    }
}

pub(crate) fn sign_product(z: &[i8], vars: &[usize]) -> f64 {
    let neg = vars.iter().filter(|&&i| z[i] < 0).count();
    if neg % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Removes indices that occur an even number of times in a sorted list.
fn reduce_pairs(sorted: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(sorted.len());
    for &i in sorted {
        if out.last() == Some(&i) {
            out.pop();
        } else {
            out.push(i);
        }
    }
    out
}

/// MaxCut as an Ising model: `h = 0`, `J_ij = w_ij`.
pub fn build_maxcut(g: &Graph) -> PolynomialModel {
    PolynomialModel::from_terms(
        g.n_vertices(),
        g.edges().iter().map(|e| (vec![e.u, e.v], e.w)),
        0.0,
    )
    .expect("graph edges are valid spin pairs")
}

/// `E / E_opt`. Undefined when the optimum is zero.
pub fn approximation_ratio(energy: f64, optimum: f64) -> Result<f64> {
    if optimum == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(energy / optimum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spins(v: &[i8]) -> SpinVector {
        SpinVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn energy_examples() {
        let m = PolynomialModel::ising(&[0.0, 0.0], &[(0, 1, -1.0)]).unwrap();
        assert_eq!(m.energy(&spins(&[1, 1])).unwrap(), -1.0);

        let m = PolynomialModel::ising(&[1.0, 0.0], &[(0, 1, 2.0)]).unwrap();
        assert_eq!(m.energy(&spins(&[-1, 1])).unwrap(), -3.0);

        let m = PolynomialModel::from_terms(3, [(vec![0, 1, 2], 1.0)], 0.0).unwrap();
        assert_eq!(m.energy(&spins(&[-1, -1, -1])).unwrap(), -1.0);
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let m = PolynomialModel::zero(3);
        assert_eq!(
            m.energy(&spins(&[1, 1])),
            Err(Error::DimensionMismatch {
                expected: 3,
                actual: 2
            })
        );
    }

    #[test]
    fn explicit_zero_coefficients_are_not_stored() {
        let a = PolynomialModel::ising(&[1.0, 0.0, 0.0], &[(0, 1, 0.5)]).unwrap();
        let b = PolynomialModel::from_terms(
            3,
            [
                (vec![0], 1.0),
                (vec![1], 0.0),
                (vec![1, 0], 0.5),
                (vec![1, 2], 0.0),
            ],
            0.0,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.terms().len(), 2);
    }

    #[test]
    fn repeated_indices_reduce_mod_two() {
        let m =
            PolynomialModel::from_terms(3, [(vec![0, 0, 1], 2.0), (vec![2, 2], 1.5)], 0.0).unwrap();
        assert_eq!(m.linear(1), 2.0);
        assert_eq!(m.offset(), 1.5);
    }

    #[test]
    fn maxcut_builder() {
        let tri = Graph::unweighted(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let m = build_maxcut(&tri);
        assert_eq!(m.quadratic(0, 1), 1.0);
        assert_eq!(m.quadratic(2, 0), 1.0);
        assert_eq!(m.linear(0), 0.0);
        assert_eq!(m.offset(), 0.0);
        assert!(build_maxcut(&Graph::unweighted(4, &[]).unwrap())
            .terms()
            .is_empty());
    }

    #[test]
    fn ratio() {
        assert_eq!(approximation_ratio(-3.0, -4.0).unwrap(), 0.75);
        assert_eq!(approximation_ratio(-2.5, -2.5).unwrap(), 1.0);
        assert_eq!(approximation_ratio(1.0, 0.0), Err(Error::UndefinedRatio));
    }

    #[test]
    fn text_and_json_forms() {
        let m =
            PolynomialModel::from_terms(3, [(vec![0, 1, 2], 0.5), (vec![1], -1.0)], 2.0).unwrap();
        let text = m.to_string();
        assert!(text.contains("term 1 -1.0"));
        assert!(text.contains("term 0 1 2 0.5"));
        let back: PolynomialModel =
            serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn spin_vector_validation() {
        assert!(SpinVector::new(vec![1, 0]).is_err());
        let z = SpinVector::from_binary(&[0, 1, 1]).unwrap();
        assert_eq!(z.as_slice(), &[1, -1, -1]);
        assert_eq!(z.to_binary(), vec![0, 1, 1]);
    }
}
