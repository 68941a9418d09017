use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Graph, PolynomialModel, SpinVector};
use crate::error::{Error, Result};

/// Upper-triangular QUBO matrix `C(x) = sum_{i<=j} a_ij x_i x_j + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboMatrix {
    n_vars: usize,
    entries: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboMatrix {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            entries: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    /// Adds `value` to `a_ij`; a lower-triangular position is folded onto
    /// its upper-triangular mirror.
    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i >= self.n_vars || j >= self.n_vars {
            return Err(Error::invalid(format!(
                "entry ({i}, {j}) outside {} vars",
                self.n_vars
            )));
        }
        let key = (i.min(j), i.max(j));
        let slot = self.entries.entry(key).or_insert(0.0);
        *slot += value;
        if *slot == 0.0 {
            self.entries.remove(&key);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// `x^T A x + offset` for binary `x`.
    pub fn value(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                actual: x.len(),
            });
        }
        let quad: f64 = self
            .entries
            .iter()
            .filter(|(&(i, j), _)| x[i] != 0 && x[j] != 0)
            .map(|(_, &a)| a)
            .sum();
        Ok(quad + self.offset)
    }
}

/// Substitutes `x_i = (1 - Z_i) / 2`. The returned model satisfies
/// `C(x) = E(Z) + offset` exactly.
pub fn qubo_to_ising(a: &QuboMatrix) -> PolynomialModel {
    let n = a.n_vars();
    let mut h = vec![0.0; n];
    let mut couplings = Vec::new();
    let mut offset = a.offset();
    for ((i, j), aij) in a.entries() {
        if i == j {
            h[i] -= aij / 2.0;
            offset += aij / 2.0;
        } else {
            h[i] -= aij / 4.0;
            h[j] -= aij / 4.0;
            couplings.push((vec![i, j], aij / 4.0));
            offset += aij / 4.0;
        }
    }
    let linear = h.into_iter().enumerate().map(|(i, c)| (vec![i], c));
    PolynomialModel::from_terms(n, linear.chain(couplings), offset)
        .expect("QUBO indices are in range")
}

/// `1 + max degree`: a one-hot violation always costs more than any number
/// of conflicts it could remove.
pub fn default_coloring_penalty(g: &Graph) -> f64 {
    1.0 + g.max_degree() as f64
}

/// One-hot graph coloring QUBO with variable `x_{v,i}` at index `v*k + i`:
/// `lambda * sum_v (1 - sum_i x_{v,i})^2 + sum_{(v,w) in E} sum_i x_{v,i} x_{w,i}`.
/// The constant `lambda * |V|` is kept in the offset so a proper coloring
/// evaluates to exactly 0.
pub fn build_graph_coloring(g: &Graph, k: usize, lambda: f64) -> Result<QuboMatrix> {
    if k == 0 {
        return Err(Error::invalid("graph coloring needs at least one color"));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::invalid(format!(
            "penalty weight must be positive, got {lambda}"
        )));
    }
    let nv = g.n_vertices();
    let mut q = QuboMatrix::new(nv * k);
    for v in 0..nv {
        for i in 0..k {
            q.add(v * k + i, v * k + i, -lambda)?;
            for j in i + 1..k {
                q.add(v * k + i, v * k + j, 2.0 * lambda)?;
            }
        }
    }
    q.add_offset(lambda * nv as f64);
    for e in g.edges() {
        for i in 0..k {
            q.add(e.u * k + i, e.v * k + i, 1.0)?;
        }
    }
    Ok(q)
}

/// Color of each vertex, or `None` when its block is not one-hot.
pub fn decode_coloring(z: &SpinVector, k: usize) -> Vec<Option<usize>> {
    z.to_binary()
        .chunks(k)
        .map(|block| {
            let mut set = block.iter().enumerate().filter(|(_, &b)| b == 1);
            match (set.next(), set.next()) {
                (Some((c, _)), None) => Some(c),
                _ => None,
            }
        })
        .collect()
}

/// Number of edges whose endpoints share a color; `None` if some vertex is
/// not one-hot.
pub fn coloring_conflicts(g: &Graph, z: &SpinVector, k: usize) -> Option<usize> {
    let colors: Option<Vec<usize>> = decode_coloring(z, k).into_iter().collect();
    let colors = colors?;
    Some(
        g.edges()
            .iter()
            .filter(|e| colors[e.u] == colors[e.v])
            .count(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_bits(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (0u32..1 << n).map(move |m| (0..n).map(|i| ((m >> i) & 1) as u8).collect())
    }

    #[test]
    fn qubo_to_ising_small_example() {
        let mut a = QuboMatrix::new(2);
        a.add(0, 0, 1.0).unwrap();
        a.add(0, 1, 2.0).unwrap();
        a.add(1, 1, 3.0).unwrap();
        let m = qubo_to_ising(&a);
        assert_eq!(m.linear(0), -1.0);
        assert_eq!(m.linear(1), -2.0);
        assert_eq!(m.quadratic(0, 1), 0.5);
        assert_eq!(m.offset(), 2.5);
        for x in all_bits(2) {
            let z = SpinVector::from_binary(&x).unwrap();
            assert_eq!(a.value(&x).unwrap(), m.objective(&z).unwrap());
        }
    }

    #[test]
    fn zero_qubo_gives_zero_model() {
        let m = qubo_to_ising(&QuboMatrix::new(3));
        assert!(m.terms().is_empty());
        assert_eq!(m.offset(), 0.0);
    }

    #[test]
    fn lower_triangular_entries_fold() {
        let mut a = QuboMatrix::new(3);
        a.add(2, 0, 1.5).unwrap();
        assert_eq!(a.get(0, 2), 1.5);
        assert_eq!(a.entries().next().unwrap().0, (0, 2));
        assert!(a.add(3, 0, 1.0).is_err());
    }

    fn coloring_optima(g: &Graph, k: usize, lambda: f64) -> (f64, Vec<Vec<u8>>) {
        let q = build_graph_coloring(g, k, lambda).unwrap();
        let mut best = f64::INFINITY;
        let mut arg = Vec::new();
        for x in all_bits(q.n_vars()) {
            let c = q.value(&x).unwrap();
            if c < best - 1e-12 {
                best = c;
                arg = vec![x];
            } else if (c - best).abs() <= 1e-12 {
                arg.push(x);
            }
        }
        (best, arg)
    }

    #[test]
    fn coloring_single_edge_two_colors() {
        let g = Graph::unweighted(2, &[(0, 1)]).unwrap();
        let (best, arg) = coloring_optima(&g, 2, 1.0);
        assert_eq!(best, 0.0);
        let mut arg = arg;
        arg.sort();
        assert_eq!(arg, vec![vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
    }

    #[test]
    fn coloring_single_vertex_one_hot() {
        let g = Graph::unweighted(1, &[]).unwrap();
        let q = build_graph_coloring(&g, 2, 1.0).unwrap();
        for x in all_bits(2) {
            let one_hot = x.iter().sum::<u8>() == 1;
            assert_eq!(q.value(&x).unwrap() == 0.0, one_hot, "{x:?}");
        }
    }

    #[test]
    fn triangle_is_not_two_colorable() {
        let g = Graph::unweighted(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let (best, _) = coloring_optima(&g, 2, 2.0);
        assert!(best > 0.0);
        assert_eq!(best, 1.0);
    }

    #[test]
    fn coloring_rejects_bad_parameters() {
        let g = Graph::unweighted(2, &[(0, 1)]).unwrap();
        assert!(build_graph_coloring(&g, 0, 1.0).is_err());
        assert!(build_graph_coloring(&g, 2, 0.0).is_err());
    }

    #[test]
    fn conflicts_and_decoding() {
        let g = Graph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        let z = SpinVector::from_binary(&[1, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(decode_coloring(&z, 2), vec![Some(0), Some(0), Some(0)]);
        assert_eq!(coloring_conflicts(&g, &z, 2), Some(2));
        let bad = SpinVector::from_binary(&[1, 1, 1, 0, 1, 0]).unwrap();
        assert_eq!(coloring_conflicts(&g, &bad, 2), None);
        assert_eq!(default_coloring_penalty(&g), 3.0);
    }
}
