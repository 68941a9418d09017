//! Flip groups and the codecs that map measurement outcomes to groups.
//!
//! Outcome indices `mu` are 0-based everywhere in the public API.

mod codec;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Graph;

pub use codec::{
    decode_base_n, decode_bitmask, decode_sparse, unrank_subset, EncodingStrategy, GroupEncoding,
    SubsetUnranker,
};

/// Largest group list that is ever materialized explicitly.
pub const MATERIALIZATION_CAP: usize = 1 << 20;

/// A set of spin indices flipped together. Members are sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Group(Vec<usize>);

impl Group {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self(members)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

impl From<Vec<usize>> for Group {
    fn from(v: Vec<usize>) -> Self {
        Self::new(v)
    }
}

/// Size-then-lexicographic order used for every group list.
pub fn size_lex_cmp(a: &Group, b: &Group) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0))
}

pub(crate) fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `sum_{m=1..r} C(n, m)`.
pub fn full_neighborhood_size(n: usize, r: usize) -> BigUint {
    (1..=r.min(n)).map(|m| binomial(n, m)).sum()
}

/// All subsets of `0..n` with `1..=r` elements, by size then lexicographically.
pub fn enumerate_full(n: usize, r: usize) -> Result<Vec<Group>> {
    enumerate_full_with_cap(n, r, MATERIALIZATION_CAP)
}

pub fn enumerate_full_with_cap(n: usize, r: usize, cap: usize) -> Result<Vec<Group>> {
    if r == 0 || r > n {
        return Err(Error::invalid(format!(
            "need 1 <= r <= n, got r={r}, n={n}"
        )));
    }
    if full_neighborhood_size(n, r) > BigUint::from(cap) {
        return Err(Error::CapExceeded { cap });
    }
    let mut out = Vec::new();
    for m in 1..=r {
        let mut comb: Vec<usize> = (0..m).collect();
        loop {
            out.push(Group(comb.clone()));
            // advance to the next m-combination in lexicographic order
            let Some(pos) = (0..m).rev().find(|&p| comb[p] < n - m + p) else {
                break;
            };
            comb[pos] += 1;
            for p in pos + 1..m {
                comb[p] = comb[p - 1] + 1;
            }
        }
    }
    Ok(out)
}

/// All vertex sets of size `1..=r` inducing a connected subgraph of `g`.
pub fn enumerate_connected(g: &Graph, r: usize) -> Result<Vec<Group>> {
    enumerate_connected_with_cap(g, r, MATERIALIZATION_CAP)
}

pub fn enumerate_connected_with_cap(g: &Graph, r: usize, cap: usize) -> Result<Vec<Group>> {
    if r == 0 {
        return Err(Error::invalid("group size bound r must be >= 1"));
    }
    let adj = g.adjacency();
    let mut layer: BTreeSet<Vec<usize>> = (0..g.n_vertices()).map(|v| vec![v]).collect();
    let mut out: Vec<Group> = Vec::new();
    for size in 1..=r {
        if out.len() + layer.len() > cap {
            return Err(Error::CapExceeded { cap });
        }
        out.extend(layer.iter().cloned().map(Group));
        if size == r {
            break;
        }
        // Every connected set of size s+1 contains a connected set of size s
        // (drop a leaf of a spanning tree), so growing by one neighbor is
        // exhaustive.
        let mut next = BTreeSet::new();
        for set in &layer {
            for &v in set {
                for &w in &adj[v] {
                    if set.binary_search(&w).is_err() {
                        let mut grown = set.clone();
                        let at = grown.binary_search(&w).unwrap_err();
                        grown.insert(at, w);
                        next.insert(grown);
                    }
                }
            }
            if out.len() + next.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Ok(out)
}

/// Color-changing moves for one-hot coloring: `{v*k + i, v*k + j}` for every
/// vertex `v` and color pair `i < j`.
pub fn coloring_swap_groups(n_vertices: usize, k: usize) -> Result<Vec<Group>> {
    if k < 2 {
        return Err(Error::invalid(format!("swap groups need k >= 2, got {k}")));
    }
    let mut out = Vec::with_capacity(n_vertices * k * (k - 1) / 2);
    for v in 0..n_vertices {
        for i in 0..k {
            for j in i + 1..k {
                out.push(Group(vec![v * k + i, v * k + j]));
            }
        }
    }
    Ok(out)
}
