use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{binomial, Group};
use crate::error::{Error, Result};
use crate::model::Graph;

/// Unranks subsets of `0..n` of size `<= r` in size-then-lexicographic order.
///
/// Ranks are 1-based here; [`GroupEncoding`] shifts 0-based outcomes.
#[derive(Debug, Clone)]
pub struct SubsetUnranker {
    n: usize,
    r: usize,
    /// `prefix[m]` = number of subsets of size `<= m` (excluding the empty set).
    prefix: Vec<BigUint>,
    /// `binom[a][b] = C(a, b)` for `a <= n`, `b < r`.
    binom: Vec<Vec<BigUint>>,
}

impl SubsetUnranker {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if r == 0 || r > n {
            return Err(Error::invalid(format!(
                "need 1 <= r <= n, got r={r}, n={n}"
            )));
        }
        let mut prefix = vec![BigUint::zero()];
        for m in 1..=r {
            let next = &prefix[m - 1] + binomial(n, m);
            prefix.push(next);
        }
        let binom = (0..=n)
            .map(|a| (0..r).map(|b| binomial(a, b)).collect())
            .collect();
        Ok(Self {
            n,
            r,
            prefix,
            binom,
        })
    }

    /// Total number of groups.
    pub fn len(&self) -> &BigUint {
        &self.prefix[self.r]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `rank`-th group (1-based).
    pub fn unrank(&self, rank: &BigUint) -> Result<Group> {
        if rank.is_zero() || rank > self.len() {
            return Err(Error::Decode(rank.to_u64().unwrap_or(u64::MAX)));
        }
        let m = (1..=self.r)
            .find(|&m| rank <= &self.prefix[m])
            .expect("rank <= C(r)");
        let mut remaining = rank - &self.prefix[m - 1];
        let mut need = m;
        let mut members = Vec::with_capacity(m);
        for x in 0..self.n {
            if need == 0 {
                break;
            }
            let count = &self.binom[self.n - x - 1][need - 1];
            if remaining <= *count {
                members.push(x);
                need -= 1;
            } else {
                remaining -= count;
            }
        }
        debug_assert_eq!(need, 0);
        Ok(Group(members))
    }
}

/// The `rank`-th (1-based) subset of `0..n` with at most `r` elements, in
/// size-then-lexicographic order.
pub fn unrank_subset(rank: u64, n: usize, r: usize) -> Result<Group> {
    SubsetUnranker::new(n, r)?.unrank(&BigUint::from(rank))
}

/// Group formed by the distinct base-`n` digits of `mu`, padded to `r` digits.
pub fn decode_base_n(mu: u64, n: usize, r: usize) -> Result<Group> {
    if n < 2 || r == 0 {
        return Err(Error::invalid(format!(
            "base-n codec needs n >= 2, r >= 1 (n={n}, r={r})"
        )));
    }
    let limit = (n as u128).checked_pow(r as u32);
    if limit.is_some_and(|l| u128::from(mu) >= l) {
        return Err(Error::Decode(mu));
    }
    let mut digits = Vec::with_capacity(r);
    let mut rest = mu;
    for _ in 0..r {
        digits.push((rest % n as u64) as usize);
        rest /= n as u64;
    }
    Ok(Group::new(digits))
}

/// Walk decoding for connected groups on a graph with sorted neighbor lists.
///
/// The leading `floor(mu / d^(r-1))` selects the start vertex; the remaining
/// `r - 1` base-`d` digits (most significant first) pick the neighbor index
/// at each step. Returns `Ok(None)` when a digit indexes a neighbor that does
/// not exist (only possible on non-regular graphs).
pub fn decode_sparse(
    mu: u64,
    adjacency: &[Vec<usize>],
    d: usize,
    r: usize,
) -> Result<Option<Group>> {
    if r == 0 {
        return Err(Error::invalid("group size bound r must be >= 1"));
    }
    if r > 1 && d == 0 {
        return Err(Error::invalid("sparse codec with r > 1 needs degree >= 1"));
    }
    let n = adjacency.len() as u128;
    let span = (d as u128)
        .checked_pow((r - 1) as u32)
        .ok_or(Error::Decode(mu))?;
    if u128::from(mu) >= n.saturating_mul(span) {
        return Err(Error::Decode(mu));
    }
    let mu = u128::from(mu);
    let mut current = (mu / span) as usize;
    let mut rest = mu % span;
    let mut place = span;
    let mut visited = vec![current];
    for _ in 1..r {
        place /= d as u128;
        let j = (rest / place) as usize;
        rest %= place;
        match adjacency[current].get(j) {
            Some(&next) => {
                current = next;
                visited.push(next);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(Group::new(visited)))
}

/// Group of set bit positions of `mu`; `mu = 0` is the empty group.
pub fn decode_bitmask(mu: u64, n: usize) -> Result<Group> {
    if n < 64 && mu >> n != 0 {
        return Err(Error::Decode(mu));
    }
    Ok(Group(
        (0..n.min(64)).filter(|&i| (mu >> i) & 1 == 1).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingStrategy {
    ExplicitList,
    UnrankedFullR,
    BaseNFullR,
    SparseRegular,
    BitmaskComplete,
}

#[derive(Debug, Clone)]
enum Codec {
    Explicit(Vec<Group>),
    Unranked(SubsetUnranker),
    BaseN {
        r: usize,
    },
    Sparse {
        adjacency: Vec<Vec<usize>>,
        d: usize,
        r: usize,
    },
    Bitmask,
}

/// Maps measurement outcomes `mu` to flip groups.
#[derive(Debug, Clone)]
pub struct GroupEncoding {
    n_spins: usize,
    n_qubits: usize,
    codec: Codec,
}

fn ceil_log2_big(x: &BigUint) -> usize {
    if *x <= BigUint::one() {
        0
    } else {
        (x - 1u32).bits() as usize
    }
}

fn ceil_log2(x: u128) -> usize {
    ceil_log2_big(&BigUint::from(x))
}

impl GroupEncoding {
    /// `ceil(log2 l)` qubits; outcome `mu` selects the `mu`-th listed group.
    pub fn explicit(n_spins: usize, groups: Vec<Group>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::invalid("explicit encoding needs at least one group"));
        }
        for g in &groups {
            if g.is_empty() {
                return Err(Error::invalid("explicit groups must be non-empty"));
            }
            if let Some(&bad) = g.members().iter().find(|&&i| i >= n_spins) {
                return Err(Error::invalid(format!("group member {bad} >= {n_spins}")));
            }
        }
        let n_qubits = ceil_log2(groups.len() as u128);
        Ok(Self {
            n_spins,
            n_qubits,
            codec: Codec::Explicit(groups),
        })
    }

    /// All subsets of size `<= r` by lexicographic unranking, `ceil(log2 l)` qubits.
    pub fn unranked(n_spins: usize, r: usize) -> Result<Self> {
        let unranker = SubsetUnranker::new(n_spins, r)?;
        let n_qubits = ceil_log2_big(unranker.len());
        Self::check_width(n_qubits)?;
        Ok(Self {
            n_spins,
            n_qubits,
            codec: Codec::Unranked(unranker),
        })
    }

    /// All subsets of size `<= r` via base-`n` digits, `ceil(r log2 n)` qubits.
    pub fn base_n(n_spins: usize, r: usize) -> Result<Self> {
        if n_spins < 2 || r == 0 || r > n_spins {
            return Err(Error::invalid(format!(
                "base-n codec needs 2 <= n, 1 <= r <= n (n={n_spins}, r={r})"
            )));
        }
        let n_qubits = ceil_log2_big(&BigUint::from(n_spins).pow(r as u32));
        Self::check_width(n_qubits)?;
        Ok(Self {
            n_spins,
            n_qubits,
            codec: Codec::BaseN { r },
        })
    }

    /// Connected groups of size `<= r` via neighbor walks on `g`, with
    /// `d = max degree` and `ceil(log2 n + (r-1) log2 d)` qubits.
    pub fn sparse(g: &Graph, r: usize) -> Result<Self> {
        let adjacency = g.adjacency();
        let d = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        if r == 0 {
            return Err(Error::invalid("group size bound r must be >= 1"));
        }
        if r > 1 && d == 0 {
            return Err(Error::invalid(
                "sparse codec with r > 1 needs a graph with edges",
            ));
        }
        let range = BigUint::from(g.n_vertices()) * BigUint::from(d.max(1)).pow((r - 1) as u32);
        let n_qubits = ceil_log2_big(&range);
        Self::check_width(n_qubits)?;
        Ok(Self {
            n_spins: g.n_vertices(),
            n_qubits,
            codec: Codec::Sparse { adjacency, d, r },
        })
    }

    /// One qubit per spin; `mu`'s set bits form the group (empty group allowed).
    pub fn bitmask(n_spins: usize) -> Result<Self> {
        Self::check_width(n_spins)?;
        Ok(Self {
            n_spins,
            n_qubits: n_spins,
            codec: Codec::Bitmask,
        })
    }

    fn check_width(n_qubits: usize) -> Result<()> {
        if n_qubits > 63 {
            return Err(Error::TooLarge(format!(
                "{n_qubits} qubits exceed the 63-bit outcome range"
            )));
        }
        Ok(())
    }

    pub fn strategy(&self) -> EncodingStrategy {
        match self.codec {
            Codec::Explicit(_) => EncodingStrategy::ExplicitList,
            Codec::Unranked(_) => EncodingStrategy::UnrankedFullR,
            Codec::BaseN { .. } => EncodingStrategy::BaseNFullR,
            Codec::Sparse { .. } => EncodingStrategy::SparseRegular,
            Codec::Bitmask => EncodingStrategy::BitmaskComplete,
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Explicit group list, when the encoding stores one.
    pub fn groups(&self) -> Option<&[Group]> {
        match &self.codec {
            Codec::Explicit(g) => Some(g),
            _ => None,
        }
    }

    /// Size of the auxiliary variable universe: `l` for an explicit list,
    /// otherwise every outcome `0..2^n_qubits`.
    pub fn n_variables(&self) -> usize {
        match &self.codec {
            Codec::Explicit(g) => g.len(),
            _ => 1usize << self.n_qubits,
        }
    }

    /// Group of outcome `mu`, or `None` when the outcome is discarded.
    pub fn decode(&self, mu: u64) -> Option<Group> {
        if self.n_qubits < 64
            && mu >> self.n_qubits != 0
            && !matches!(self.codec, Codec::Explicit(_))
        {
            return None;
        }
        match &self.codec {
            Codec::Explicit(groups) => usize::try_from(mu)
                .ok()
                .and_then(|i| groups.get(i))
                .cloned(),
            Codec::Unranked(u) => u.unrank(&(BigUint::from(mu) + 1u32)).ok(),
            Codec::BaseN { r } => decode_base_n(mu, self.n_spins, *r).ok(),
            Codec::Sparse { adjacency, d, r } => {
                decode_sparse(mu, adjacency, *d, *r).ok().flatten()
            }
            Codec::Bitmask => decode_bitmask(mu, self.n_spins).ok(),
        }
    }
}
