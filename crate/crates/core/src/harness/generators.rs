use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Edge, Graph};
use crate::rng::stream_rng;

/// Edge weight distribution for generated graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weights {
    Unit,
    /// Independent draws from `U[-1, 1]`.
    #[default]
    Uniform,
}

fn draw(weights: Weights, rng: &mut impl Rng) -> f64 {
    match weights {
        Weights::Unit => 1.0,
        Weights::Uniform => rng.random_range(-1.0..=1.0),
    }
}

const PAIRING_ATTEMPTS: usize = 100_000;

/// Random `d`-regular graph from the pairing model: `d` stubs per vertex
/// are shuffled and paired, and pairings with self-loops or repeated edges
/// are rejected and redrawn.
pub fn random_regular_graph(n: usize, d: usize, weights: Weights, seed: u64) -> Result<Graph> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "no {d}-regular graph on {n} vertices"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = std::collections::BTreeSet::new();
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        let mut wrng = stream_rng(seed, 1);
        let edges = seen
            .into_iter()
            .map(|(u, v)| Edge {
                u,
                v,
                w: draw(weights, &mut wrng),
            })
            .collect();
        return Graph::new(n, edges);
    }
    Err(Error::invalid(format!(
        "pairing model failed {PAIRING_ATTEMPTS} times for n={n}, d={d}"
    )))
}

pub fn complete_graph(n: usize, weights: Weights, seed: u64) -> Result<Graph> {
    let mut rng = stream_rng(seed, 1);
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push(Edge {
                u,
                v,
                w: draw(weights, &mut rng),
            });
        }
    }
    Graph::new(n, edges)
}

/// Mycielskian: copies `u_i` of each vertex joined to the neighbors of
/// `v_i`, plus a hub `w` joined to every copy. Chromatic number goes up by
/// one and no triangles appear.
pub fn mycielskian(g: &Graph) -> Graph {
    let n = g.n_vertices();
    let mut edges = g.edges().to_vec();
    for e in g.edges() {
        edges.push(Edge {
            u: e.u,
            v: n + e.v,
            w: 1.0,
        });
        edges.push(Edge {
            u: e.v,
            v: n + e.u,
            w: 1.0,
        });
    }
    for i in 0..n {
        edges.push(Edge {
            u: n + i,
            v: 2 * n,
            w: 1.0,
        });
    }
    Graph::new(2 * n + 1, edges).expect("the Mycielskian of a simple graph is simple")
}

/// Member `k` of the benchmark Mycielski family: `K2` for `k = 1`, then
/// repeated Mycielskians, so `k = 2` is the 5-cycle, `k = 3` has 11
/// vertices and chromatic number `k + 1`.
pub fn mycielski(k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::invalid("Mycielski index starts at 1"));
    }
    let mut g = Graph::unweighted(2, &[(0, 1)])?;
    for _ in 1..k {
        g = mycielskian(&g);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_graphs_are_regular_and_seeded() {
        for seed in 0..5 {
            let g = random_regular_graph(16, 3, Weights::Uniform, seed).unwrap();
            assert_eq!(g.edges().len(), 24);
            assert!(g.adjacency().iter().all(|a| a.len() == 3));
            assert!(g.edges().iter().all(|e| (-1.0..=1.0).contains(&e.w)));
            assert_eq!(
                g,
                random_regular_graph(16, 3, Weights::Uniform, seed).unwrap()
            );
        }
        assert!(random_regular_graph(5, 3, Weights::Unit, 0).is_err());
        assert!(random_regular_graph(3, 3, Weights::Unit, 0).is_err());
    }

    #[test]
    fn complete_graph_edges() {
        let g = complete_graph(12, Weights::Uniform, 4).unwrap();
        assert_eq!(g.edges().len(), 66);
        assert!(complete_graph(5, Weights::Unit, 0)
            .unwrap()
            .edges()
            .iter()
            .all(|e| e.w == 1.0));
    }

    #[test]
    fn mycielski_sizes() {
        // (vertices, edges) of the standard benchmark instances
        let want = [
            (2, 1),
            (5, 5),
            (11, 20),
            (23, 71),
            (47, 236),
            (95, 755),
            (191, 2360),
        ];
        for (k, &(nv, ne)) in want.iter().enumerate() {
            let g = mycielski(k + 1).unwrap();
            assert_eq!((g.n_vertices(), g.edges().len()), (nv, ne), "k={}", k + 1);
        }
    }
}
