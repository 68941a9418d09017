use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected weighted simple graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.u >= n_vertices || e.v >= n_vertices {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    e.u, e.v, n_vertices
                )));
            }
            if e.u == e.v {
                return Err(Error::invalid(format!("self-loop on vertex {}", e.u)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::invalid(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
            if !e.w.is_finite() {
                return Err(Error::NonFinite(format!(
                    "weight of edge ({}, {})",
                    e.u, e.v
                )));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    /// Convenience constructor for unit-weight graphs.
    pub fn unweighted(n_vertices: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs.iter().map(|&(u, v)| Edge { u, v, w: 1.0 }).collect();
        Self::new(n_vertices, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Serializes to the edge-list text format accepted by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p edge {} {}", self.n_vertices, self.edges.len());
        for e in &self.edges {
            if e.w == 1.0 {
                let _ = writeln!(out, "e {} {}", e.u + 1, e.v + 1);
            } else {
                let _ = writeln!(out, "e {} {} {:?}", e.u + 1, e.v + 1, e.w);
            }
        }
        out
    }
}

/// Parses a DIMACS-like edge list.
///
/// ```text
/// c optional comment
/// p edge <n> <m>
/// e <u> <v> [w]
/// ```
///
/// Vertices are 1-based in the file and 0-based in the returned graph. The
/// weight defaults to 1.0.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let err = |line: usize, message: String| Error::Parse { line, message };

    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(err(line_no, "duplicate header".into()));
                }
                let kind = tokens.next();
                if !matches!(kind, Some("edge") | Some("col")) {
                    return Err(err(line_no, "expected `p edge <n> <m>`".into()));
                }
                let n = parse_count(tokens.next(), line_no, "vertex count")?;
                let m = parse_count(tokens.next(), line_no, "edge count")?;
                if tokens.next().is_some() {
                    return Err(err(line_no, "trailing tokens in header".into()));
                }
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| err(line_no, "edge before header".into()))?;
                let u = parse_count(tokens.next(), line_no, "vertex")?;
                let v = parse_count(tokens.next(), line_no, "vertex")?;
                let w = match tokens.next() {
                    Some(tok) => tok
                        .parse::<f64>()
                        .ok()
                        .filter(|w| w.is_finite())
                        .ok_or_else(|| err(line_no, format!("invalid weight `{tok}`")))?,
                    None => 1.0,
                };
                if tokens.next().is_some() {
                    return Err(err(line_no, "trailing tokens in edge line".into()));
                }
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(err(line_no, format!("vertex {x} out of range 1..={n}")));
                    }
                }
                if u == v {
                    return Err(err(line_no, format!("self-loop on vertex {u}")));
                }
                let key = (u.min(v), u.max(v));
                if !seen.insert(key) {
                    return Err(err(line_no, format!("duplicate edge {u} {v}")));
                }
                edges.push(Edge {
                    u: u - 1,
                    v: v - 1,
                    w,
                });
            }
            Some(other) => {
                return Err(err(line_no, format!("unknown line type `{other}`")));
            }
            None => unreachable!("blank lines are skipped"),
        }
    }

    let (n, m) = header.ok_or_else(|| err(last_line.max(1), "missing `p edge` header".into()))?;
    if edges.len() != m {
        return Err(err(
            last_line.max(1),
            format!("header declares {m} edges but {} were given", edges.len()),
        ));
    }
    Graph::new(n, edges).map_err(|e| err(last_line, e.to_string()))
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} `{tok}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangle() {
        let g = parse_graph("c triangle\np edge 3 3\ne 1 2\ne 1 3\ne 2 3\n").unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.edges().len(), 3);
        assert!(g.edges().iter().all(|e| e.w == 1.0));
        assert_eq!((g.edges()[0].u, g.edges()[0].v), (0, 1));
    }

    #[test]
    fn parses_weight() {
        let g = parse_graph("p edge 2 1\ne 1 2 -0.5\n").unwrap();
        assert_eq!(g.edges()[0].w, -0.5);
    }

    #[test]
    fn rejects_out_of_range_vertex_with_line() {
        let e = parse_graph("p edge 3 1\ne 1 4\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
    }

    #[test]
    fn rejects_duplicates_self_loops_and_bad_headers() {
        assert!(matches!(
            parse_graph("p edge 3 2\ne 1 2\ne 2 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_graph("p edge 3 1\ne 2 2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("p edge x 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_graph("p edge 3 2\ne 1 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_graph("e 1 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let g = Graph::new(
            4,
            vec![
                Edge {
                    u: 0,
                    v: 3,
                    w: 0.25,
                },
                Edge { u: 1, v: 2, w: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
    }
}
