//! Directed graphs in the adjacency-matrix model.
//!
//! Vertices are 0-based inside the crate and 1-based in files and on the
//! command line. Vertex `i` stands for the bitstring `binary(i)` of width
//! `log n` when `n` is a power of two.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 0-based vertex index.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("a graph needs at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("vertex {vertex} is out of range 1..={n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    Duplicate(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Dense directed graph without self-loops.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

impl Digraph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooSmall(n));
        }
        Ok(Self { n, adj: vec![false; n * n] })
    }

    /// Builds a graph from 0-based edges. Duplicates are rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Self::new(n)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a + 1));
        }
        let slot = &mut self.adj[a * self.n + b];
        if *slot {
            return Err(GraphError::Duplicate(a + 1, b + 1));
        }
        *slot = true;
        Ok(())
    }

    fn check(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::OutOfRange { vertex: v + 1, n: self.n })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a < self.n && b < self.n && self.adj[a * self.n + b]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&x| x).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n * self.n)
            .filter(|&k| self.adj[k])
            .map(|k| (k / self.n, k % self.n))
    }

    pub fn out_neighbors(&self, a: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.n).filter(move |&b| self.adj[a * self.n + b])
    }

    /// Complete digraph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::new(n)?;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    g.adj[a * n + b] = true;
                }
            }
        }
        Ok(g)
    }

    /// Directed path 1 -> 2 -> ... -> n.
    pub fn layered_path(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::new(n)?;
        for a in 0..n - 1 {
            g.adj[a * n + a + 1] = true;
        }
        Ok(g)
    }

    /// Each ordered pair becomes an edge independently with probability `edge_prob`.
    pub fn random(n: usize, edge_prob: f64, seed: u64) -> Result<Self, GraphError> {
        let mut g = Self::new(n)?;
        let p = edge_prob.clamp(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for a in 0..n {
            for b in 0..n {
                if a != b && rng.random_bool(p) {
                    g.adj[a * n + b] = true;
                }
            }
        }
        Ok(g)
    }

    /// The graph whose off-diagonal pairs, in row-major order, are the bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self, GraphError> {
        let mut g = Self::new(n)?;
        let mut bit = 0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    g.adj[a * n + b] = (mask >> bit) & 1 == 1;
                    bit += 1;
                }
            }
        }
        Ok(g)
    }

    /// All `2^{n(n-1)}` digraphs on `n` vertices.
    pub fn all(n: usize) -> impl Iterator<Item = Digraph> {
        let pairs = n * n.saturating_sub(1);
        assert!(pairs < 64, "exhaustive enumeration is limited to n <= 8");
        (0..1u64 << pairs).map(move |m| Digraph::from_mask(n, m).expect("n >= 2"))
    }

    /// Parses the edge-list format: `n m` then `m` lines `i j` (1-based).
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "empty input".into() })?;
        let (n, m) = two_numbers(hl, header)?;
        let mut g = Self::new(n)?;
        let mut seen = 0;
        for (line, body) in lines {
            let (a, b) = two_numbers(line, body)?;
            if a == 0 || b == 0 {
                return Err(GraphError::OutOfRange { vertex: 0, n });
            }
            g.add_edge(a - 1, b - 1)?;
            seen += 1;
        }
        if seen != m {
            return Err(GraphError::Parse { line: hl, msg: format!("header announces {m} edges, found {seen}") });
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edge_count());
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }
}

fn two_numbers(line: usize, body: &str) -> Result<(usize, usize), GraphError> {
    let bad = |msg: &str| GraphError::Parse { line, msg: msg.to_string() };
    let mut it = body.split_whitespace();
    let a = it.next().ok_or_else(|| bad("expected two integers"))?;
    let b = it.next().ok_or_else(|| bad("expected two integers"))?;
    if it.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    let a = a.parse().map_err(|_| bad("not an unsigned integer"))?;
    let b = b.parse().map_err(|_| bad("not an unsigned integer"))?;
    Ok((a, b))
}

/// Query access to the adjacency matrix with an exact call counter.
#[derive(Debug)]
pub struct GraphOracle<'g> {
    graph: &'g Digraph,
    count: AtomicU64,
}

impl<'g> GraphOracle<'g> {
    pub fn new(graph: &'g Digraph) -> Self {
        Self { graph, count: AtomicU64::new(0) }
    }

    pub fn query(&self, a: Vertex, b: Vertex) -> bool {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.graph.has_edge(a, b)
    }

    pub fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn graph(&self) -> &'g Digraph {
        self.graph
    }
}

/// Shortest directed path length, `None` when unreachable.
pub fn bfs_distance(g: &Digraph, u: Vertex, v: Vertex) -> Option<usize> {
    if u == v {
        return Some(0);
    }
    let dist = bfs_layers(g, u);
    dist[v]
}

/// Distances from `u` to every vertex.
pub fn bfs_layers(g: &Digraph, u: Vertex) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    let mut queue = VecDeque::from([u]);
    dist[u] = Some(0);
    while let Some(a) = queue.pop_front() {
        let d = dist[a].unwrap_or(0);
        for b in g.out_neighbors(a) {
            if dist[b].is_none() {
                dist[b] = Some(d + 1);
                queue.push_back(b);
            }
        }
    }
    dist
}

/// Length of the shortest closed walk of positive length through `u`.
pub fn return_distance(g: &Digraph, u: Vertex) -> Option<usize> {
    let dist = bfs_layers(g, u);
    (0..g.n())
        .filter(|&w| g.has_edge(w, u))
        .filter_map(|w| dist[w].map(|d| d + 1))
        .min()
}

/// Adds isolated vertices until the vertex count is a power of two.
pub fn pad_to_power_of_two(g: &Digraph) -> Digraph {
    let n2 = g.n().next_power_of_two();
    if n2 == g.n() {
        return g.clone();
    }
    let edges: Vec<_> = g.edges().collect();
    Digraph::from_edges(n2, &edges).expect("padding keeps edges valid")
}

/// Prepends a directed path `s_1 -> ... -> s_a -> u` of `a` fresh vertices.
///
/// Returns the new graph and `s_1`; for `a = 0` the input is returned as is.
pub fn attach_source_path(g: &Digraph, u: Vertex, a: usize) -> (Digraph, Vertex) {
    if a == 0 {
        return (g.clone(), u);
    }
    let n = g.n();
    let mut edges: Vec<_> = g.edges().collect();
    for k in 0..a - 1 {
        edges.push((n + k, n + k + 1));
    }
    edges.push((n + a - 1, u));
    (Digraph::from_edges(n + a, &edges).expect("fresh vertices keep edges valid"), n)
}
