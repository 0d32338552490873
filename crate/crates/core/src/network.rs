//! The recursive switching network `N_{2^l}(u)`.
//!
//! Edges are the pairs `(sigma, i)` with `sigma` a word of length `l` over
//! `Sigma = {(0,0)} + {(1,i)} + {(2,j)}` and `i` a vertex of `G`. An edge is
//! stored as the integer `block * n + i`, where `block` reads `sigma` as a
//! base-`(2n+1)` number with `sigma_1` most significant.
//!
//! Every edge belongs to one base block `N_1`, whose local vertices are a
//! source and `n` sinks. Vertex identities come from gluing those local
//! vertices with a union-find pass over the recursive construction. A block
//! sitting under an odd number of `(2,j)` symbols is reversed, so its edges
//! point from the local sink to the local source.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;

use crate::graph::{GraphOracle, Vertex};
use crate::pebbling::PebbleMove;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetError {
    #[error("n = {0} must be a power of two and at least 2")]
    BadN(usize),
    #[error("network with (2n+1)^l n = {0} edges exceeds the supported size")]
    TooLarge(u128),
    #[error("vertex {0} is out of range")]
    BadVertex(usize),
    #[error("glued vertex {vertex} has inconsistent associated sets")]
    Inconsistent { vertex: usize },
    #[error("edge {0} does not join sets differing by one vertex")]
    NotAPebbleStep(usize),
}

/// Upper bound on stored edges.
pub const MAX_EDGES: u128 = 1 << 22;

/// One letter of `Sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Zero,
    One(usize),
    Two(usize),
}

impl Sym {
    pub fn index(self, n: usize) -> usize {
        match self {
            Sym::Zero => 0,
            Sym::One(i) => 1 + i,
            Sym::Two(j) => 1 + n + j,
        }
    }

    pub fn from_index(k: usize, n: usize) -> Sym {
        match k {
            0 => Sym::Zero,
            k if k <= n => Sym::One(k - 1),
            k => Sym::Two(k - 1 - n),
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Sym::Zero => 0,
            Sym::One(_) => 1,
            Sym::Two(_) => 2,
        }
    }

    pub fn payload(self) -> usize {
        match self {
            Sym::Zero => 0,
            Sym::One(p) | Sym::Two(p) => p,
        }
    }

    /// Every letter of `Sigma` for a given `n`, in index order.
    pub fn all(n: usize) -> impl Iterator<Item = Sym> {
        (0..2 * n + 1).map(move |k| Sym::from_index(k, n))
    }
}

/// Decoded edge `(sigma, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetEdge {
    pub sigma: Vec<Sym>,
    pub i: usize,
}

/// `|sigma|_2`, the number of tag-2 letters.
pub fn count_twos(sigma: &[Sym]) -> usize {
    sigma.iter().filter(|s| s.tag() == 2).count()
}

/// `|sigma|_0`, the number of tag-0 letters.
pub fn count_zeros(sigma: &[Sym]) -> usize {
    sigma.iter().filter(|s| s.tag() == 0).count()
}

/// 1-based position of the last tag-1 letter, 0 if none.
pub fn f1(sigma: &[Sym]) -> usize {
    sigma.iter().rposition(|s| s.tag() == 1).map_or(0, |p| p + 1)
}

pub fn edge_count_formula(n: usize, ell: usize) -> u128 {
    (2 * n as u128 + 1).pow(ell as u32) * n as u128
}

pub fn vertex_count_recurrence(n: usize, ell: usize) -> u128 {
    let n = n as u128;
    (0..ell).fold(n + 1, |v, _| (2 * n + 1) * v - n * n - n)
}

/// Local vertex of a base block: its source or its `k`-th sink.
fn local_source(block: usize, n: usize) -> usize {
    block * (n + 1)
}

fn local_sink(block: usize, n: usize, k: usize) -> usize {
    block * (n + 1) + 1 + k
}

#[derive(Debug, Clone)]
pub struct SwitchingNet {
    n: usize,
    ell: usize,
    root: Vertex,
    /// Base-block occurrence to vertex id.
    occ: Vec<u32>,
    block_root: Vec<Vertex>,
    reversed: Vec<bool>,
    assoc: Vec<Vec<Vertex>>,
    source: u32,
    sinks: Vec<u32>,
    inc_start: Vec<u32>,
    inc_edges: Vec<u32>,
}

/// Result of a connectivity query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acceptance {
    pub accepted: bool,
    /// Shortest on-path from the source to the sink, as edge indices.
    pub path: Vec<usize>,
}

impl SwitchingNet {
    /// Builds `N_{2^ell}(root)` on vertex set `[n]`.
    pub fn build(n: usize, ell: usize, root: Vertex) -> Result<Self, NetError> {
        if n < 2 || !n.is_power_of_two() {
            return Err(NetError::BadN(n));
        }
        if root >= n {
            return Err(NetError::BadVertex(root));
        }
        let edges = edge_count_formula(n, ell);
        if edges > MAX_EDGES {
            return Err(NetError::TooLarge(edges));
        }
        let d = 2 * n + 1;
        let blocks = d.pow(ell as u32);
        let mut uf = UnionFind::<usize>::new(blocks * (n + 1));
        glue(&mut uf, n, 0, ell);

        let mut ids = BTreeMap::new();
        let mut occ = Vec::with_capacity(blocks * (n + 1));
        for o in 0..blocks * (n + 1) {
            let rep = uf.find(o);
            let next = ids.len() as u32;
            occ.push(*ids.entry(rep).or_insert(next));
        }

        let mut block_root = Vec::with_capacity(blocks);
        let mut sets: Vec<Option<Vec<Vertex>>> = vec![None; ids.len()];
        for b in 0..blocks {
            let sigma = decode_block(b, n, ell);
            let (aug, r) = augmentation(&sigma, root);
            block_root.push(r);
            let mut src = aug.clone();
            src.push(r);
            for (k, o) in std::iter::once(local_source(b, n)).chain((0..n).map(|k| local_sink(b, n, k))).enumerate() {
                let mut set = src.clone();
                if k > 0 {
                    set.push(k - 1);
                }
                set.sort_unstable();
                let v = occ[o] as usize;
                match &sets[v] {
                    None => sets[v] = Some(set),
                    Some(prev) if *prev == set => {}
                    Some(_) => return Err(NetError::Inconsistent { vertex: v }),
                }
            }
        }
        let assoc = sets.into_iter().map(|s| s.expect("every vertex has an occurrence")).collect();
        let source = occ[source_occurrence(n, 0, ell)];
        let sinks = (0..n).map(|k| occ[sink_occurrence(n, 0, ell, k)]).collect();
        Ok(Self::from_parts(n, ell, root, occ, block_root, assoc, source, sinks))
    }

    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        n: usize,
        ell: usize,
        root: Vertex,
        occ: Vec<u32>,
        block_root: Vec<Vertex>,
        assoc: Vec<Vec<Vertex>>,
        source: u32,
        sinks: Vec<u32>,
    ) -> Self {
        let blocks = block_root.len();
        let reversed = (0..blocks).map(|b| count_twos(&decode_block(b, n, ell)) % 2 == 1).collect();
        let mut net = Self {
            n,
            ell,
            root,
            occ,
            block_root,
            reversed,
            assoc,
            source,
            sinks,
            inc_start: Vec::new(),
            inc_edges: Vec::new(),
        };
        net.index_incidence();
        net
    }

    fn index_incidence(&mut self) {
        let v = self.vertex_count();
        let mut deg = vec![0u32; v + 1];
        for e in 0..self.edge_count() {
            let (a, b) = self.endpoints(e);
            deg[a + 1] += 1;
            deg[b + 1] += 1;
        }
        for k in 0..v {
            deg[k + 1] += deg[k];
        }
        let mut fill = deg.clone();
        let mut edges = vec![0u32; 2 * self.edge_count()];
        for e in 0..self.edge_count() {
            let (a, b) = self.endpoints(e);
            edges[fill[a] as usize] = e as u32;
            fill[a] += 1;
            edges[fill[b] as usize] = e as u32;
            fill[b] += 1;
        }
        self.inc_start = deg;
        self.inc_edges = edges;
    }

    /// Replaces every base block of `prev` by a copy of `N_2` with the same boundary.
    pub fn rebuild_top_down(prev: &SwitchingNet) -> SwitchingNet {
        let n = prev.n;
        let d = 2 * n + 1;
        let mut next_id = prev.vertex_count() as u32;
        let mut assoc = prev.assoc.clone();
        let mut occ = vec![0u32; prev.block_count() * d * (n + 1)];
        let mut block_root = vec![0; prev.block_count() * d];
        for b in 0..prev.block_count() {
            let src = prev.occ[local_source(b, n)];
            let r = prev.block_root[b];
            let base = assoc[src as usize].clone();
            let mid: Vec<u32> = (0..n).map(|k| k as u32 + next_id).collect();
            next_id += n as u32;
            for i in 0..n {
                assoc.push(sorted_with(&base, &[i]));
            }
            let inner: Vec<u32> = (0..n * n).map(|k| k as u32 + next_id).collect();
            next_id += (n * n) as u32;
            for i in 0..n {
                for j in 0..n {
                    assoc.push(sorted_with(&base, &[i, j]));
                }
            }
            for s in Sym::all(n) {
                let nb = b * d + s.index(n);
                let (source, sinks): (u32, Vec<u32>) = match s {
                    Sym::Zero => (src, mid.clone()),
                    Sym::One(i) => (mid[i], (0..n).map(|k| inner[i * n + k]).collect()),
                    Sym::Two(j) => (prev.occ[local_sink(b, n, j)], (0..n).map(|k| inner[k * n + j]).collect()),
                };
                block_root[nb] = match s {
                    Sym::One(i) => i,
                    _ => r,
                };
                occ[local_source(nb, n)] = source;
                for (k, v) in sinks.into_iter().enumerate() {
                    occ[local_sink(nb, n, k)] = v;
                }
            }
        }
        SwitchingNet::from_parts(n, prev.ell + 1, prev.root, occ, block_root, assoc, prev.source, prev.sinks.clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `L = 2^ell`.
    pub fn length(&self) -> usize {
        1 << self.ell
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn edge_count(&self) -> usize {
        self.block_root.len() * self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.assoc.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_root.len()
    }

    pub fn source(&self) -> usize {
        self.source as usize
    }

    /// The sink `[u, v_j]`.
    pub fn sink(&self, j: Vertex) -> usize {
        self.sinks[j] as usize
    }

    pub fn assoc_set(&self, v: usize) -> &[Vertex] {
        &self.assoc[v]
    }

    pub fn edge(&self, e: usize) -> NetEdge {
        NetEdge { sigma: decode_block(e / self.n, self.n, self.ell), i: e % self.n }
    }

    pub fn edge_index(&self, edge: &NetEdge) -> usize {
        let d = 2 * self.n + 1;
        edge.sigma.iter().fold(0, |acc, s| acc * d + s.index(self.n)) * self.n + edge.i
    }

    /// `(tail, head)` after block reversals.
    #[inline]
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (b, i) = (e / self.n, e % self.n);
        let s = self.occ[local_source(b, self.n)] as usize;
        let t = self.occ[local_sink(b, self.n, i)] as usize;
        if self.reversed[b] {
            (t, s)
        } else {
            (s, t)
        }
    }

    /// Whether the edge's block sits under an odd number of `(2,j)` letters.
    pub fn is_reversed(&self, e: usize) -> bool {
        self.reversed[e / self.n]
    }

    /// Edges incident to `v`.
    pub fn incident(&self, v: usize) -> &[u32] {
        &self.inc_edges[self.inc_start[v] as usize..self.inc_start[v + 1] as usize]
    }

    /// The query `(a, b)` carried by edge `e`.
    pub fn query_label(&self, e: usize) -> (Vertex, Vertex) {
        (self.block_root[e / self.n], e % self.n)
    }

    /// Labels `(a, a)` are the constant literal 1 and cost no query, so a
    /// pebble may stay in place and shorter paths are accepted too.
    pub fn edge_on(&self, e: usize, oracle: &GraphOracle<'_>) -> bool {
        let (a, b) = self.query_label(e);
        a == b || oracle.query(a, b)
    }

    /// Evaluates every edge once.
    pub fn on_edges(&self, oracle: &GraphOracle<'_>) -> Vec<bool> {
        (0..self.edge_count()).map(|e| self.edge_on(e, oracle)).collect()
    }

    /// Undirected BFS over on-edges from the source to sink `j`. Each edge is
    /// queried at most once.
    pub fn accepts(&self, oracle: &GraphOracle<'_>, j: Vertex) -> Acceptance {
        let mut memo: Vec<Option<bool>> = vec![None; self.edge_count()];
        let on = |e: usize, memo: &mut Vec<Option<bool>>| *memo[e].get_or_insert_with(|| self.edge_on(e, oracle));
        self.bfs(self.sink(j), |e| on(e, &mut memo))
    }

    /// Same as [`accepts`](Self::accepts) with a precomputed on-set.
    pub fn accepts_with(&self, on: &[bool], j: Vertex) -> Acceptance {
        self.bfs(self.sink(j), |e| on[e])
    }

    fn bfs(&self, target: usize, mut on: impl FnMut(usize) -> bool) -> Acceptance {
        let start = self.source();
        let mut via: Vec<Option<u32>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            if a == target {
                break;
            }
            for &e in self.incident(a) {
                let (x, y) = self.endpoints(e as usize);
                let b = if x == a { y } else { x };
                if !seen[b] && on(e as usize) {
                    seen[b] = true;
                    via[b] = Some(e);
                    queue.push_back(b);
                }
            }
        }
        if !seen[target] {
            return Acceptance { accepted: false, path: Vec::new() };
        }
        let mut path = Vec::new();
        let mut cur = target;
        while let Some(e) = via[cur] {
            path.push(e as usize);
            let (x, y) = self.endpoints(e as usize);
            cur = if x == cur { y } else { x };
        }
        path.reverse();
        Acceptance { accepted: true, path }
    }

    /// Vertices visited by a path of edges starting at the source.
    pub fn path_vertices(&self, path: &[usize]) -> Vec<usize> {
        let mut cur = self.source();
        let mut out = vec![cur];
        for &e in path {
            let (x, y) = self.endpoints(e);
            cur = if x == cur { y } else { x };
            out.push(cur);
        }
        out
    }

    /// Reads a path from the source as pebbling moves on `G`.
    ///
    /// Each step adds or drops one vertex of the associated multiset. Steps
    /// that only change the multiplicity of a vertex already present are not
    /// moves of the set game and are skipped.
    pub fn path_to_moves(&self, path: &[usize]) -> Result<Vec<PebbleMove>, NetError> {
        let mut counts: BTreeMap<Vertex, usize> = BTreeMap::new();
        for &v in &self.assoc[self.source()] {
            *counts.entry(v).or_default() += 1;
        }
        let mut cur = self.source();
        let mut moves = Vec::new();
        for &e in path {
            let (x, y) = self.endpoints(e);
            let next = if x == cur { y } else { x };
            let (from, w) = self.query_label(e);
            let (a, b) = (&self.assoc[cur], &self.assoc[next]);
            if b.len() == a.len() + 1 && sorted_with(a, &[w]) == *b {
                let c = counts.entry(w).or_default();
                *c += 1;
                if *c == 1 {
                    moves.push(PebbleMove::place(from, w));
                }
            } else if a.len() == b.len() + 1 && sorted_with(b, &[w]) == *a {
                let c = counts.get_mut(&w).ok_or(NetError::NotAPebbleStep(e))?;
                *c -= 1;
                if *c == 0 {
                    counts.remove(&w);
                    moves.push(PebbleMove::remove(from, w));
                }
            } else {
                return Err(NetError::NotAPebbleStep(e));
            }
            cur = next;
        }
        Ok(moves)
    }

    /// Checks that `other` is the same network up to renaming vertices,
    /// returning the vertex map.
    pub fn isomorphism_to(&self, other: &SwitchingNet) -> Result<Vec<usize>, String> {
        if (self.n, self.ell, self.root) != (other.n, other.ell, other.root) {
            return Err("parameters differ".into());
        }
        if self.vertex_count() != other.vertex_count() {
            return Err(format!("vertex counts {} vs {}", self.vertex_count(), other.vertex_count()));
        }
        let mut map = vec![usize::MAX; self.vertex_count()];
        let mut inverse = vec![usize::MAX; self.vertex_count()];
        let mut bind = |a: usize, b: usize| -> Result<(), String> {
            if map[a] == usize::MAX && inverse[b] == usize::MAX {
                map[a] = b;
                inverse[b] = a;
            }
            if map[a] != b || inverse[b] != a {
                return Err(format!("vertex {a} maps inconsistently"));
            }
            Ok(())
        };
        bind(self.source(), other.source())?;
        for k in 0..self.n {
            bind(self.sink(k), other.sink(k))?;
        }
        for e in 0..self.edge_count() {
            if self.query_label(e) != other.query_label(e) {
                return Err(format!("edge {e} labels differ"));
            }
            let (a, b) = self.endpoints(e);
            let (c, d) = other.endpoints(e);
            bind(a, c)?;
            bind(b, d)?;
        }
        if map.contains(&usize::MAX) {
            return Err("isolated vertex".into());
        }
        for (v, &w) in map.iter().enumerate() {
            if self.assoc[v] != other.assoc[w] {
                return Err(format!("associated sets of {v} differ"));
            }
        }
        Ok(map)
    }

    /// Lines `sigma;i;label_from;label_to` with 1-based labels.
    pub fn dump(&self) -> String {
        let width = self.n.trailing_zeros() as usize;
        let bits = |x: usize| if width == 0 { String::new() } else { format!("{x:0width$b}") };
        let mut out = String::new();
        for e in 0..self.edge_count() {
            let NetEdge { sigma, i } = self.edge(e);
            let word: Vec<String> = sigma.iter().map(|s| format!("{}:{}", s.tag(), bits(s.payload()))).collect();
            let (a, b) = self.query_label(e);
            let _ = writeln!(out, "{};{};{};{}", word.join(","), bits(i), a + 1, b + 1);
        }
        out
    }
}

fn sorted_with(base: &[Vertex], extra: &[Vertex]) -> Vec<Vertex> {
    let mut v: Vec<Vertex> = base.iter().chain(extra).copied().collect();
    v.sort_unstable();
    v
}

pub fn decode_block(mut b: usize, n: usize, ell: usize) -> Vec<Sym> {
    let d = 2 * n + 1;
    let mut sigma = vec![Sym::Zero; ell];
    for slot in sigma.iter_mut().rev() {
        *slot = Sym::from_index(b % d, n);
        b /= d;
    }
    sigma
}

/// Augmentation multiset and root of the block at `sigma`.
fn augmentation(sigma: &[Sym], root: Vertex) -> (Vec<Vertex>, Vertex) {
    let mut aug = Vec::with_capacity(sigma.len());
    let mut r = root;
    for s in sigma {
        match *s {
            Sym::Zero => {}
            Sym::One(i) => {
                aug.push(r);
                r = i;
            }
            Sym::Two(j) => aug.push(j),
        }
    }
    (aug, r)
}

/// Occurrence of the source of the sub-network at block prefix `p` with `d` levels left.
fn source_occurrence(n: usize, p: usize, d: usize) -> usize {
    let width = (2 * n + 1).pow(d as u32);
    local_source(p * width, n)
}

fn sink_occurrence(n: usize, p: usize, d: usize, k: usize) -> usize {
    if d == 0 {
        local_sink(p, n, k)
    } else {
        source_occurrence(n, p * (2 * n + 1) + Sym::Two(k).index(n), d - 1)
    }
}

fn glue(uf: &mut UnionFind<usize>, n: usize, p: usize, d: usize) {
    if d == 0 {
        return;
    }
    let child = |s: Sym| p * (2 * n + 1) + s.index(n);
    for i in 0..n {
        uf.union(sink_occurrence(n, child(Sym::Zero), d - 1, i), source_occurrence(n, child(Sym::One(i)), d - 1));
        for j in 0..n {
            uf.union(
                sink_occurrence(n, child(Sym::One(i)), d - 1, j),
                sink_occurrence(n, child(Sym::Two(j)), d - 1, i),
            );
        }
    }
    for s in Sym::all(n) {
        glue(uf, n, child(s), d - 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Digraph;

    #[test]
    fn base_star() {
        let net = SwitchingNet::build(4, 0, 2).unwrap();
        assert_eq!((net.edge_count(), net.vertex_count()), (4, 5));
        for k in 0..4 {
            assert_eq!(net.endpoints(k), (net.source(), net.sink(k)));
            assert_eq!(net.query_label(k), (2, k));
        }
        assert_eq!(net.assoc_set(net.source()), &[2]);
    }

    #[test]
    fn small_counts() {
        let net = SwitchingNet::build(2, 1, 0).unwrap();
        assert_eq!((net.edge_count(), net.vertex_count()), (10, 9));
        assert_eq!(SwitchingNet::build(4, 2, 0).unwrap().edge_count(), 324);
        assert_eq!(vertex_count_recurrence(2, 1), 9);
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1(&[Sym::Zero, Sym::One(1), Sym::Two(0)]), 2);
        assert_eq!(f1(&[Sym::Zero, Sym::Zero]), 0);
        assert_eq!(f1(&[Sym::One(0), Sym::One(1)]), 2);
    }

    #[test]
    fn labels_follow_last_tag_one() {
        let net = SwitchingNet::build(4, 2, 3).unwrap();
        let e = net.edge_index(&NetEdge { sigma: vec![Sym::One(1), Sym::Zero], i: 2 });
        assert_eq!(net.query_label(e), (1, 2));
        let net1 = SwitchingNet::build(4, 1, 3).unwrap();
        let e = net1.edge_index(&NetEdge { sigma: vec![Sym::Two(0)], i: 2 });
        assert_eq!(net1.query_label(e), (3, 2));
    }

    #[test]
    fn sink_sets() {
        let net = SwitchingNet::build(2, 2, 1).unwrap();
        assert_eq!(net.assoc_set(net.source()), &[1]);
        assert_eq!(net.assoc_set(net.sink(0)), &[0, 1]);
        assert_eq!(net.assoc_set(net.sink(1)), &[1, 1]);
    }

    #[test]
    fn single_edge_graph() {
        let g = Digraph::from_edges(2, &[(0, 1)]).unwrap();
        let o = GraphOracle::new(&g);
        let net = SwitchingNet::build(2, 0, 0).unwrap();
        assert!(net.edge_on(1, &o));
        assert!(net.edge_on(0, &o));
        assert_eq!(o.query_count(), 1);
        let acc = net.accepts(&o, 1);
        assert!(acc.accepted);
        assert_eq!(acc.path.len(), 1);
    }

    #[test]
    fn accepts_exactly_short_paths() {
        for g in Digraph::all(2).chain([Digraph::layered_path(4).unwrap(), Digraph::random(4, 0.3, 5).unwrap()]) {
            let n = g.n();
            for ell in 0..=2 {
                for u in 0..n {
                    let net = SwitchingNet::build(n, ell, u).unwrap();
                    let o = GraphOracle::new(&g);
                    for v in 0..n {
                        let want = crate::graph::bfs_distance(&g, u, v).is_some_and(|d| d <= 1 << ell);
                        assert_eq!(net.accepts(&o, v).accepted, want, "{g:?} l={ell} {u}->{v}");
                    }
                }
            }
        }
    }

    #[test]
    fn accepts_queries_each_edge_at_most_once() {
        let g = Digraph::complete(4).unwrap();
        let o = GraphOracle::new(&g);
        let net = SwitchingNet::build(4, 2, 0).unwrap();
        assert!(net.accepts(&o, 3).accepted);
        assert!(o.query_count() <= net.edge_count() as u64);
    }

    #[test]
    fn rebuild_matches_build() {
        for n in [2, 4] {
            let mut net = SwitchingNet::build(n, 0, 1).unwrap();
            for ell in 1..=2 {
                net = SwitchingNet::rebuild_top_down(&net);
                let direct = SwitchingNet::build(n, ell, 1).unwrap();
                net.isomorphism_to(&direct).unwrap();
            }
        }
    }

    #[test]
    fn dump_lines() {
        let net = SwitchingNet::build(2, 1, 0).unwrap();
        let text = net.dump();
        assert_eq!(text.lines().count(), 10);
        assert_eq!(text.lines().next(), Some("0:0;0;1;1"));
        assert!(text.lines().any(|l| l == "1:1;0;2;1"));
    }
}
