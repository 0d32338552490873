//! The reversible pebbling game on a digraph.
//!
//! A move is legal when its `from` vertex carries a pebble and `(from, to)` is
//! an edge; it then places or removes the pebble on `to`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::graph::{Digraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PebbleError {
    #[error("illegal move {0:?} in configuration {1:?}")]
    IllegalMove(PebbleMove, Vec<Vertex>),
    #[error("not a directed path of the requested length: {0}")]
    BadPath(String),
    #[error("configuration search exceeded the cap of {0}")]
    CapExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Place,
    Remove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PebbleMove {
    pub kind: MoveKind,
    pub from: Vertex,
    pub to: Vertex,
}

impl PebbleMove {
    pub fn place(from: Vertex, to: Vertex) -> Self {
        Self { kind: MoveKind::Place, from, to }
    }

    pub fn remove(from: Vertex, to: Vertex) -> Self {
        Self { kind: MoveKind::Remove, from, to }
    }

    /// The move that undoes this one.
    pub fn inverse(self) -> Self {
        let kind = match self.kind {
            MoveKind::Place => MoveKind::Remove,
            MoveKind::Remove => MoveKind::Place,
        };
        Self { kind, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PebbleConfig {
    pub pebbled: BTreeSet<Vertex>,
}

impl PebbleConfig {
    pub fn start(u: Vertex) -> Self {
        Self { pebbled: BTreeSet::from([u]) }
    }

    pub fn len(&self) -> usize {
        self.pebbled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pebbled.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.pebbled.contains(&v)
    }
}

pub fn apply_move(config: &PebbleConfig, mv: PebbleMove, g: &Digraph) -> Result<PebbleConfig, PebbleError> {
    let illegal = || PebbleError::IllegalMove(mv, config.pebbled.iter().copied().collect());
    if !config.contains(mv.from) || !g.has_edge(mv.from, mv.to) {
        return Err(illegal());
    }
    let mut next = config.clone();
    let changed = match mv.kind {
        MoveKind::Place => next.pebbled.insert(mv.to),
        MoveKind::Remove => next.pebbled.remove(&mv.to),
    };
    if changed {
        Ok(next)
    } else {
        Err(illegal())
    }
}

/// Replays `moves` from `start`, returning the final configuration and the
/// largest pebble count seen.
pub fn replay(g: &Digraph, start: PebbleConfig, moves: &[PebbleMove]) -> Result<(PebbleConfig, usize), PebbleError> {
    let mut peak = start.len();
    let mut config = start;
    for &mv in moves {
        config = apply_move(&config, mv, g)?;
        peak = peak.max(config.len());
    }
    Ok((config, peak))
}

/// The recursive doubling strategy along `path = (u_0, ..., u_L)`.
///
/// Reach `u_{L/2}`, reach `u_L` from there, then undo the first half.
pub fn strategy_moves(g: &Digraph, path: &[Vertex], l: usize) -> Result<Vec<PebbleMove>, PebbleError> {
    if !l.is_power_of_two() {
        return Err(PebbleError::BadPath(format!("L = {l} is not a power of two")));
    }
    if path.len() != l + 1 {
        return Err(PebbleError::BadPath(format!("expected {} vertices, got {}", l + 1, path.len())));
    }
    if let Some(w) = path.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
        return Err(PebbleError::BadPath(format!("({}, {}) is not an edge", w[0] + 1, w[1] + 1)));
    }
    let mut out = Vec::with_capacity(3usize.pow(l.trailing_zeros()));
    doubling(path, 0, l, &mut out);
    Ok(out)
}

fn doubling(path: &[Vertex], a: usize, k: usize, out: &mut Vec<PebbleMove>) {
    if k == 1 {
        out.push(PebbleMove::place(path[a], path[a + 1]));
        return;
    }
    let h = k / 2;
    let first = out.len();
    doubling(path, a, h, out);
    let half: Vec<_> = out[first..].to_vec();
    doubling(path, a + h, h, out);
    out.extend(half.iter().rev().map(|m| m.inverse()));
}

/// All configurations with at most `max_pebbles` pebbles reachable from `{u}`.
pub fn reachable_configs(
    g: &Digraph,
    u: Vertex,
    max_pebbles: usize,
    cap: usize,
) -> Result<HashSet<PebbleConfig>, PebbleError> {
    assert!(g.n() <= 64, "bitmask search supports n <= 64");
    let start = 1u64 << u;
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for from in (0..g.n()).filter(|&v| c >> v & 1 == 1) {
            for to in g.out_neighbors(from) {
                let next = c ^ (1u64 << to);
                if next.count_ones() as usize > max_pebbles || !seen.insert(next) {
                    continue;
                }
                if seen.len() > cap {
                    return Err(PebbleError::CapExceeded(cap));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|c| PebbleConfig { pebbled: (0..g.n()).filter(|&v| c >> v & 1 == 1).collect() })
        .collect())
}

/// Text dump: `# L=<L> path=<v0,...,vL>` followed by `P from to` / `R from to` (1-based).
pub fn format_trace(l: usize, path: &[Vertex], moves: &[PebbleMove]) -> String {
    let joined: Vec<String> = path.iter().map(|v| (v + 1).to_string()).collect();
    let mut out = format!("# L={l} path={}\n", joined.join(","));
    for m in moves {
        let tag = match m.kind {
            MoveKind::Place => 'P',
            MoveKind::Remove => 'R',
        };
        let _ = writeln!(out, "{tag} {} {}", m.from + 1, m.to + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_layers;

    #[test]
    fn single_moves() {
        let g = Digraph::from_edges(3, &[(0, 1)]).unwrap();
        let c = apply_move(&PebbleConfig::start(0), PebbleMove::place(0, 1), &g).unwrap();
        assert_eq!(c.pebbled, BTreeSet::from([0, 1]));
        let back = apply_move(&c, PebbleMove::remove(0, 1), &g).unwrap();
        assert_eq!(back, PebbleConfig::start(0));
        assert!(apply_move(&PebbleConfig::start(0), PebbleMove::place(0, 2), &g).is_err());
        assert!(apply_move(&c, PebbleMove::place(0, 1), &g).is_err());
        assert!(apply_move(&PebbleConfig::start(0), PebbleMove::remove(0, 1), &g).is_err());
    }

    #[test]
    fn strategy_sizes() {
        for (l, moves, pebbles) in [(1, 1, 2), (2, 3, 3), (4, 9, 4), (8, 27, 5)] {
            let g = Digraph::layered_path(l + 1).unwrap();
            let path: Vec<_> = (0..=l).collect();
            let m = strategy_moves(&g, &path, l).unwrap();
            assert_eq!(m.len(), moves);
            let (end, peak) = replay(&g, PebbleConfig::start(0), &m).unwrap();
            assert_eq!(end.pebbled, BTreeSet::from([0, l]));
            assert!(peak <= pebbles, "L={l}: peak {peak}");
        }
    }

    #[test]
    fn strategy_rejects_non_paths() {
        let g = Digraph::layered_path(3).unwrap();
        assert!(strategy_moves(&g, &[0, 2, 1], 2).is_err());
        assert!(strategy_moves(&g, &[0, 1, 2], 3).is_err());
        assert!(strategy_moves(&g, &[0, 1], 2).is_err());
    }

    #[test]
    fn bounded_pebbles_bound_distance() {
        let g = Digraph::layered_path(4).unwrap();
        let configs = reachable_configs(&g, 0, 2, 1_000_000).unwrap();
        assert!(configs.iter().all(|c| c.pebbled.iter().all(|&v| v < 2)));
        let g = Digraph::layered_path(10).unwrap();
        let configs = reachable_configs(&g, 0, 3, 1_000_000).unwrap();
        let far_pairs = configs.iter().filter(|c| c.len() == 2 && c.contains(0) && c.pebbled.iter().any(|&v| v > 2));
        assert_eq!(far_pairs.count(), 0);
    }

    #[test]
    fn isolated_start() {
        let g = Digraph::from_edges(3, &[(1, 2)]).unwrap();
        let configs = reachable_configs(&g, 0, 4, 100).unwrap();
        assert_eq!(configs, HashSet::from([PebbleConfig::start(0)]));
    }

    #[test]
    fn pebbled_vertices_are_reachable() {
        for seed in 0..10 {
            let g = Digraph::random(6, 0.3, seed).unwrap();
            let dist = bfs_layers(&g, 0);
            for c in reachable_configs(&g, 0, 4, 1_000_000).unwrap() {
                assert!(c.pebbled.iter().all(|&v| dist[v].is_some()));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = Digraph::complete(8).unwrap();
        assert_eq!(reachable_configs(&g, 0, 8, 10), Err(PebbleError::CapExceeded(10)));
    }

    #[test]
    fn trace_format() {
        let g = Digraph::layered_path(3).unwrap();
        let m = strategy_moves(&g, &[0, 1, 2], 2).unwrap();
        assert_eq!(format_trace(2, &[0, 1, 2], &m), "# L=2 path=1,2,3\nP 1 2\nP 2 3\nR 1 2\n");
    }
}
