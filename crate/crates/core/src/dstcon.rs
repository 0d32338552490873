//! The breadth-first outer loop for st-connectivity over a pluggable
//! bounded-distance decider, with majority boosting and resource accounting.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{Digraph, GraphOracle, Vertex};
use crate::span::{self, Mode, SpanError};

#[derive(Debug)]
pub enum DstconError {
    InvalidParams(String),
    Decider(SpanError),
    Invariant(String),
}

impl fmt::Display for DstconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DstconError::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
            DstconError::Decider(e) => write!(f, "decider failed: {e}"),
            DstconError::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl std::error::Error for DstconError {}

impl From<SpanError> for DstconError {
    fn from(e: SpanError) -> Self {
        DstconError::Decider(e)
    }
}

/// Flavours of `Dist_L(g, u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Decider {
    Exact,
    SwitchingNet(Mode),
    /// Answers like `inner` with probability `p` and flipped otherwise.
    Noisy { p: f64, seed: u64, inner: Box<Decider> },
}

impl Decider {
    pub fn noisy(p: f64, seed: u64) -> Self {
        Decider::Noisy { p, seed, inner: Box::new(Decider::Exact) }
    }

    pub fn randomized(&self) -> bool {
        matches!(self, Decider::Noisy { .. })
    }

    /// `D_T(n, L)` charged per call.
    pub fn cost(&self, n: usize, l: usize) -> u64 {
        match self {
            Decider::Exact => n as u64,
            Decider::SwitchingNet(_) => {
                if l == 0 {
                    1
                } else {
                    span::t_formula(n, l.next_power_of_two()).ceil() as u64
                }
            }
            Decider::Noisy { inner, .. } => inner.cost(n, l),
        }
    }

    /// Classical working space of one call.
    pub fn classical_space(&self, n: usize) -> usize {
        match self {
            Decider::Exact => n,
            Decider::SwitchingNet(_) => 0,
            Decider::Noisy { inner, .. } => inner.classical_space(n),
        }
    }
}

impl FromStr for Decider {
    type Err = String;

    /// `exact`, `swnet`, `swnet:spectral`, `swnet:exact` or `noisy:P` with an
    /// optional `:SEED`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["exact"] => Ok(Decider::Exact),
            ["swnet"] | ["swnet", "exact"] => Ok(Decider::SwitchingNet(Mode::Exact)),
            ["swnet", "spectral"] => Ok(Decider::SwitchingNet(Mode::Spectral)),
            ["noisy", p, rest @ ..] if rest.len() <= 1 => {
                let p: f64 = p.parse().map_err(|_| format!("bad probability in {s:?}"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability {p} outside [0, 1]"));
                }
                let seed = match rest {
                    [seed] => seed.parse().map_err(|_| format!("bad seed in {s:?}"))?,
                    _ => 0,
                };
                Ok(Decider::noisy(p, seed))
            }
            _ => Err(format!("unknown decider {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Connected,
    NotConnected,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResourceLedger {
    /// Decider calls weighted by `D_T`.
    pub time_steps: u64,
    /// Peak classical cells: frontier records plus decider workspace.
    pub space_cells: usize,
    pub oracle_queries: u64,
    pub quantum_space_cells: usize,
    pub decider_calls: u64,
    pub peak_frontier: usize,
    pub guard_exhausted: bool,
}

/// A vertex admitted to the frontier: `round` 0 is the seed layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Admission {
    pub round: usize,
    pub vertex: Vertex,
}

#[derive(Debug, Clone, Serialize)]
pub struct DstconOutcome {
    pub verdict: Verdict,
    /// Offset `j` whose frontier stayed small, if any.
    pub offset: Option<usize>,
    pub admissions: Vec<Admission>,
    pub ledger: ResourceLedger,
}

/// Cells of one frontier record: a vertex and a `ceil(log L)`-bit counter.
pub fn record_cells(l: usize) -> usize {
    1 + ceil_log2(l)
}

fn ceil_log2(l: usize) -> usize {
    l.max(1).next_power_of_two().trailing_zeros() as usize
}

/// Largest frontier the guard admits: `floor(n/L) + 1`.
pub fn frontier_cap(n: usize, l: usize) -> usize {
    n / l + 1
}

/// Bound on classical cells: `(ceil(n/L) + 1)(1 + ceil(log L))` plus the
/// decider's own space.
pub fn space_bound(n: usize, l: usize, decider: &Decider) -> usize {
    (n.div_ceil(l) + 1) * record_cells(l) + decider.classical_space(n)
}

/// Upper bound on decider calls before boosting: `L` offsets, each with a
/// seed sweep, `floor(n/L)` rounds over all vertices against a frontier of at
/// most `floor(n/L) + 1` vertices, and the final check.
pub fn call_bound(n: usize, l: usize) -> u64 {
    let (n, l) = (n as u64, l as u64);
    let cap = n / l + 1;
    l * (2 * n + (n / l) * n * 2 * cap + cap)
}

/// Runs `Dist_L` queries with boosting and bookkeeping.
pub struct DistRunner<'g> {
    g: &'g Digraph,
    decider: Decider,
    reps: usize,
    rng: Option<ChaCha8Rng>,
    ledger: ResourceLedger,
}

impl<'g> DistRunner<'g> {
    pub fn new(g: &'g Digraph, decider: Decider, reps: usize) -> Result<Self, DstconError> {
        if reps == 0 || reps % 2 == 0 {
            return Err(DstconError::InvalidParams(format!("boost_reps = {reps} must be odd")));
        }
        let rng = match &decider {
            Decider::Noisy { p, seed, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(DstconError::InvalidParams(format!("probability {p} outside [0, 1]")));
                }
                Some(ChaCha8Rng::seed_from_u64(*seed))
            }
            _ => None,
        };
        Ok(Self { g, decider, reps, rng, ledger: ResourceLedger::default() })
    }

    pub fn ledger(&self) -> &ResourceLedger {
        &self.ledger
    }

    /// Majority over `reps` calls for a randomized decider, one call otherwise.
    pub fn dist(&mut self, u: Vertex, v: Vertex, l: usize) -> Result<bool, DstconError> {
        let reps = if self.decider.randomized() { self.reps } else { 1 };
        let mut yes = 0;
        for _ in 0..reps {
            if self.single(u, v, l)? {
                yes += 1;
            }
        }
        Ok(2 * yes > reps)
    }

    fn single(&mut self, u: Vertex, v: Vertex, l: usize) -> Result<bool, DstconError> {
        self.ledger.decider_calls += 1;
        self.ledger.time_steps += self.decider.cost(self.g.n(), l);
        let decider = self.decider.clone();
        self.answer(&decider, u, v, l)
    }

    fn answer(&mut self, decider: &Decider, u: Vertex, v: Vertex, l: usize) -> Result<bool, DstconError> {
        match decider {
            Decider::Exact => {
                let oracle = GraphOracle::new(self.g);
                let hit = bounded_bfs(&oracle, u, v, l);
                self.ledger.oracle_queries += oracle.query_count();
                Ok(hit)
            }
            Decider::SwitchingNet(mode) => {
                let out = span::dist_l(self.g, u, v, l, *mode)?;
                self.ledger.oracle_queries += out.ledger.oracle_queries;
                self.ledger.quantum_space_cells = self.ledger.quantum_space_cells.max(out.ledger.quantum_space_cells);
                Ok(out.answer)
            }
            Decider::Noisy { p, inner, .. } => {
                let truth = self.answer(inner, u, v, l)?;
                let keep = self.rng.as_mut().expect("noisy decider has a generator").random_bool(*p);
                Ok(if keep { truth } else { !truth })
            }
        }
    }

    fn finish(mut self, peak_frontier: usize, l: usize) -> ResourceLedger {
        self.ledger.peak_frontier = peak_frontier;
        self.ledger.space_cells = peak_frontier * record_cells(l) + self.decider.classical_space(self.g.n());
        self.ledger
    }
}

/// Breadth-first search to depth `l` through oracle queries.
pub fn bounded_bfs(oracle: &GraphOracle<'_>, u: Vertex, v: Vertex, l: usize) -> bool {
    if u == v {
        return true;
    }
    let n = oracle.graph().n();
    let mut seen = vec![false; n];
    seen[u] = true;
    let mut frontier = vec![u];
    for _ in 0..l {
        let mut next = Vec::new();
        for &a in &frontier {
            for (b, known) in seen.iter_mut().enumerate() {
                if !*known && oracle.query(a, b) {
                    if b == v {
                        return true;
                    }
                    *known = true;
                    next.push(b);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    false
}

/// Whether `v` is at distance exactly `L` from the set: within `L` of some
/// member and not within `L - 1` of any.
fn exact_step(run: &mut DistRunner<'_>, set: &[Vertex], v: Vertex, l: usize) -> Result<bool, DstconError> {
    let mut reached = false;
    for &u in set {
        if run.dist(u, v, l)? {
            reached = true;
            break;
        }
    }
    if !reached {
        return Ok(false);
    }
    for &u in set {
        if run.dist(u, v, l - 1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `DSTCON_L(g, s, t)`. Offsets `j = 0..L-1` are tried in turn; an offset is
/// abandoned as soon as the frontier would outgrow `n/L`, and the first offset
/// that completes decides.
pub fn dstcon(
    g: &Digraph,
    s: Vertex,
    t: Vertex,
    l: usize,
    decider: Decider,
    boost_reps: usize,
) -> Result<DstconOutcome, DstconError> {
    let n = g.n();
    if l == 0 || l > n {
        return Err(DstconError::InvalidParams(format!("L = {l} must lie in 1..={n}")));
    }
    if s >= n || t >= n {
        return Err(DstconError::InvalidParams(format!("vertex {} out of range", s.max(t))));
    }
    let bound = space_bound(n, l, &decider);
    let mut run = DistRunner::new(g, decider, boost_reps)?;
    let over = |size: usize| size * l > n;
    let mut peak = 1;
    'offsets: for j in 0..l {
        let mut set = vec![s];
        let mut admissions = vec![Admission { round: 0, vertex: s }];
        if j > 0 {
            for v in 0..n {
                if run.dist(s, v, j)? && !run.dist(s, v, j - 1)? {
                    if over(set.len()) {
                        continue 'offsets;
                    }
                    set.push(v);
                    admissions.push(Admission { round: 0, vertex: v });
                    peak = peak.max(set.len());
                }
            }
        }
        for round in 1..=n / l {
            let mut fresh = Vec::new();
            for v in 0..n {
                if exact_step(&mut run, &set, v, l)? {
                    if over(set.len() + fresh.len()) {
                        continue 'offsets;
                    }
                    fresh.push(v);
                    peak = peak.max(set.len() + fresh.len());
                }
            }
            admissions.extend(fresh.iter().map(|&vertex| Admission { round, vertex }));
            set.extend(fresh);
        }
        let mut connected = false;
        for &u in &set {
            if run.dist(u, t, l)? {
                connected = true;
                break;
            }
        }
        let ledger = run.finish(peak, l);
        check_space(&ledger, bound, n, l)?;
        let verdict = if connected { Verdict::Connected } else { Verdict::NotConnected };
        return Ok(DstconOutcome { verdict, offset: Some(j), admissions, ledger });
    }
    let mut ledger = run.finish(peak, l);
    ledger.guard_exhausted = true;
    check_space(&ledger, bound, n, l)?;
    Ok(DstconOutcome { verdict: Verdict::NotConnected, offset: None, admissions: vec![], ledger })
}

fn check_space(ledger: &ResourceLedger, bound: usize, n: usize, l: usize) -> Result<(), DstconError> {
    if ledger.peak_frontier > frontier_cap(n, l) || ledger.space_cells > bound {
        return Err(DstconError::Invariant(format!(
            "frontier {} of cap {}, {} cells of bound {bound}",
            ledger.peak_frontier,
            frontier_cap(n, l),
            ledger.space_cells
        )));
    }
    Ok(())
}

/// Plain reachability, the ground truth for the driver.
pub fn reachable(g: &Digraph, s: Vertex, t: Vertex) -> bool {
    crate::graph::bfs_distance(g, s, t).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_layers;

    fn path5() -> Digraph {
        Digraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn path_examples() {
        let g = path5();
        assert_eq!(dstcon(&g, 0, 4, 2, Decider::Exact, 1).unwrap().verdict, Verdict::Connected);
        assert_eq!(dstcon(&g, 4, 0, 2, Decider::Exact, 1).unwrap().verdict, Verdict::NotConnected);
    }

    #[test]
    fn parameters_are_checked() {
        let g = path5();
        assert!(matches!(dstcon(&g, 0, 4, 0, Decider::Exact, 1), Err(DstconError::InvalidParams(_))));
        assert!(matches!(dstcon(&g, 0, 4, 6, Decider::Exact, 1), Err(DstconError::InvalidParams(_))));
        assert!(matches!(dstcon(&g, 0, 4, 2, Decider::Exact, 2), Err(DstconError::InvalidParams(_))));
    }

    #[test]
    fn parses_deciders() {
        assert_eq!("exact".parse::<Decider>().unwrap(), Decider::Exact);
        assert_eq!("swnet:spectral".parse::<Decider>().unwrap(), Decider::SwitchingNet(Mode::Spectral));
        assert_eq!("noisy:0.9:7".parse::<Decider>().unwrap(), Decider::noisy(0.9, 7));
        assert!("noisy:1.5".parse::<Decider>().is_err());
        assert!("bfs".parse::<Decider>().is_err());
    }

    #[test]
    fn frontier_follows_distance_layers() {
        let g = Digraph::random(5, 0.35, 11).unwrap();
        for l in 1..=5 {
            let out = dstcon(&g, 0, 4, l, Decider::Exact, 1).unwrap();
            let dist = bfs_layers(&g, 0);
            let j = out.offset.unwrap();
            for a in &out.admissions[1..] {
                assert_eq!(dist[a.vertex], Some(j + a.round * l));
            }
            assert!(out.ledger.decider_calls <= call_bound(5, l));
        }
    }

    #[test]
    fn perfect_noise_is_exact() {
        let g = path5();
        let out = dstcon(&g, 0, 4, 2, Decider::noisy(1.0, 3), 3).unwrap();
        assert_eq!(out.verdict, Verdict::Connected);
    }

    #[test]
    fn switching_net_decider_agrees() {
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (3, 0)]).unwrap();
        for (s, t) in [(0, 2), (2, 0), (3, 2)] {
            let want = reachable(&g, s, t);
            let out = dstcon(&g, s, t, 2, Decider::SwitchingNet(Mode::Exact), 1).unwrap();
            assert_eq!(out.verdict == Verdict::Connected, want);
            assert!(out.ledger.quantum_space_cells > 0);
        }
    }
}
