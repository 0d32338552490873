//! Evaluation of a switching network through the reflections around `A(x)`
//! and `B`, simulated with dense linear algebra.
//!
//! The walk operator `W = (2P_A - I)(2P_{B^perp} - I) = -U` has a phase-0
//! eigenspace `(A ∩ B^perp) ⊕ (A^perp ∩ B)`. The start state
//! `(|<-,s> - |->,t>)/sqrt 2` overlaps it by exactly `1/(2 + R)` when the
//! network accepts with optimal-flow energy `R`, and not at all otherwise.
//!
//! The spectrum is read from the principal angles between `A^perp` and
//! `B^perp`, which only needs an eigendecomposition of size `dim B^perp`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::basis::{bperp_basis, FlowTable};
use crate::flow::{a_basis_for, b_minus_states, optimal_flow_lsq, FlowError, Layout, StateVec};
use crate::graph::{attach_source_path, pad_to_power_of_two, Digraph, GraphOracle, Vertex};
use crate::linalg::{self, LinalgError};
use crate::network::{NetError, SwitchingNet};

/// Largest `2|E| + 4` evaluated spectrally; larger instances fall back to exact mode.
pub const SPECTRAL_DIM_CAP: usize = 5000;
/// Global acceptance threshold on the phase-0 overlap.
pub const THRESHOLD: f64 = 0.01;
/// Agreement required between the two constructions of `P_B` (Frobenius).
pub const PROJECTOR_TOL: f64 = 1e-8;
/// Squared principal cosines closer than this to 0 or 1 count as exact.
pub const ANGLE_TOL: f64 = 1e-8;

const CACHE_BUDGET_BYTES: usize = 512 << 20;

#[derive(Debug, thiserror::Error)]
pub enum SpanError {
    #[error("the two constructions of P_B differ by {0:.3e} in Frobenius norm")]
    BasisMismatch(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("L = {0} must be a power of two")]
    BadLength(usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
}

/// The input-independent space `B` of `N_{2^ell}` with a chosen sink.
#[derive(Debug)]
pub struct BSpace {
    layout: Layout,
    edges: usize,
    /// Orthonormal basis of `B^-` by Gram-Schmidt.
    q_minus: DMatrix<f64>,
    /// Normalized explicit basis of `B^perp`.
    q_perp: DMatrix<f64>,
    mismatch: f64,
}

impl BSpace {
    /// Builds both descriptions of `B` and checks that they agree.
    pub fn build(net: &SwitchingNet, sink: Vertex) -> Result<Self, SpanError> {
        let layout = Layout::of(net);
        let q_minus = linalg::orthonormalize(&b_minus_states(net, sink))?;
        let table = FlowTable::new(net.n(), net.ell());
        let q_perp = bperp_basis(net, &table, sink).normalized().matrix();
        let space = Self { layout, edges: net.edge_count(), q_minus, q_perp, mismatch: 0.0 };
        let mismatch = space.projector_distance();
        if mismatch.is_nan() || mismatch > PROJECTOR_TOL {
            return Err(SpanError::BasisMismatch(mismatch));
        }
        Ok(Self { mismatch, ..space })
    }

    /// `||P_B - (I - P_{B^perp})||_F`, where `P_B` comes from Gram-Schmidt on
    /// `B^-` plus the symmetric edge states. Those are already orthonormal up
    /// to scale and orthogonal to `B^-`, so Gram-Schmidt leaves them as they are.
    ///
    /// Uses `||P - R||^2 = tr P + tr R - 2 tr(PR)` for projectors, plus a
    /// separate check that the `B^perp` columns are orthonormal.
    fn projector_distance(&self) -> f64 {
        let q = &self.q_perp;
        let b = q.ncols();
        let rank_b = self.q_minus.ncols() + self.edges;
        let cross = self.q_minus.transpose() * q;
        let mut sym = 0.0;
        for k in 0..b {
            let col = q.column(k);
            for e in 0..self.edges {
                let s = col[self.layout.fwd(e)] + col[self.layout.bwd(e)];
                sym += s * s / 2.0;
            }
        }
        let dim = self.layout.dim() as f64;
        let sq = (dim - b as f64 - rank_b as f64) + 2.0 * cross.norm_squared() + 2.0 * sym;
        let ortho = (q.transpose() * q - DMatrix::identity(b, b)).norm();
        sq.max(0.0).sqrt() + ortho
    }

    pub fn mismatch(&self) -> f64 {
        self.mismatch
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn rank(&self) -> usize {
        self.q_minus.ncols() + self.edges
    }

    pub fn bperp_dim(&self) -> usize {
        self.q_perp.ncols()
    }

    /// Orthonormal columns spanning `B^perp`.
    pub fn bperp(&self) -> &DMatrix<f64> {
        &self.q_perp
    }

    /// `P_B` from the Gram-Schmidt route.
    pub fn p_b(&self) -> DMatrix<f64> {
        let mut p = &self.q_minus * self.q_minus.transpose();
        for e in 0..self.edges {
            let (f, r) = (self.layout.fwd(e), self.layout.bwd(e));
            for (a, c) in [(f, f), (f, r), (r, f), (r, r)] {
                p[(a, c)] += 0.5;
            }
        }
        p
    }

    /// `I - P_{B^perp}` from the explicit basis.
    pub fn p_b_from_complement(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim()) - &self.q_perp * self.q_perp.transpose()
    }
}

type CacheKey = (usize, usize, Vertex);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<BSpace>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<BSpace>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached [`BSpace::build`]; `B` depends only on `n`, `ell` and the sink.
pub fn b_space(net: &SwitchingNet, sink: Vertex) -> Result<Arc<BSpace>, SpanError> {
    let key = (net.n(), net.ell(), sink);
    if let Some(hit) = cache().lock().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let built = Arc::new(BSpace::build(net, sink)?);
    let mut map = cache().lock().expect("cache lock");
    let size = |s: &BSpace| 8 * s.dim() * (s.q_minus.ncols() + s.q_perp.ncols());
    if map.values().map(|s| size(s)).sum::<usize>() + size(&built) > CACHE_BUDGET_BYTES {
        map.clear();
    }
    map.insert(key, built.clone());
    Ok(built)
}

/// Reflections around `A(x)` and `B` for one input and sink.
#[derive(Debug, Clone)]
pub struct ReflectionPair {
    pub on: Vec<bool>,
    pub sink: Vertex,
    pub b: Arc<BSpace>,
}

/// Which eigenspace of `U` to project on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Zero,
    Pi,
}

impl ReflectionPair {
    /// Queries every edge once.
    pub fn build(net: &SwitchingNet, oracle: &GraphOracle<'_>, sink: Vertex) -> Result<Self, SpanError> {
        Self::with_on(net, net.on_edges(oracle), sink)
    }

    pub fn with_on(net: &SwitchingNet, on: Vec<bool>, sink: Vertex) -> Result<Self, SpanError> {
        Ok(Self { on, sink, b: b_space(net, sink)? })
    }

    fn layout(&self) -> Layout {
        Layout { edges: self.on.len() }
    }

    pub fn dim(&self) -> usize {
        self.layout().dim()
    }

    pub fn a_perp_dim(&self) -> usize {
        self.on.len() + 2
    }

    pub fn p_a(&self) -> DMatrix<f64> {
        let basis = a_basis_for(&self.on);
        let m = basis.normalized().matrix();
        &m * m.transpose()
    }

    pub fn p_b(&self) -> DMatrix<f64> {
        self.b.p_b()
    }

    /// `U = (2P_A - I)(2P_B - I)`.
    pub fn unitary(&self) -> DMatrix<f64> {
        let d = self.dim();
        let eye = DMatrix::<f64>::identity(d, d);
        (self.p_a() * 2.0 - &eye) * (self.p_b() * 2.0 - eye)
    }

    /// Applies the projector onto `A(x)^perp`.
    pub fn project_a_perp(&self, v: &DVector<f64>) -> DVector<f64> {
        let layout = self.layout();
        let mut out = DVector::zeros(v.len());
        for (e, &x) in self.on.iter().enumerate() {
            let (f, r) = (layout.fwd(e), layout.bwd(e));
            let s = if x { -1.0 } else { 1.0 };
            let c = (v[f] - s * v[r]) / 2.0;
            out[f] = c;
            out[r] = -s * c;
        }
        let c = (v[layout.s()] - v[layout.back_s()]) / 2.0;
        out[layout.s()] = c;
        out[layout.back_s()] = -c;
        let c = (v[layout.fwd_t()] - v[layout.t()]) / 2.0;
        out[layout.fwd_t()] = c;
        out[layout.t()] = -c;
        out
    }

    /// Principal angles between `B^perp` and `A^perp`.
    pub fn jordan(&self) -> Jordan {
        let q = self.b.bperp();
        let mut m = DMatrix::zeros(q.nrows(), q.ncols());
        for k in 0..q.ncols() {
            m.set_column(k, &self.project_a_perp(&q.column(k).into_owned()));
        }
        let g = m.transpose() * &m;
        let eig = SymmetricEigen::new(g);
        let sigma2: Vec<f64> = eig.eigenvalues.iter().map(|s| s.clamp(0.0, 1.0)).collect();
        Jordan {
            dim: self.dim(),
            a_perp_dim: self.a_perp_dim(),
            sigma2,
            qw: q * &eig.eigenvectors,
            mw: m * eig.eigenvectors,
            pair: self.clone(),
        }
    }
}

/// The `A^perp` / `B^perp` decomposition of `H_N`.
#[derive(Debug, Clone)]
pub struct Jordan {
    dim: usize,
    a_perp_dim: usize,
    /// Squared cosines between `B^perp` directions and `A^perp`.
    pub sigma2: Vec<f64>,
    qw: DMatrix<f64>,
    mw: DMatrix<f64>,
    pair: ReflectionPair,
}

/// Multiplicities of the eigenvalues of `U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCounts {
    pub zero: usize,
    pub pi: usize,
    /// `dim(A ∩ B)`, `dim(A^perp ∩ B^perp)`, `dim(A ∩ B^perp)`, `dim(A^perp ∩ B)`.
    pub a_b: usize,
    pub aperp_bperp: usize,
    pub a_bperp: usize,
    pub aperp_b: usize,
    /// Phases `pi - 2 phi` of the two-dimensional blocks; each comes with its negative.
    pub paired: Vec<f64>,
}

impl Jordan {
    fn counts_raw(&self) -> (usize, usize, usize) {
        let n0 = self.sigma2.iter().filter(|&&s| s < ANGLE_TOL).count();
        let n1 = self.sigma2.iter().filter(|&&s| s > 1.0 - ANGLE_TOL).count();
        (n0, n1, self.sigma2.len() - n0 - n1)
    }

    pub fn counts(&self) -> PhaseCounts {
        let (n0, n1, g) = self.counts_raw();
        let a_dim = self.dim - self.a_perp_dim;
        let a_b = a_dim - n0 - g;
        let aperp_b = self.a_perp_dim - n1 - g;
        let paired = self
            .sigma2
            .iter()
            .filter(|&&s| (ANGLE_TOL..=1.0 - ANGLE_TOL).contains(&s))
            .map(|s| std::f64::consts::PI - 2.0 * s.sqrt().asin())
            .collect();
        PhaseCounts { zero: a_b + n1, pi: n0 + aperp_b, a_b, aperp_bperp: n1, a_bperp: n0, aperp_b, paired }
    }

    /// All eigenphases of `U` in `[-pi, pi]`.
    pub fn eigenphases(&self) -> Vec<f64> {
        let c = self.counts();
        let mut out = vec![0.0; c.zero];
        out.extend(std::iter::repeat(std::f64::consts::PI).take(c.pi));
        for p in c.paired {
            out.push(p);
            out.push(-p);
        }
        out
    }

    /// Projection of `psi` on the eigenspace of `U` with the given phase.
    pub fn project(&self, psi: &DVector<f64>, phase: Phase) -> DVector<f64> {
        let mut out = DVector::zeros(psi.len());
        match phase {
            Phase::Pi => {
                // A ∩ B^perp
                for (k, &s) in self.sigma2.iter().enumerate() {
                    if s < ANGLE_TOL {
                        let y = self.qw.column(k);
                        out.axpy(y.dot(psi), &y, 1.0);
                    }
                }
                // A^perp ∩ B: the part of A^perp not paired with B^perp
                out += self.pair.project_a_perp(psi);
                for (k, &s) in self.sigma2.iter().enumerate() {
                    if s >= ANGLE_TOL {
                        let u = self.mw.column(k) / s.sqrt();
                        out.axpy(-u.dot(psi), &u, 1.0);
                    }
                }
            }
            Phase::Zero => {
                // A^perp ∩ B^perp
                for (k, &s) in self.sigma2.iter().enumerate() {
                    if s > 1.0 - ANGLE_TOL {
                        let y = self.qw.column(k);
                        out.axpy(y.dot(psi), &y, 1.0);
                    }
                }
                // A ∩ B: the part of A not paired with B^perp
                out += psi - self.pair.project_a_perp(psi);
                for (k, &s) in self.sigma2.iter().enumerate() {
                    if s <= 1.0 - ANGLE_TOL {
                        let a = (self.qw.column(k) - self.mw.column(k)) / (1.0 - s).sqrt();
                        out.axpy(-a.dot(psi), &a, 1.0);
                    }
                }
            }
        }
        out
    }

    pub fn overlap(&self, psi: &DVector<f64>, phase: Phase) -> f64 {
        self.project(psi, phase).norm_squared()
    }
}

/// `(|<-,s> - |->,t>)/sqrt 2`.
pub fn initial_state(layout: Layout) -> StateVec {
    let mut v = layout.zeros();
    v[layout.back_s()] = std::f64::consts::FRAC_1_SQRT_2;
    v[layout.fwd_t()] = -std::f64::consts::FRAC_1_SQRT_2;
    v
}

/// `(|<-,s> + |->,t>)/sqrt 2`, the direction `B` adds to the vertex stars.
pub fn boundary_sum_state(layout: Layout) -> StateVec {
    let mut v = layout.zeros();
    v[layout.back_s()] = std::f64::consts::FRAC_1_SQRT_2;
    v[layout.fwd_t()] = std::f64::consts::FRAC_1_SQRT_2;
    v
}

/// Outcome of a simulated evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct DecisionReport {
    pub accepted: bool,
    /// Squared overlap of the start state with the phase-0 eigenspace of the walk.
    pub overlap0: f64,
    pub threshold: f64,
    pub witness_energy: Option<f64>,
    pub path_len: Option<usize>,
    pub ledger: DlLedger,
}

/// Resource record of one distance query.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DlLedger {
    pub oracle_queries: u64,
    /// `(L^{log 3} (2n+1)^{log L} n)^{1/2}`.
    pub t_formula: f64,
    /// `ceil(log2 |E(N_L)|)` qubits for the edge register.
    pub quantum_space_cells: usize,
    pub spectral: bool,
    pub dim: usize,
}

/// Thresholded overlap with the phase-0 eigenspace of the walk.
pub fn decide_phase_estimation(pair: &ReflectionPair, psi0: &StateVec, threshold: f64) -> (bool, f64) {
    let overlap = pair.jordan().overlap(psi0, Phase::Pi).clamp(0.0, 1.0);
    (overlap >= threshold, overlap)
}

/// Energy of the optimal unit flow to sink `sink` over on-edges.
pub fn witness_energy(net: &SwitchingNet, on: &[bool], sink: Vertex) -> Result<f64, FlowError> {
    Ok(optimal_flow_lsq(net, on, sink)?.energy())
}

/// Spectral decision on a built network with the default start state and threshold.
pub fn decide(net: &SwitchingNet, on: Vec<bool>, sink: Vertex) -> Result<DecisionReport, SpanError> {
    let pair = ReflectionPair::with_on(net, on, sink)?;
    let (accepted, overlap0) = decide_phase_estimation(&pair, &initial_state(Layout::of(net)), THRESHOLD);
    let exact = net.accepts_with(&pair.on, sink);
    let (witness_energy, path_len) = if accepted && exact.accepted {
        (Some(witness_energy(net, &pair.on, sink)?), Some(exact.path.len()))
    } else {
        (None, None)
    };
    Ok(DecisionReport {
        accepted,
        overlap0,
        threshold: THRESHOLD,
        witness_energy,
        path_len,
        ledger: DlLedger { dim: pair.dim(), spectral: true, ..DlLedger::default() },
    })
}

pub fn t_formula(n: usize, l: usize) -> f64 {
    let log_l = (l as f64).log2();
    ((l as f64).powf(3f64.log2()) * ((2 * n + 1) as f64).powf(log_l) * n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Spectral,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "spectral" => Ok(Mode::Spectral),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DlOutcome {
    pub answer: bool,
    pub ledger: DlLedger,
    pub report: Option<DecisionReport>,
}

/// Whether `v` is reachable from `u` within `l` steps, `l` a power of two,
/// through the network `N_l(u)`.
pub fn d_l(g: &Digraph, u: Vertex, v: Vertex, l: usize, mode: Mode) -> Result<DlOutcome, SpanError> {
    if !l.is_power_of_two() {
        return Err(SpanError::BadLength(l));
    }
    if u >= g.n() || v >= g.n() {
        return Err(SpanError::BadVertex(u.max(v)));
    }
    let padded = pad_to_power_of_two(g);
    let n = padded.n();
    let ell = l.trailing_zeros() as usize;
    let edges = (2 * n + 1).pow(ell as u32) * n;
    let mut ledger = DlLedger {
        t_formula: t_formula(n, l),
        quantum_space_cells: (edges as f64).log2().ceil() as usize,
        dim: 2 * edges + 4,
        ..DlLedger::default()
    };
    let net = SwitchingNet::build(n, ell, u)?;
    let oracle = GraphOracle::new(&padded);
    if mode == Mode::Spectral && ledger.dim <= SPECTRAL_DIM_CAP {
        let on = net.on_edges(&oracle);
        let mut report = decide(&net, on, v)?;
        ledger.oracle_queries = oracle.query_count();
        ledger.spectral = true;
        report.ledger = ledger.clone();
        return Ok(DlOutcome { answer: report.accepted, ledger, report: Some(report) });
    }
    let answer = net.accepts(&oracle, v).accepted;
    ledger.oracle_queries = oracle.query_count();
    Ok(DlOutcome { answer, ledger, report: None })
}

/// Whether `v` is reachable from `u` within `l` steps, any `l >= 0`.
pub fn dist_l(g: &Digraph, u: Vertex, v: Vertex, l: usize, mode: Mode) -> Result<DlOutcome, SpanError> {
    if u >= g.n() || v >= g.n() {
        return Err(SpanError::BadVertex(u.max(v)));
    }
    if u == v || l == 0 {
        let ledger = DlLedger::default();
        return Ok(DlOutcome { answer: u == v, ledger, report: None });
    }
    let top = l.next_power_of_two();
    let (extended, s1) = attach_source_path(g, u, top - l);
    d_l(&extended, s1, v, top, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_value() {
        let want = (4f64.powf(3f64.log2()) * 81.0 * 4.0).sqrt();
        assert!((t_formula(4, 4) - want).abs() < 1e-9);
    }

    #[test]
    fn b_space_agrees() {
        for (n, ell) in [(2, 0), (2, 1), (4, 1), (2, 2)] {
            let net = SwitchingNet::build(n, ell, 0).unwrap();
            for sink in 0..n {
                let b = BSpace::build(&net, sink).unwrap();
                let dense = (b.p_b() - b.p_b_from_complement()).norm();
                assert!(dense < 1e-8, "n={n} l={ell}: {dense}");
                assert!(b.mismatch() < 1e-8);
                assert_eq!(b.rank(), net.vertex_count() + net.edge_count());
            }
        }
    }

    #[test]
    fn small_decisions() {
        let g = Digraph::complete(2).unwrap();
        assert!(d_l(&g, 0, 1, 1, Mode::Spectral).unwrap().answer);
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(!d_l(&g, 0, 3, 2, Mode::Spectral).unwrap().answer);
        assert!(d_l(&g, 0, 2, 2, Mode::Spectral).unwrap().answer);
        assert!(dist_l(&g, 0, 3, 3, Mode::Spectral).unwrap().answer);
        assert!(!dist_l(&g, 3, 0, 3, Mode::Exact).unwrap().answer);
    }

    #[test]
    fn overlap_matches_energy() {
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let net = SwitchingNet::build(4, 1, 0).unwrap();
        let oracle = GraphOracle::new(&g);
        for v in 1..4 {
            let report = decide(&net, net.on_edges(&oracle), v).unwrap();
            match report.witness_energy {
                Some(r) => assert!((report.overlap0 - 1.0 / (2.0 + r)).abs() < 1e-9),
                None => assert!(report.overlap0 < 1e-9),
            }
        }
    }
}
