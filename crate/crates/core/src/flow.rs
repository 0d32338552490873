//! The state space `H_N` of a switching network, its subspaces `A(x)`, `B`,
//! `B^-`, and flows on the network.
//!
//! Coordinates: `(->, e)` is `2e`, `(<-, e)` is `2e + 1`, followed by `|s>`,
//! `|t>`, `|<-, s>` and `|->, t>`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::graph::{GraphOracle, Vertex};
use crate::network::SwitchingNet;

pub type StateVec = DVector<f64>;

/// Index map of `H_N` for a network with `edges` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub edges: usize,
}

impl Layout {
    pub fn of(net: &SwitchingNet) -> Self {
        Self { edges: net.edge_count() }
    }

    pub fn dim(self) -> usize {
        2 * self.edges + 4
    }

    pub fn fwd(self, e: usize) -> usize {
        2 * e
    }

    pub fn bwd(self, e: usize) -> usize {
        2 * e + 1
    }

    pub fn s(self) -> usize {
        2 * self.edges
    }

    pub fn t(self) -> usize {
        2 * self.edges + 1
    }

    pub fn back_s(self) -> usize {
        2 * self.edges + 2
    }

    pub fn fwd_t(self) -> usize {
        2 * self.edges + 3
    }

    pub fn zeros(self) -> StateVec {
        StateVec::zeros(self.dim())
    }

    pub fn unit(self, k: usize) -> StateVec {
        let mut v = self.zeros();
        v[k] = 1.0;
        v
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("source and sink are not connected by on-edges")]
    Disconnected,
    #[error("z must be nonzero")]
    ZeroZ,
    #[error("index {0} out of range")]
    BadIndex(usize),
}

/// A list of states spanning a subspace.
#[derive(Debug, Clone)]
pub struct SpaceBasis {
    pub vectors: Vec<StateVec>,
    pub orthogonal: bool,
}

impl SpaceBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn normalized(&self) -> SpaceBasis {
        SpaceBasis { vectors: self.vectors.iter().map(|v| v / v.norm()).collect(), orthogonal: self.orthogonal }
    }

    /// Columns are the vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.vectors)
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.matrix();
        m.transpose() * &m
    }
}

/// A real value per network edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowFn {
    pub values: Vec<f64>,
}

impl FlowFn {
    pub fn zero(edges: usize) -> Self {
        Self { values: vec![0.0; edges] }
    }

    /// Reads the edge part of a state in the antisymmetric subspace.
    pub fn from_state(state: &StateVec, edges: usize) -> Self {
        Self { values: (0..edges).map(|e| (state[2 * e] - state[2 * e + 1]) / 2.0).collect() }
    }

    /// Reads coefficients of the unit edge states `|sigma, i>`.
    pub fn from_edge_coeffs(coeffs: &DVector<f64>) -> Self {
        Self { values: coeffs.iter().copied().collect() }
    }

    /// Outflow minus inflow at `v`.
    pub fn divergence(&self, net: &SwitchingNet, v: usize) -> f64 {
        net.incident(v)
            .iter()
            .map(|&e| {
                let (tail, head) = net.endpoints(e as usize);
                let x = self.values[e as usize];
                match (tail == v, head == v) {
                    (true, false) => x,
                    (false, true) => -x,
                    _ => 0.0,
                }
            })
            .sum()
    }

    pub fn divergences(&self, net: &SwitchingNet) -> Vec<f64> {
        (0..net.vertex_count()).map(|v| self.divergence(net, v)).collect()
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }

    /// `|theta_bar> = sum_e theta(e) (|->,e> - |<-,e>)`.
    pub fn cropped(&self) -> StateVec {
        let layout = Layout { edges: self.values.len() };
        let mut v = layout.zeros();
        for (e, &x) in self.values.iter().enumerate() {
            v[layout.fwd(e)] = x;
            v[layout.bwd(e)] = -x;
        }
        v
    }

    /// `|theta> = -theta(s)|<-,s> + |theta_bar> - theta(t)|->,t>`.
    pub fn state(&self, net: &SwitchingNet, sink: Vertex) -> StateVec {
        let layout = Layout::of(net);
        let mut v = self.cropped();
        v[layout.back_s()] = -self.divergence(net, net.source());
        v[layout.fwd_t()] = -self.divergence(net, net.sink(sink));
        v
    }
}

/// The star of `v`; the signed star is `psi_star^-`. Boundary terms are added
/// at the source and at sink `sink`.
pub fn star_state(net: &SwitchingNet, v: usize, signed: bool, sink: Vertex) -> StateVec {
    let layout = Layout::of(net);
    let mut out = layout.zeros();
    for &e in net.incident(v) {
        let e = e as usize;
        let (tail, head) = net.endpoints(e);
        if tail == head {
            continue;
        }
        let outgoing = tail == v;
        if signed {
            let sign = if outgoing { 0.5 } else { -0.5 };
            out[layout.fwd(e)] += sign;
            out[layout.bwd(e)] -= sign;
        } else if outgoing {
            out[layout.fwd(e)] += 1.0;
        } else {
            out[layout.bwd(e)] += 1.0;
        }
    }
    if v == net.source() {
        out[layout.back_s()] += 1.0;
    }
    if v == net.sink(sink) {
        out[layout.fwd_t()] += 1.0;
    }
    out
}

/// The working basis of `A(x)` for a precomputed on-set.
pub fn a_basis_with(net: &SwitchingNet, on: &[bool]) -> SpaceBasis {
    debug_assert_eq!(on.len(), net.edge_count());
    a_basis_for(on)
}

/// The working basis of `A(x)` given the value of every edge label.
pub fn a_basis_for(on: &[bool]) -> SpaceBasis {
    let layout = Layout { edges: on.len() };
    let mut vectors = Vec::with_capacity(on.len() + 2);
    for (e, &x) in on.iter().enumerate() {
        let mut v = layout.zeros();
        v[layout.fwd(e)] = 1.0;
        v[layout.bwd(e)] = if x { -1.0 } else { 1.0 };
        vectors.push(v);
    }
    let mut s = layout.zeros();
    s[layout.s()] = 1.0;
    s[layout.back_s()] = 1.0;
    vectors.push(s);
    let mut t = layout.zeros();
    t[layout.fwd_t()] = 1.0;
    t[layout.t()] = 1.0;
    vectors.push(t);
    SpaceBasis { vectors, orthogonal: true }
}

/// The working basis of `A(x)`, querying every edge once.
pub fn a_basis(net: &SwitchingNet, oracle: &GraphOracle<'_>) -> SpaceBasis {
    a_basis_with(net, &net.on_edges(oracle))
}

/// `|b_e> = |->,e> + |<-,e>` (unnormalized).
pub fn symmetric_edge_states(net: &SwitchingNet) -> Vec<StateVec> {
    let layout = Layout::of(net);
    (0..net.edge_count())
        .map(|e| {
            let mut v = layout.zeros();
            v[layout.fwd(e)] = 1.0;
            v[layout.bwd(e)] = 1.0;
            v
        })
        .collect()
}

/// Spanning set of the cut space `B^-`: one signed star per vertex.
pub fn b_minus_states(net: &SwitchingNet, sink: Vertex) -> Vec<StateVec> {
    (0..net.vertex_count()).map(|v| star_state(net, v, true, sink)).collect()
}

/// `B^-` together with the symmetric edge states.
pub fn b_space_basis(net: &SwitchingNet, sink: Vertex) -> SpaceBasis {
    let mut vectors = b_minus_states(net, sink);
    vectors.extend(symmetric_edge_states(net));
    SpaceBasis { vectors, orthogonal: false }
}

/// `B` as first defined: unsigned stars, symmetric edge states and
/// `|<-,s> + |->,t>`. The set is linearly dependent.
pub fn b_space_definition(net: &SwitchingNet, sink: Vertex) -> SpaceBasis {
    let layout = Layout::of(net);
    let mut vectors: Vec<StateVec> = (0..net.vertex_count()).map(|v| star_state(net, v, false, sink)).collect();
    vectors.extend(symmetric_edge_states(net));
    let mut extra = layout.zeros();
    extra[layout.back_s()] = 1.0;
    extra[layout.fwd_t()] = 1.0;
    vectors.push(extra);
    SpaceBasis { vectors, orthogonal: false }
}

/// Vertex-by-edge incidence: `+1` at the tail, `-1` at the head.
pub fn incidence_matrix(net: &SwitchingNet) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(net.vertex_count(), net.edge_count());
    for e in 0..net.edge_count() {
        let (tail, head) = net.endpoints(e);
        m[(tail, e)] += 1.0;
        m[(head, e)] -= 1.0;
    }
    m
}

/// The optimal unit flow from the source to sink `sink` over on-edges, from
/// the grounded Laplacian of the source's component.
pub fn optimal_flow_lsq(net: &SwitchingNet, on: &[bool], sink: Vertex) -> Result<FlowFn, FlowError> {
    let (s, t) = (net.source(), net.sink(sink));
    let mut local = vec![usize::MAX; net.vertex_count()];
    let mut members = vec![s];
    local[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(a) = queue.pop_front() {
        for &e in net.incident(a) {
            if !on[e as usize] {
                continue;
            }
            let (x, y) = net.endpoints(e as usize);
            let b = if x == a { y } else { x };
            if local[b] == usize::MAX {
                local[b] = members.len();
                members.push(b);
                queue.push_back(b);
            }
        }
    }
    if local[t] == usize::MAX {
        return Err(FlowError::Disconnected);
    }
    let mut flow = FlowFn::zero(net.edge_count());
    if s == t {
        return Ok(flow);
    }
    // Unknowns are the potentials of every member except t, which is grounded.
    let slot = |v: usize| -> Option<usize> {
        let k = local[v];
        match k.cmp(&local[t]) {
            std::cmp::Ordering::Less => Some(k),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(k - 1),
        }
    };
    let m = members.len() - 1;
    let mut lap = DMatrix::<f64>::zeros(m, m);
    for e in (0..net.edge_count()).filter(|&e| on[e]) {
        let (a, b) = net.endpoints(e);
        if local[a] == usize::MAX || a == b {
            continue;
        }
        let (sa, sb) = (slot(a), slot(b));
        if let Some(i) = sa {
            lap[(i, i)] += 1.0;
        }
        if let Some(j) = sb {
            lap[(j, j)] += 1.0;
        }
        if let (Some(i), Some(j)) = (sa, sb) {
            lap[(i, j)] -= 1.0;
            lap[(j, i)] -= 1.0;
        }
    }
    let mut rhs = DVector::zeros(m);
    rhs[slot(s).expect("source is not grounded")] = 1.0;
    let phi = lap.cholesky().ok_or(FlowError::Disconnected)?.solve(&rhs);
    let potential = |v: usize| slot(v).map_or(0.0, |k| phi[k]);
    for e in (0..net.edge_count()).filter(|&e| on[e]) {
        let (a, b) = net.endpoints(e);
        if local[a] != usize::MAX {
            flow.values[e] = potential(a) - potential(b);
        }
    }
    Ok(flow)
}
