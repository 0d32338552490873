//! The explicit orthogonal basis of `B^perp` built from optimal flows.
//!
//! Edge-space vectors here are coefficients of the unit edge states
//! `|sigma, i>`, indexed like network edges. A vector for `N_{2^l}` placed in
//! the block `sigma` of a larger network occupies one contiguous slice.

use nalgebra::DVector;

use crate::flow::{FlowError, Layout, SpaceBasis, StateVec};
use crate::graph::Vertex;
use crate::network::{count_twos, SwitchingNet, Sym};

/// `(-1)^{a.b}` for bitstrings packed in integers.
pub fn parity(a: usize, b: usize) -> f64 {
    if (a & b).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^{|sigma|_2} |sigma>|inner>`, the state of `inner` seen from the
/// enclosing network.
pub fn embed(n: usize, prefix: &[Sym], inner: &DVector<f64>) -> DVector<f64> {
    let d = 2 * n + 1;
    let blocks = d.pow(prefix.len() as u32);
    let offset = prefix.iter().fold(0, |acc, s| acc * d + s.index(n)) * inner.len();
    let sign = if count_twos(prefix) % 2 == 1 { -1.0 } else { 1.0 };
    let mut out = DVector::zeros(blocks * inner.len());
    out.rows_mut(offset, inner.len()).copy_from(&(inner * sign));
    out
}

/// Optimal flows `theta_bar_j(2^l)` for every `l <= ell`.
#[derive(Debug, Clone)]
pub struct FlowTable {
    n: usize,
    theta: Vec<Vec<DVector<f64>>>,
}

impl FlowTable {
    pub fn new(n: usize, ell: usize) -> Self {
        let base: Vec<DVector<f64>> = (0..n).map(|j| DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 })).collect();
        let mut theta = vec![base];
        for _ in 0..ell {
            let prev = theta.last().expect("level 0 exists");
            let d = 2 * n + 1;
            let m = prev[0].len();
            let sum: DVector<f64> = prev.iter().sum();
            let level = (0..n)
                .map(|j| {
                    // n theta_j = |0>(sum_i theta_i) + sum_i |1,i>theta_j + |2,j>(sum_i theta_i)
                    let mut v = DVector::zeros(d * m);
                    v.rows_mut(0, m).copy_from(&(&sum / n as f64));
                    for i in 0..n {
                        v.rows_mut(Sym::One(i).index(n) * m, m).copy_from(&(&prev[j] / n as f64));
                    }
                    v.rows_mut(Sym::Two(j).index(n) * m, m).copy_from(&(&sum / n as f64));
                    v
                })
                .collect();
            theta.push(level);
        }
        Self { n, theta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn theta_bar(&self, l: usize, j: Vertex) -> &DVector<f64> {
        &self.theta[l][j]
    }

    /// `p_ij(2^l) = theta_i^0 + theta_j^{1i} - theta_i^{2j}` over level `l - 1`.
    pub fn p(&self, l: usize, i: Vertex, j: Vertex) -> DVector<f64> {
        assert!(l >= 1, "p_ij needs l >= 1");
        let lower = &self.theta[l - 1];
        embed(self.n, &[Sym::Zero], &lower[i]) + embed(self.n, &[Sym::One(i)], &lower[j])
            - embed(self.n, &[Sym::Two(j)], &lower[i])
    }

    pub fn psi(&self, l: usize, z: usize, x: usize) -> Result<DVector<f64>, FlowError> {
        if z == 0 {
            return Err(FlowError::ZeroZ);
        }
        if z >= self.n || x >= self.n {
            return Err(FlowError::BadIndex(z.max(x)));
        }
        let mut out = DVector::zeros(self.theta[l][0].len());
        for j in 0..self.n {
            for i in 0..self.n {
                out.axpy(parity(x, j) * parity(z, i), &self.p(l, i, j), 1.0);
            }
        }
        Ok(out)
    }

    /// `sum_j (-1)^{x.j} theta_bar_j(2^l)`.
    pub fn fourier_sum(&self, l: usize, x: usize) -> DVector<f64> {
        let mut out = DVector::zeros(self.theta[l][0].len());
        for (j, t) in self.theta[l].iter().enumerate() {
            out.axpy(parity(x, j), t, 1.0);
        }
        out
    }

    /// `(c0, c1)`: inner products of distinct and equal optimal flows at level `l`.
    pub fn inner_constants(&self, l: usize) -> (f64, f64) {
        let t = &self.theta[l];
        let c1 = t[0].dot(&t[0]);
        let c0 = if self.n > 1 { t[0].dot(&t[1]) } else { 0.0 };
        (c0, c1)
    }

    /// Predicted `<p_ij | psi_{z,x}>` at level `l` from the level `l - 1` constants.
    pub fn predicted_p_psi(&self, l: usize, i: Vertex, j: Vertex, z: usize, x: usize) -> f64 {
        let (c0, c1) = self.inner_constants(l - 1);
        let (c00, c01, c10, c11) = (c0, 2.0 * c0, c1 + c0, 3.0 * c1);
        let (c, cp) = (c11 - c01, c10 - c00);
        let a: f64 = (0..self.n).filter(|&k| k != j).map(|k| parity(x, k)).sum();
        parity(z, i) * (c * parity(x, j) + cp * a)
    }
}

/// Lifts edge coefficients to `sum_e c_e (|->,e> - |<-,e>)`.
pub fn edge_state(coeffs: &DVector<f64>) -> StateVec {
    let layout = Layout { edges: coeffs.len() };
    let mut v = layout.zeros();
    for (e, &c) in coeffs.iter().enumerate() {
        v[layout.fwd(e)] = c;
        v[layout.bwd(e)] = -c;
    }
    v
}

pub fn p_state(net: &SwitchingNet, table: &FlowTable, i: Vertex, j: Vertex) -> StateVec {
    edge_state(&table.p(net.ell(), i, j))
}

pub fn psi_state(net: &SwitchingNet, table: &FlowTable, z: usize, x: usize) -> Result<StateVec, FlowError> {
    Ok(edge_state(&table.psi(net.ell(), z, x)?))
}

/// `|theta_j>` with boundary terms, or the cropped `|theta_bar_j>`.
pub fn theta_state(net: &SwitchingNet, table: &FlowTable, j: Vertex, with_boundary: bool) -> StateVec {
    let mut v = edge_state(table.theta_bar(net.ell(), j));
    if with_boundary {
        let layout = Layout::of(net);
        v[layout.back_s()] = -1.0;
        v[layout.fwd_t()] = 1.0;
    }
    v
}

/// Number of block-embedded circulations `psi_{z,x}` in `N_{2^ell}`.
pub fn circulation_count(n: usize, ell: usize) -> usize {
    (1..=ell).map(|l| (2 * n + 1).pow((ell - l) as u32) * (n * n - n)).sum()
}

/// Every `psi_{z,x}(2^l)` placed in each block `sigma` of length `ell - l`.
pub fn circulation_basis(net: &SwitchingNet, table: &FlowTable) -> Vec<StateVec> {
    let (n, ell) = (net.n(), net.ell());
    let total = net.edge_count();
    let mut out = Vec::with_capacity(circulation_count(n, ell));
    for l in 1..=ell {
        let psis: Vec<DVector<f64>> = (1..n)
            .flat_map(|z| (0..n).map(move |x| (z, x)))
            .map(|(z, x)| table.psi(l, z, x).expect("z is nonzero"))
            .collect();
        let width = psis[0].len();
        for block in 0..total / width {
            for psi in &psis {
                let mut coeffs = DVector::zeros(total);
                coeffs.rows_mut(block * width, width).copy_from(psi);
                out.push(edge_state(&coeffs));
            }
        }
    }
    out
}

/// The orthogonal basis of `B^perp` for sink `sink`: circulations, the optimal
/// flow with boundary, `|s>` and `|t>`. Unnormalized.
pub fn bperp_basis(net: &SwitchingNet, table: &FlowTable, sink: Vertex) -> SpaceBasis {
    let layout = Layout::of(net);
    let mut vectors = circulation_basis(net, table);
    vectors.push(theta_state(net, table, sink, true));
    vectors.push(layout.unit(layout.s()));
    vectors.push(layout.unit(layout.t()));
    SpaceBasis { vectors, orthogonal: true }
}
