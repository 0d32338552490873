//! Simulated state preparation for the flow and circulation basis.
//!
//! Every preparer returns a [`PrepCircuit`]: the list of primitive steps it
//! would run, nested sub-circuit calls included, together with the dense
//! vector it outputs. Outputs are unit vectors in the register basis
//! `|sigma, i>`, whose coefficients coincide with the raw tables of
//! [`crate::basis::FlowTable`]. Squared amplitudes of every rotation are exact
//! rationals and only become floats when applied.

use nalgebra::DVector;
use num_traits::{Signed, Zero};

use crate::basis::parity;
use crate::closed::{self, to_f64, Rational};
use crate::flow::{FlowError, Layout, StateVec};
use crate::network::{edge_count_formula, Sym};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PrepError {
    #[error("prefix sum S({prefix:?}) is negative")]
    NegativePrefix { prefix: Vec<u8> },
    #[error("S({prefix:?}) differs from the sum over its children")]
    Inconsistent { prefix: Vec<u8> },
    #[error("all amplitudes vanish")]
    ZeroNorm,
    #[error("alphabet size {0} is not supported")]
    BadAlphabet(usize),
    #[error("n = {0} must be a power of two and at least 2")]
    BadN(usize),
    #[error("level {0} is out of range")]
    BadLevel(usize),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Squared amplitudes over `[d]^m` given through their prefix sums.
pub struct AmplitudeSpec<'a> {
    pub length: usize,
    partial: PrefixFn<'a>,
}

type PrefixFn<'a> = Box<dyn Fn(&[u8]) -> Rational + 'a>;

impl<'a> AmplitudeSpec<'a> {
    pub fn new(length: usize, partial: impl Fn(&[u8]) -> Rational + 'a) -> Self {
        Self { length, partial: Box::new(partial) }
    }

    /// Spec from explicit squared amplitudes, leaves ordered base `d`.
    pub fn from_squares(d: usize, squares: Vec<Rational>) -> Self {
        let mut length = 0;
        while d.pow(length as u32) < squares.len() {
            length += 1;
        }
        Self::new(length, move |p: &[u8]| {
            let k = p.len();
            let lo = p.iter().fold(0usize, |acc, &c| acc * d + c as usize) * d.pow((length - k) as u32);
            let hi = (lo + d.pow((length - k) as u32)).min(squares.len());
            squares.get(lo..hi).map_or_else(Rational::zero, |s| s.iter().sum())
        })
    }

    pub fn partial(&self, prefix: &[u8]) -> Rational {
        (self.partial)(prefix)
    }
}

/// Primitive steps; a rotation is one gate, a layer of Hadamards or a register
/// swap costs one gate per qubit.
#[derive(Debug, Clone)]
pub enum Step {
    Rotate { arity: usize, weights: Vec<Rational> },
    Hadamard { qubits: usize },
    Swap { qubits: usize },
    Lift,
    Call(Box<PrepCircuit>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    GroverRudolph,
    SumOfFlows,
    Fourier,
    Psi,
    Theta,
    Boundary,
}

#[derive(Debug, Clone)]
pub struct PrepCircuit {
    pub kind: Kind,
    pub ell: usize,
    pub steps: Vec<Step>,
    output: StateVec,
}

impl PrepCircuit {
    pub fn output(&self) -> &StateVec {
        &self.output
    }

    pub fn into_output(self) -> StateVec {
        self.output
    }

    /// Gates outside sub-circuit calls.
    pub fn local_count(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Rotate { .. } | Step::Lift => 1,
                Step::Hadamard { qubits } | Step::Swap { qubits } => *qubits,
                Step::Call(_) => 0,
            })
            .sum()
    }

    pub fn gate_count(&self) -> usize {
        self.local_count() + self.calls().map(|c| c.gate_count()).sum::<usize>()
    }

    pub fn calls(&self) -> impl Iterator<Item = &PrepCircuit> {
        self.steps.iter().filter_map(|s| match s {
            Step::Call(c) => Some(c.as_ref()),
            _ => None,
        })
    }

    fn walk<'s>(&'s self, out: &mut Vec<&'s PrepCircuit>) {
        out.push(self);
        for c in self.calls() {
            c.walk(out);
        }
    }
}

/// Grover-Rudolph loading: one `d`-way rotation per letter, each splitting the
/// weight of a prefix among its children in proportion to their `S`.
pub fn grover_rudolph(spec: &AmplitudeSpec<'_>, d: usize) -> Result<PrepCircuit, PrepError> {
    if !(2..=16).contains(&d) {
        return Err(PrepError::BadAlphabet(d));
    }
    let m = spec.length;
    let total = spec.partial(&[]);
    if total.is_negative() {
        return Err(PrepError::NegativePrefix { prefix: vec![] });
    }
    if total.is_zero() {
        return Err(PrepError::ZeroNorm);
    }
    let mut out = DVector::zeros(d.pow(m as u32));
    let mut prefix = Vec::with_capacity(m);
    descend(spec, d, &mut prefix, total, 1.0, 0, &mut out)?;
    let steps = (0..m).map(|_| Step::Rotate { arity: d, weights: vec![] }).collect();
    Ok(PrepCircuit { kind: Kind::GroverRudolph, ell: m, steps, output: out })
}

fn descend(
    spec: &AmplitudeSpec<'_>,
    d: usize,
    prefix: &mut Vec<u8>,
    here: Rational,
    amp: f64,
    index: usize,
    out: &mut StateVec,
) -> Result<(), PrepError> {
    if prefix.len() == spec.length {
        out[index] = amp;
        return Ok(());
    }
    let mut kids = Vec::with_capacity(d);
    for c in 0..d as u8 {
        prefix.push(c);
        let s = spec.partial(prefix);
        prefix.pop();
        if s.is_negative() {
            let mut p = prefix.clone();
            p.push(c);
            return Err(PrepError::NegativePrefix { prefix: p });
        }
        kids.push(s);
    }
    if kids.iter().sum::<Rational>() != here {
        return Err(PrepError::Inconsistent { prefix: prefix.clone() });
    }
    for (c, s) in kids.into_iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let child = amp * to_f64(&(&s / &here)).sqrt();
        prefix.push(c as u8);
        descend(spec, d, prefix, s, child, index * d + c, out)?;
        prefix.pop();
    }
    Ok(())
}

/// `S(p)` for the layer superposition over `{0,1,2}^ell`.
pub fn prefix_sum_s(n: usize, ell: usize, p: &[u8]) -> Rational {
    closed::prefix_sum(n, ell, p)
}

fn qubits(n: usize) -> usize {
    n.trailing_zeros() as usize
}

fn check_n(n: usize) -> Result<(), PrepError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(PrepError::BadN(n));
    }
    Ok(())
}

/// `H^{log n}|x>`.
fn hadamard(n: usize, x: usize) -> DVector<f64> {
    let scale = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |j, _| parity(x, j) * scale)
}

fn basis_state(n: usize, k: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 })
}

/// Writes a tag and an `n`-dimensional register into the symbol register of
/// size `2n + 1`. Tag 0 only admits the register `|0>`.
fn symbol(n: usize, tag: u8, reg: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(2 * n + 1);
    match tag {
        0 => {
            debug_assert!(reg.iter().skip(1).all(|&c| c == 0.0));
            out[0] = reg[0];
        }
        1 => out.rows_mut(Sym::One(0).index(n), n).copy_from(reg),
        _ => out.rows_mut(Sym::Two(0).index(n), n).copy_from(reg),
    }
    out
}

/// Combines normalized branches `tag (x) register (x) inner` under a
/// three-way rotation with exact squared weights.
fn branch_sum(n: usize, weights: &[Rational], branches: [Option<(DVector<f64>, &StateVec)>; 3]) -> StateVec {
    let total: Rational = weights.iter().sum();
    let mut out: Option<StateVec> = None;
    for (tag, (w, b)) in weights.iter().zip(branches).enumerate() {
        let Some((reg, inner)) = b else { continue };
        if w.is_zero() {
            continue;
        }
        let amp = to_f64(&(w / &total)).sqrt();
        let term = symbol(n, tag as u8, &reg).kronecker(inner) * amp;
        out = Some(match out {
            Some(acc) => acc + term,
            None => term,
        });
    }
    out.expect("at least one branch carries weight")
}

/// `|0> -> prop. sum_i theta_bar_i(2^ell)`: a layer superposition loaded by
/// Grover-Rudolph, then a uniform superposition inside each layer.
pub fn prepare_sum_of_flows(n: usize, ell: usize) -> Result<PrepCircuit, PrepError> {
    check_n(n)?;
    let spec = AmplitudeSpec::new(ell, |p: &[u8]| prefix_sum_s(n, ell, p));
    let layers = grover_rudolph(&spec, 3)?;
    let d = 2 * n + 1;
    let mut out = DVector::zeros(d.pow(ell as u32) * n);
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    for (t, tau) in closed::layers(ell).enumerate() {
        let a = layers.output()[t];
        let free = tau.iter().filter(|&&c| c != 0).count();
        let amp = a * inv_sqrt_n.powi(free as i32 + 1);
        let mut blocks = vec![0usize];
        for &c in &tau {
            let letters: Vec<usize> = match c {
                0 => vec![Sym::Zero.index(n)],
                1 => (0..n).map(|j| Sym::One(j).index(n)).collect(),
                _ => (0..n).map(|j| Sym::Two(j).index(n)).collect(),
            };
            blocks = blocks.iter().flat_map(|b| letters.iter().map(move |l| b * d + l)).collect();
        }
        for b in blocks {
            for i in 0..n {
                out[b * n + i] = amp;
            }
        }
    }
    let q = qubits(n);
    let mut steps = vec![Step::Call(Box::new(layers))];
    steps.extend((0..=ell).map(|_| Step::Hadamard { qubits: q }));
    Ok(PrepCircuit { kind: Kind::SumOfFlows, ell, steps, output: out })
}

/// `C_{2^ell}: |x> -> prop. sum_j (-1)^{x.j} theta_bar_j(2^ell)`.
pub fn fourier_flows(n: usize, ell: usize, x: usize) -> Result<PrepCircuit, PrepError> {
    check_n(n)?;
    if x >= n {
        return Err(FlowError::BadIndex(x).into());
    }
    let q = qubits(n);
    if x == 0 {
        let inner = prepare_sum_of_flows(n, ell)?;
        let output = inner.output().clone();
        return Ok(PrepCircuit { kind: Kind::Fourier, ell, steps: vec![Step::Call(Box::new(inner))], output });
    }
    if ell == 0 {
        return Ok(PrepCircuit {
            kind: Kind::Fourier,
            ell,
            steps: vec![Step::Hadamard { qubits: q }],
            output: hadamard(n, x),
        });
    }
    let weights = vec![Rational::zero(), closed::n_x(n, ell - 1), closed::n_zero(n, ell - 1)];
    let cx = fourier_flows(n, ell - 1, x)?;
    let c0 = fourier_flows(n, ell - 1, 0)?;
    let output = branch_sum(
        n,
        &weights,
        [None, Some((hadamard(n, 0), cx.output())), Some((hadamard(n, x), c0.output()))],
    );
    let steps = vec![
        Step::Rotate { arity: 2, weights },
        Step::Swap { qubits: q },
        Step::Hadamard { qubits: q },
        Step::Call(Box::new(cx)),
        Step::Call(Box::new(c0)),
    ];
    Ok(PrepCircuit { kind: Kind::Fourier, ell, steps, output })
}

/// `|x, z> -> prop. psi_{z,x}(2^ell)` for `z != 0` and `ell >= 1`.
pub fn prepare_psi(n: usize, ell: usize, z: usize, x: usize) -> Result<PrepCircuit, PrepError> {
    check_n(n)?;
    if z == 0 {
        return Err(FlowError::ZeroZ.into());
    }
    if z >= n || x >= n {
        return Err(FlowError::BadIndex(z.max(x)).into());
    }
    if ell == 0 {
        return Err(PrepError::BadLevel(ell));
    }
    let weights = psi_weights(n, ell, x);
    let cz = fourier_flows(n, ell - 1, z)?;
    let cx = fourier_flows(n, ell - 1, x)?;
    let output = branch_sum(
        n,
        &weights,
        [
            Some((basis_state(n, 0), cz.output())),
            Some((hadamard(n, z), cx.output())),
            Some((hadamard(n, x), cz.output())),
        ],
    );
    let q = qubits(n);
    let steps = vec![
        Step::Rotate { arity: 3, weights },
        Step::Swap { qubits: q },
        Step::Hadamard { qubits: q },
        Step::Call(Box::new(cz)),
        Step::Call(Box::new(cx)),
    ];
    Ok(PrepCircuit { kind: Kind::Psi, ell, steps, output })
}

/// Squared weights on the tags `0, 1, 2` in the circulation preparer. The
/// tag 1 and tag 2 branches carry `sum_i (-1)^{z.i}|i> = sqrt(n) H|z>`, so
/// with `x = 0` the weights are `(n N, N_zero, N)` at level `ell - 1`.
pub fn psi_weights(n: usize, ell: usize, x: usize) -> Vec<Rational> {
    if x == 0 {
        let big = closed::n_x(n, ell - 1);
        let nn = Rational::from_integer(n.into());
        vec![nn * &big, closed::n_zero(n, ell - 1), big]
    } else {
        let half = Rational::new(1.into(), 2.into());
        vec![Rational::zero(), half.clone(), half]
    }
}

/// Squared weights on the tags `0, 1, 2` in the flow preparer.
pub fn theta_weights(n: usize, ell: usize) -> Vec<Rational> {
    let n0 = closed::n_zero(n, ell - 1);
    let f = closed::f_j(n, ell - 1) * Rational::from_integer(n.into());
    vec![n0.clone(), f, n0]
}

fn prepare_theta_bar(n: usize, ell: usize, j: usize) -> Result<PrepCircuit, PrepError> {
    if ell == 0 {
        return Ok(PrepCircuit { kind: Kind::Theta, ell, steps: vec![], output: basis_state(n, j) });
    }
    let weights = theta_weights(n, ell);
    let sum = prepare_sum_of_flows(n, ell - 1)?;
    let inner = prepare_theta_bar(n, ell - 1, j)?;
    let output = branch_sum(
        n,
        &weights,
        [
            Some((basis_state(n, 0), sum.output())),
            Some((hadamard(n, 0), inner.output())),
            Some((basis_state(n, j), sum.output())),
        ],
    );
    let q = qubits(n);
    let steps = vec![
        Step::Rotate { arity: 3, weights },
        Step::Swap { qubits: q },
        Step::Hadamard { qubits: q },
        Step::Call(Box::new(sum)),
        Step::Call(Box::new(inner)),
    ];
    Ok(PrepCircuit { kind: Kind::Theta, ell, steps, output })
}

/// `|j> -> prop. theta_bar_j(2^ell)` in the register basis, or, with the
/// boundary, the full `|theta_j>` in the state space of the network.
pub fn prepare_theta(n: usize, ell: usize, j: usize, with_boundary: bool) -> Result<PrepCircuit, PrepError> {
    check_n(n)?;
    if j >= n {
        return Err(FlowError::BadIndex(j).into());
    }
    let bar = prepare_theta_bar(n, ell, j)?;
    if !with_boundary {
        return Ok(bar);
    }
    let norm2 = closed::f_j(n, ell) * Rational::from_integer(2.into());
    let total = &norm2 + Rational::from_integer(2.into());
    let edge_amp = to_f64(&(&norm2 / &total)).sqrt();
    let end_amp = to_f64(&(Rational::from_integer(1.into()) / &total)).sqrt();
    let layout = Layout { edges: bar.output().len() };
    let mut output = lift(bar.output()) * edge_amp;
    output[layout.back_s()] = -end_amp;
    output[layout.fwd_t()] = end_amp;
    let steps = vec![
        Step::Rotate { arity: 3, weights: vec![Rational::from_integer(1.into()), norm2, Rational::from_integer(1.into())] },
        Step::Call(Box::new(bar)),
        Step::Lift,
    ];
    Ok(PrepCircuit { kind: Kind::Boundary, ell, steps, output })
}

/// `|e> -> (|->,e> - |<-,e>)/sqrt 2` on every edge, padded with the four
/// boundary coordinates.
pub fn lift(edge: &DVector<f64>) -> StateVec {
    let layout = Layout { edges: edge.len() };
    let mut v = layout.zeros();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (e, &c) in edge.iter().enumerate() {
        v[layout.fwd(e)] = c * r;
        v[layout.bwd(e)] = -c * r;
    }
    v
}

/// What a basis vector of `B^perp` is generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    Circulation { level: usize, block: usize, z: usize, x: usize },
    Flow { sink: usize },
    Source,
    Sink,
}

/// The orthonormal basis of `B^perp` of `N_{2^ell}` with sink `sink`, every
/// vector produced by the preparers above. Ordered like
/// [`crate::basis::bperp_basis`].
pub fn generate_basis(n: usize, ell: usize, sink: usize) -> Result<Vec<(BasisLabel, StateVec, usize)>, PrepError> {
    check_n(n)?;
    let edges = edge_count_formula(n, ell) as usize;
    let layout = Layout { edges };
    let mut out = Vec::new();
    for level in 1..=ell {
        let width = edge_count_formula(n, level) as usize;
        let mut psis = Vec::with_capacity((n - 1) * n);
        for z in 1..n {
            for x in 0..n {
                psis.push((z, x, prepare_psi(n, level, z, x)?));
            }
        }
        for block in 0..edges / width {
            for (z, x, c) in &psis {
                let mut coeffs = DVector::zeros(edges);
                coeffs.rows_mut(block * width, width).copy_from(c.output());
                // the block address costs one basis-state load per letter
                let gates = c.gate_count() + (ell - level) + 1;
                out.push((BasisLabel::Circulation { level, block, z: *z, x: *x }, lift(&coeffs), gates));
            }
        }
    }
    let theta = prepare_theta(n, ell, sink, true)?;
    let gates = theta.gate_count();
    out.push((BasisLabel::Flow { sink }, theta.into_output(), gates));
    out.push((BasisLabel::Source, layout.unit(layout.s()), 1));
    out.push((BasisLabel::Sink, layout.unit(layout.t()), 1));
    Ok(out)
}

/// Distance from `prepared` to the normalized `reference`, or infinity when
/// the overlap is not positive.
pub fn residual(prepared: &DVector<f64>, reference: &DVector<f64>) -> f64 {
    let norm = reference.norm();
    if prepared.len() != reference.len() || norm == 0.0 || prepared.dot(reference) <= 0.0 {
        return f64::INFINITY;
    }
    (prepared - reference / norm).norm()
}

/// Constants of the gate budget: every recursive preparer spends at most
/// `C max(1, log n)` gates outside its calls, the sum of flows grows by at most
/// that much per level, and a whole circuit stays below
/// `C (ell + 1)^K max(1, log n)`.
pub const BUDGET_C: usize = 4;
pub const BUDGET_K: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub c: usize,
    pub k: u32,
    pub per_level: usize,
    pub worst_local: usize,
    pub worst_sum_step: usize,
    pub total: usize,
    pub total_bound: usize,
}

impl BudgetReport {
    pub fn holds(&self) -> bool {
        self.worst_local <= self.per_level && self.worst_sum_step <= self.per_level && self.total <= self.total_bound
    }
}

pub fn budget(circuit: &PrepCircuit, n: usize) -> BudgetReport {
    let per_level = BUDGET_C * qubits(n).max(1);
    let mut nodes = Vec::new();
    circuit.walk(&mut nodes);
    let mut worst_local = 0;
    let mut worst_sum_step = 0;
    for node in nodes {
        match node.kind {
            Kind::GroverRudolph => {}
            Kind::SumOfFlows => {
                let prev = if node.ell == 0 { 0 } else { (node.ell - 1) + node.ell * qubits(n) };
                worst_sum_step = worst_sum_step.max(node.gate_count() - prev);
            }
            _ => worst_local = worst_local.max(node.local_count()),
        }
    }
    BudgetReport {
        c: BUDGET_C,
        k: BUDGET_K,
        per_level,
        worst_local,
        worst_sum_step,
        total: circuit.gate_count(),
        total_bound: per_level * (circuit.ell + 1).pow(BUDGET_K),
    }
}

/// Worst case of one preparer family over all its inputs at a given size.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FamilyCheck {
    pub family: &'static str,
    pub ell: usize,
    pub instances: usize,
    pub max_residual: f64,
    pub max_gates: usize,
    pub budget_ok: bool,
}

/// Runs the four preparers on every input at `(n, ell)` and compares with the
/// flow tables: sums of flows, Fourier sums for each `x`, circulations for each
/// `z != 0` and `x` (`ell >= 1`), and flows with boundary for each `j`.
pub fn verify(n: usize, ell: usize) -> Result<Vec<FamilyCheck>, PrepError> {
    check_n(n)?;
    let table = crate::basis::FlowTable::new(n, ell);
    let net = crate::network::SwitchingNet::build(n, ell, 0).map_err(|_| PrepError::BadLevel(ell))?;
    let mut out = Vec::new();
    let mut record = |family, items: Vec<(PrepCircuit, DVector<f64>)>| {
        let mut check = FamilyCheck { family, ell, instances: items.len(), max_residual: 0.0, max_gates: 0, budget_ok: true };
        for (c, reference) in items {
            check.max_residual = check.max_residual.max(residual(c.output(), &reference));
            check.max_gates = check.max_gates.max(c.gate_count());
            check.budget_ok &= budget(&c, n).holds();
        }
        out.push(check);
    };
    record("sum_of_flows", vec![(prepare_sum_of_flows(n, ell)?, table.fourier_sum(ell, 0))]);
    let fourier = (0..n).map(|x| Ok((fourier_flows(n, ell, x)?, table.fourier_sum(ell, x)))).collect::<Result<_, PrepError>>()?;
    record("fourier", fourier);
    if ell >= 1 {
        let mut psi = Vec::new();
        for z in 1..n {
            for x in 0..n {
                psi.push((prepare_psi(n, ell, z, x)?, table.psi(ell, z, x)?));
            }
        }
        record("psi", psi);
    }
    let theta = (0..n)
        .map(|j| Ok((prepare_theta(n, ell, j, true)?, crate::basis::theta_state(&net, &table, j, true))))
        .collect::<Result<_, PrepError>>()?;
    record("theta", theta);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{bperp_basis, FlowTable};
    use crate::network::SwitchingNet;
    use num_bigint::BigInt;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn uniform_and_basis_states() {
        let spec = AmplitudeSpec::from_squares(2, vec![q(1, 1); 4]);
        let c = grover_rudolph(&spec, 2).unwrap();
        assert!(c.output().iter().all(|&a| (a - 0.5).abs() < 1e-12));
        assert_eq!(c.gate_count(), 2);
        let spec = AmplitudeSpec::from_squares(2, vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        let c = grover_rudolph(&spec, 2).unwrap();
        assert_eq!(c.output().as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn grover_rudolph_errors() {
        let spec = AmplitudeSpec::new(1, |p: &[u8]| if p.is_empty() { q(1, 1) } else if p[0] == 0 { q(2, 1) } else { q(-1, 1) });
        assert_eq!(grover_rudolph(&spec, 2).unwrap_err(), PrepError::NegativePrefix { prefix: vec![1] });
        let spec = AmplitudeSpec::new(1, |p: &[u8]| if p.is_empty() { q(3, 1) } else { q(1, 1) });
        assert_eq!(grover_rudolph(&spec, 2).unwrap_err(), PrepError::Inconsistent { prefix: vec![] });
        assert_eq!(grover_rudolph(&spec, 1).unwrap_err(), PrepError::BadAlphabet(1));
    }

    #[test]
    fn layer_amplitudes() {
        let spec = AmplitudeSpec::new(1, |p: &[u8]| prefix_sum_s(2, 1, p));
        let c = grover_rudolph(&spec, 3).unwrap();
        let want = [(2.0f64 / 4.0).sqrt(), 0.5, 0.5];
        for (a, w) in c.output().iter().zip(want) {
            assert!((a - w).abs() < 1e-12);
        }
    }

    #[test]
    fn sum_of_flows_matches_table() {
        for (n, ell) in [(2, 0), (2, 1), (2, 3), (4, 2)] {
            let t = FlowTable::new(n, ell);
            let c = prepare_sum_of_flows(n, ell).unwrap();
            assert!(residual(c.output(), &t.fourier_sum(ell, 0)) < 1e-9, "n={n} l={ell}");
        }
    }

    #[test]
    fn fourier_base_case() {
        let n = 4;
        let c = fourier_flows(n, 1, 1).unwrap();
        let t = FlowTable::new(n, 1);
        let target = t.fourier_sum(1, 1);
        assert!((target.norm_squared() * (n * n) as f64 - 2.0 * (n * n) as f64).abs() < 1e-9);
        assert!(residual(c.output(), &target) < 1e-9);
    }

    #[test]
    fn psi_weights_without_register_norms_fail() {
        let (n, ell, z) = (4, 2, 1);
        let t = FlowTable::new(n, ell);
        let big = to_f64(&closed::n_x(n, ell - 1)).sqrt();
        let n0 = to_f64(&closed::n_zero(n, ell - 1)).sqrt();
        let amps = [n as f64 * big, n0, big];
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let cz = fourier_flows(n, ell - 1, z).unwrap();
        let c0 = fourier_flows(n, ell - 1, 0).unwrap();
        let v = symbol(n, 0, &basis_state(n, 0)).kronecker(cz.output()) * (amps[0] / norm)
            + symbol(n, 1, &hadamard(n, z)).kronecker(c0.output()) * (amps[1] / norm)
            + symbol(n, 2, &hadamard(n, 0)).kronecker(cz.output()) * (amps[2] / norm);
        let reference = t.psi(ell, z, 0).unwrap();
        assert!(residual(&v, &reference) > 1e-3);
        assert!(residual(prepare_psi(n, ell, z, 0).unwrap().output(), &reference) < 1e-9);
    }

    #[test]
    fn fourier_recursion() {
        for (n, ell) in [(2, 2), (2, 3), (4, 2)] {
            let t = FlowTable::new(n, ell);
            for x in 0..n {
                let c = fourier_flows(n, ell, x).unwrap();
                assert!(residual(c.output(), &t.fourier_sum(ell, x)) < 1e-9, "n={n} l={ell} x={x}");
            }
        }
    }

    #[test]
    fn budgets_hold() {
        for n in [2, 4, 8] {
            for ell in 1..=4 {
                let circuits = [
                    prepare_sum_of_flows(n, ell).unwrap(),
                    fourier_flows(n, ell, 1).unwrap(),
                    prepare_psi(n, ell, 1, 0).unwrap(),
                    prepare_psi(n, ell, 1, 1).unwrap(),
                    prepare_theta(n, ell, n - 1, true).unwrap(),
                ];
                for c in &circuits {
                    let report = budget(c, n);
                    assert!(report.holds(), "n={n} l={ell} {:?} {report:?}", c.kind);
                }
            }
        }
    }

    #[test]
    fn psi_needs_nonzero_z() {
        assert_eq!(prepare_psi(2, 1, 0, 1).unwrap_err(), PrepError::Flow(FlowError::ZeroZ));
    }

    #[test]
    fn theta_with_boundary_matches_state() {
        let net = SwitchingNet::build(2, 2, 0).unwrap();
        let t = FlowTable::new(2, 2);
        let c = prepare_theta(2, 2, 1, true).unwrap();
        let reference = crate::basis::theta_state(&net, &t, 1, true);
        assert!(residual(c.output(), &reference) < 1e-9);
    }

    #[test]
    fn verify_all_families() {
        for (n, ell) in [(2, 0), (2, 1), (2, 2), (4, 1), (4, 2)] {
            let checks = verify(n, ell).unwrap();
            assert_eq!(checks.len(), if ell == 0 { 3 } else { 4 });
            for c in checks {
                assert!(c.max_residual < 1e-9 && c.budget_ok, "n={n} l={ell} {c:?}");
            }
        }
    }

    #[test]
    fn generated_basis_matches_reference() {
        let (n, ell) = (2, 2);
        let net = SwitchingNet::build(n, ell, 0).unwrap();
        let reference = bperp_basis(&net, &FlowTable::new(n, ell), 1);
        let generated = generate_basis(n, ell, 1).unwrap();
        assert_eq!(generated.len(), reference.len());
        for ((_l, v, _), r) in generated.iter().zip(&reference.vectors) {
            assert!(residual(v, r) < 1e-9, "{:?} {}", _l, residual(v, r));
        }
    }
}
