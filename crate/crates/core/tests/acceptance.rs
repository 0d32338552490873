//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stconn::basis::{bperp_basis, circulation_basis, theta_state, FlowTable};
use stconn::closed::{self, to_f64};
use stconn::dstcon::{dstcon, reachable, Decider, DstconError, Verdict};
use stconn::flow::{optimal_flow_lsq, FlowFn};
use stconn::graph::{bfs_distance, Digraph, GraphOracle};
use stconn::linalg::max_normalized_overlap;
use stconn::network::{edge_count_formula, vertex_count_recurrence, SwitchingNet};
use stconn::pebbling::{reachable_configs, replay, strategy_moves, PebbleConfig};
use stconn::prep;
use stconn::span::{decide, witness_energy, BSpace};
use stconn::tradeoff::{crossover_scan, log_t_classical, log_t_quantum};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Criterion 1's inputs: every digraph on 2 vertices and 200 seeded ones on 4.
fn corpus() -> Vec<Digraph> {
    let mut graphs: Vec<Digraph> = Digraph::all(2).collect();
    for seed in 0..200u64 {
        let p = [0.15, 0.25, 0.35, 0.5][seed as usize % 4];
        graphs.push(Digraph::random(4, p, seed).unwrap());
    }
    graphs
}

/// Networks keyed by `(n, ell, root)`.
struct Nets(HashMap<(usize, usize, usize), SwitchingNet>);

impl Nets {
    fn get(&mut self, n: usize, ell: usize, root: usize) -> &SwitchingNet {
        self.0.entry((n, ell, root)).or_insert_with(|| SwitchingNet::build(n, ell, root).unwrap())
    }
}

fn instances(graphs: &[Digraph]) -> impl Iterator<Item = (&Digraph, usize, usize, usize)> {
    graphs.iter().flat_map(|g| {
        let n = g.n();
        (0..=2).flat_map(move |ell| (0..n).flat_map(move |u| (0..n).map(move |v| (g, ell, u, v))))
    })
}

fn criterion_1(graphs: &[Digraph], nets: &mut Nets) -> Outcome {
    let start = Instant::now();
    let (mut checked, mut mismatches) = (0, 0);
    for (g, ell, u, v) in instances(graphs) {
        let net = nets.get(g.n(), ell, u);
        let accepted = net.accepts(&GraphOracle::new(g), v).accepted;
        let truth = bfs_distance(g, u, v).is_some_and(|d| d <= 1 << ell);
        checked += 1;
        mismatches += usize::from(accepted != truth);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 60.0,
        format!("{checked} (graph, u, v, ell) cases, {mismatches} mismatches, {secs:.1} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut cases = 0;
    for n in [2, 4, 8] {
        for ell in 0..=3 {
            if edge_count_formula(n, ell) > 100_000 {
                continue;
            }
            let net = SwitchingNet::build(n, ell, 0).unwrap();
            cases += 1;
            if net.edge_count() as u128 != edge_count_formula(n, ell)
                || net.vertex_count() as u128 != vertex_count_recurrence(n, ell)
            {
                bad.push((n, ell));
            }
        }
    }
    outcome(bad.is_empty(), format!("{cases} (n, ell) sizes, mismatches at {bad:?}"))
}

fn criterion_3() -> Outcome {
    let (mut worst_overlap, mut worst_div, mut worst_pb) = (0f64, 0f64, 0f64);
    let mut counts_ok = true;
    for (n, ell) in [(2, 1), (2, 2), (4, 1)] {
        let net = SwitchingNet::build(n, ell, 0).unwrap();
        let table = FlowTable::new(n, ell);
        for circ in circulation_basis(&net, &table) {
            let f = FlowFn::from_state(&circ, net.edge_count());
            worst_div = f.divergences(&net).iter().fold(worst_div, |m, d| m.max(d.abs()));
        }
        for sink in 0..n {
            let basis = bperp_basis(&net, &table, sink);
            counts_ok &= basis.len() == net.edge_count() + 4 - net.vertex_count();
            worst_overlap = worst_overlap.max(max_normalized_overlap(&basis.vectors));
            let space = BSpace::build(&net, sink).unwrap();
            let dense = (space.p_b() - space.p_b_from_complement()).norm();
            worst_pb = worst_pb.max(space.mismatch()).max(dense);
        }
    }
    outcome(
        counts_ok && worst_overlap < 1e-9 && worst_div < 1e-9 && worst_pb < 1e-8,
        format!(
            "cardinality |E|+4-|V| {}, max overlap {worst_overlap:.1e}, max divergence {worst_div:.1e}, P_B gap {worst_pb:.1e}",
            if counts_ok { "ok" } else { "wrong" }
        ),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn criterion_4() -> Outcome {
    let mut worst_flow = 0f64;
    for (n, ell) in [(2, 1), (2, 2), (4, 1), (4, 2)] {
        let net = SwitchingNet::build(n, ell, 0).unwrap();
        let table = FlowTable::new(n, ell);
        let on = vec![true; net.edge_count()];
        for j in 0..n {
            let lsq = optimal_flow_lsq(&net, &on, j).unwrap().state(&net, j);
            let theta = theta_state(&net, &table, j, true);
            worst_flow = worst_flow.max((lsq - theta).amax());
        }
    }
    let mut worst_norm = 0f64;
    for n in [2, 4, 8] {
        let table = FlowTable::new(n, 3);
        for ell in 0..=3 {
            worst_norm = worst_norm.max(rel(table.fourier_sum(ell, 0).norm_squared(), to_f64(&closed::n_zero(n, ell))));
            for x in 1..n {
                worst_norm = worst_norm.max(rel(table.fourier_sum(ell, x).norm_squared(), to_f64(&closed::n_x(n, ell))));
            }
            for j in 0..n {
                worst_norm = worst_norm.max(rel(table.theta_bar(ell, j).norm_squared(), to_f64(&closed::f_j(n, ell))));
            }
        }
    }
    outcome(
        worst_flow < 1e-9 && worst_norm < 1e-9,
        format!(
            "theta vs least squares {worst_flow:.1e}, closed-form norms rel {worst_norm:.1e} \
             (N_x normalized with the 1/n of theta_bar; recurrence at n=2)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0f64;
    let mut budget_ok = true;
    let mut families = 0;
    for n in [2, 4] {
        for ell in 0..=2 {
            for c in prep::verify(n, ell).unwrap() {
                worst = worst.max(c.max_residual);
                budget_ok &= c.budget_ok;
                families += 1;
            }
        }
    }
    outcome(
        worst < 1e-9 && budget_ok,
        format!(
            "{families} family checks, max residual {worst:.1e}, budget (C={}, k={}) {}",
            prep::BUDGET_C,
            prep::BUDGET_K,
            if budget_ok { "holds" } else { "exceeded" }
        ),
    )
}

struct SpectralStats {
    checked: usize,
    disagreements: usize,
    accepting: usize,
    witness_violations: usize,
}

fn spectral_pass(graphs: &[Digraph], nets: &mut Nets) -> SpectralStats {
    let mut stats = SpectralStats { checked: 0, disagreements: 0, accepting: 0, witness_violations: 0 };
    for (g, ell, u, v) in instances(graphs) {
        let net = nets.get(g.n(), ell, u);
        let oracle = GraphOracle::new(g);
        let on = net.on_edges(&oracle);
        let exact = net.accepts_with(&on, v);
        let report = decide(net, on.clone(), v).unwrap();
        stats.checked += 1;
        stats.disagreements += usize::from(report.accepted != exact.accepted);
        if exact.accepted {
            stats.accepting += 1;
            let len = exact.path.len();
            let energy = witness_energy(net, &on, v).unwrap();
            if len > 3usize.pow(ell as u32) || energy > len as f64 + 1e-9 {
                stats.witness_violations += 1;
            }
        }
    }
    stats
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for l in [1usize, 2, 4, 8] {
        let g = Digraph::layered_path(l + 1).unwrap();
        let path: Vec<usize> = (0..=l).collect();
        let moves = strategy_moves(&g, &path, l).unwrap();
        let log_l = l.trailing_zeros() as usize;
        match replay(&g, PebbleConfig::start(0), &moves) {
            Ok((end, peak)) => {
                let ok = moves.len() == 3usize.pow(log_l as u32) && peak <= log_l + 2 && end.pebbled.len() == 2 && end.contains(l);
                pass &= ok;
                notes.push(format!("L={l}: {} moves, {peak} pebbles", moves.len()));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("L={l}: illegal trace ({e})"));
            }
        }
    }
    for ell in 2..=4usize {
        let g = Digraph::layered_path((1 << ell) + 2).unwrap();
        let configs = reachable_configs(&g, 0, ell, 1_000_000).unwrap();
        let far = configs.iter().flat_map(|c| c.pebbled.iter().copied()).max().unwrap_or(0);
        let far_pair = configs
            .iter()
            .filter(|c| c.len() == 2 && c.contains(0))
            .flat_map(|c| c.pebbled.iter().copied())
            .max()
            .unwrap_or(0);
        pass &= far < 1 << (ell - 1) && far_pair <= 1 << (ell - 2);
        notes.push(format!("{ell} pebbles: D={far}, D_r={far_pair}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let mut runs = 0;
    let mut wrong = 0;
    let mut guard_errors = 0;
    let mut check = |g: &Digraph, s: usize, t: usize, l: usize, decider: Decider, reps: usize| -> Option<bool> {
        match dstcon(g, s, t, l, decider, reps) {
            Ok(out) => Some((out.verdict == Verdict::Connected) == reachable(g, s, t)),
            Err(DstconError::Invariant(_)) => {
                guard_errors += 1;
                None
            }
            Err(e) => panic!("{e}"),
        }
    };
    for n in 2..=3 {
        for g in Digraph::all(n) {
            for s in 0..n {
                for t in 0..n {
                    for l in 1..=n {
                        runs += 1;
                        wrong += usize::from(check(&g, s, t, l, Decider::Exact, 1) != Some(true));
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [4, 5] {
        for k in 0..500u64 {
            let g = Digraph::random(n, rng.random_range(0.1..0.5), 1000 * n as u64 + k).unwrap();
            let (s, t) = (rng.random_range(0..n), rng.random_range(0..n));
            for l in 1..=n {
                runs += 1;
                wrong += usize::from(check(&g, s, t, l, Decider::Exact, 1) != Some(true));
            }
        }
    }
    let trials = 500;
    let mut noisy_wrong = 0;
    for k in 0..trials as u64 {
        let n = rng.random_range(4..=5);
        let g = Digraph::random(n, rng.random_range(0.1..0.5), 7000 + k).unwrap();
        let (s, t) = (rng.random_range(0..n), rng.random_range(0..n));
        let l = rng.random_range(1..=n);
        noisy_wrong += usize::from(check(&g, s, t, l, Decider::noisy(0.9, k), 11) != Some(true));
    }
    let rate = noisy_wrong as f64 / trials as f64;
    outcome(
        wrong == 0 && rate <= 0.02 && guard_errors == 0,
        format!(
            "exact: {runs} runs, {wrong} wrong; Noisy(0.9) x11: {noisy_wrong}/{trials} wrong ({:.1}%); space violations {guard_errors}",
            100.0 * rate
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut stars = Vec::new();
    let mut pass = true;
    for k in [10, 20, 30] {
        let n = 2f64.powi(k);
        let s = crossover_scan(n, 0.0).map(|x| x.s_star);
        pass &= s == Some(n.sqrt());
        stars.push(format!("S*(2^{k})={}", s.map_or("none".into(), |s| format!("2^{}", s.log2()))));
    }
    let (n, s) = (2f64.powi(20), 2f64.powi(10));
    let c = log_t_classical(n, s, 0.0).unwrap();
    let q = log_t_quantum(n, s, 0.0).unwrap();
    pass &= c == 100.0 && q == 100.0;
    outcome(pass, format!("{}; log T at (2^20, 2^10): classical {c}, quantum {q}", stars.join(", ")))
}

fn main() -> ExitCode {
    let graphs = corpus();
    let mut nets = Nets(HashMap::new());
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "switching-network correctness", criterion_1(&graphs, &mut nets)),
        (2, "counting identities", criterion_2()),
        (3, "B-perp basis validity", criterion_3()),
        (4, "optimal flow and closed-form norms", criterion_4()),
        (5, "state-preparation fidelity and budget", criterion_5()),
    ];
    let stats = spectral_pass(&graphs, &mut nets);
    results.push((
        6,
        "spectral decider calibration",
        outcome(
            stats.disagreements == 0,
            format!("{} cases, {} disagreements with the exact decider", stats.checked, stats.disagreements),
        ),
    ));
    results.push((7, "pebbling", criterion_7()));
    results.push((8, "outer algorithm", criterion_8()));
    results.push((9, "tradeoff formulas", criterion_9()));
    results.push((
        10,
        "witness bounds",
        outcome(
            stats.witness_violations == 0,
            format!("{} accepting cases, {} violations", stats.accepting, stats.witness_violations),
        ),
    ));
    let mut failed = 0;
    for (k, name, o) in &results {
        println!("{} criterion {k:>2} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
