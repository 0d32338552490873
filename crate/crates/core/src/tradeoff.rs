//! Classical versus quantum time-space tradeoff curves and experiment sweeps.
//!
//! All logarithms are base 2. The hidden `O(log n log log n)` term of both
//! bounds is exposed as `c * log n * log log n`.

use std::collections::HashSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dstcon::{dstcon, Decider, DstconError};
use crate::graph::Digraph;

#[derive(Debug, thiserror::Error)]
pub enum TradeoffError {
    #[error("space {s} is below log^2 n = {min} for n = {n}")]
    Domain { n: f64, s: f64, min: f64 },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] DstconError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn lg(x: f64) -> f64 {
    x.log2()
}

fn overhead(n: f64, c: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let ln = lg(n);
    c * ln * lg(ln).max(0.0)
}

/// `log(n/S)`, zero once `S >= n`.
fn ratio_log(n: f64, s: f64) -> f64 {
    lg(n / s).max(0.0)
}

fn check_domain(n: f64, s: f64) -> Result<(), TradeoffError> {
    let min = lg(n).powi(2);
    if s < min {
        return Err(TradeoffError::Domain { n, s, min });
    }
    Ok(())
}

/// `log T = log^2(n/S) + c log n log log n` for the classical algorithm.
pub fn log_t_classical(n: f64, s: f64, c: f64) -> Result<f64, TradeoffError> {
    check_domain(n, s)?;
    Ok(classical_formula(n, s, c))
}

/// `log T = (1/2) log n log(n/S) + c log n log log n` for the quantum algorithm.
pub fn log_t_quantum(n: f64, s: f64, c: f64) -> Result<f64, TradeoffError> {
    check_domain(n, s)?;
    Ok(quantum_formula(n, s, c))
}

/// The classical expression without the domain check.
pub fn classical_formula(n: f64, s: f64, c: f64) -> f64 {
    ratio_log(n, s).powi(2) + overhead(n, c)
}

/// The quantum expression without the domain check.
pub fn quantum_formula(n: f64, s: f64, c: f64) -> f64 {
    0.5 * lg(n) * ratio_log(n, s) + overhead(n, c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossover {
    /// Largest grid point `S < n` where the quantum bound is at most the
    /// classical one.
    pub s_star: f64,
    pub log2_s_star: u32,
    /// Grid spacing as a factor between neighbouring points.
    pub resolution: f64,
    /// Whether `S*` satisfies `S >= log^2 n`, where the bounds are stated.
    pub in_domain: bool,
}

/// Scans `S = 2^k`, `0 <= k < log n`, from the top down. The formulas are
/// evaluated outside their stated domain as well, so small `n` still get a
/// crossover, flagged by `in_domain`.
pub fn crossover_scan(n: f64, c: f64) -> Option<Crossover> {
    let top = lg(n).ceil() as u32;
    (0..top).rev().map(|k| (k, 2f64.powi(k as i32))).filter(|&(_, s)| s < n).find_map(|(k, s)| {
        (quantum_formula(n, s, c) <= classical_formula(n, s, c)).then(|| Crossover {
            s_star: s,
            log2_s_star: k,
            resolution: 2.0,
            in_domain: s >= lg(n).powi(2),
        })
    })
}

/// `L = Theta(n log n / S)`: the largest power of two at most
/// `n ceil(log n) / S`, clamped to `[1, n]`.
pub fn l_chosen(n: usize, s: usize) -> usize {
    let logn = (n.max(2) as f64).log2().ceil() as usize;
    let target = (n * logn / s.max(1)).clamp(1, n);
    1 << target.ilog2()
}

/// Constant in `quantum_space_cells <= KAPPA max(1, ceil log L) max(1, ceil log n)`.
pub const QUANTUM_SPACE_KAPPA: usize = 4;

pub fn quantum_space_bound(n: usize, l: usize) -> usize {
    let log_l = (l.max(1).next_power_of_two().trailing_zeros() as usize).max(1);
    let log_n = (n.max(2).next_power_of_two().trailing_zeros() as usize).max(1);
    QUANTUM_SPACE_KAPPA * log_l * log_n
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub n: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "logT_classical")]
    pub log_t_classical: Option<f64>,
    #[serde(rename = "logT_quantum")]
    pub log_t_quantum: Option<f64>,
    pub measured_time_steps: Option<u64>,
    pub measured_space_cells: Option<usize>,
    pub measured_quantum_cells: Option<usize>,
    /// Quantum bound at most the classical one.
    pub crossover: Option<bool>,
}

fn default_decider() -> String {
    "exact".into()
}

fn default_reps() -> usize {
    1
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_edge_prob() -> f64 {
    0.3
}

fn default_c() -> f64 {
    1.0
}

fn default_desk() -> usize {
    16
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Vec<usize>,
    pub s_grid: Vec<usize>,
    #[serde(default = "default_decider")]
    pub decider: String,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_edge_prob")]
    pub edge_prob: f64,
    /// Constant of the `log n log log n` term in both bounds.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Largest `n` for which the driver is actually run.
    #[serde(default = "default_desk")]
    pub desk_max_n: usize,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, TradeoffError> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| TradeoffError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), TradeoffError> {
        let bad = |m: &str| Err(TradeoffError::Config(m.into()));
        if self.n.is_empty() || self.s_grid.is_empty() {
            return bad("n and s_grid must be non-empty");
        }
        if self.n.iter().any(|&n| n < 2) || self.s_grid.contains(&0) {
            return bad("n must be at least 2 and S positive");
        }
        if self.reps % 2 == 0 {
            return bad("reps must be odd");
        }
        if self.seeds.is_empty() {
            return bad("seeds must be non-empty");
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return bad("edge_prob must lie in [0, 1]");
        }
        if !self.c.is_finite() || self.c < 0.0 {
            return bad("c must be a non-negative number");
        }
        self.decider.parse::<Decider>().map_err(TradeoffError::Config)?;
        Ok(())
    }
}

/// One row per distinct `(n, S)` in config order. Desk-scale rows also run the
/// driver from vertex 0 to `n - 1` on one random graph per seed and record the
/// worst ledger values.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<TradeoffPoint>, TradeoffError> {
    cfg.validate()?;
    let decider: Decider = cfg.decider.parse().map_err(TradeoffError::Config)?;
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for &s in &cfg.s_grid {
            if !seen.insert((n, s)) {
                continue;
            }
            let (nf, sf) = (n as f64, s as f64);
            let classical = log_t_classical(nf, sf, cfg.c).ok();
            let quantum = log_t_quantum(nf, sf, cfg.c).ok();
            let l = l_chosen(n, s);
            let mut row = TradeoffPoint {
                n,
                s,
                l,
                log_t_classical: classical,
                log_t_quantum: quantum,
                measured_time_steps: None,
                measured_space_cells: None,
                measured_quantum_cells: None,
                crossover: classical.zip(quantum).map(|(c, q)| q <= c),
            };
            if n <= cfg.desk_max_n {
                let (mut time, mut space, mut quantum) = (0, 0, 0);
                for &seed in &cfg.seeds {
                    let g = Digraph::random(n, cfg.edge_prob, seed).map_err(|e| TradeoffError::Config(e.to_string()))?;
                    let d = reseed(&decider, seed);
                    let out = dstcon(&g, 0, n - 1, l, d, cfg.reps)?;
                    time = time.max(out.ledger.time_steps);
                    space = space.max(out.ledger.space_cells);
                    quantum = quantum.max(out.ledger.quantum_space_cells);
                }
                row.measured_time_steps = Some(time);
                row.measured_space_cells = Some(space);
                row.measured_quantum_cells = Some(quantum);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn reseed(d: &Decider, seed: u64) -> Decider {
    match d {
        Decider::Noisy { p, seed: base, inner } => Decider::Noisy { p: *p, seed: base ^ seed, inner: inner.clone() },
        other => other.clone(),
    }
}

pub const CSV_HEADER: &str =
    "n,S,L,logT_classical,logT_quantum,measured_time_steps,measured_space_cells,measured_quantum_cells,crossover";

pub fn write_csv<W: Write>(rows: &[TradeoffPoint], out: W) -> Result<(), TradeoffError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        let (n, s) = (2f64.powi(20), 2f64.powi(10));
        assert_eq!(log_t_classical(n, s, 0.0).unwrap(), 100.0);
        assert_eq!(log_t_quantum(n, s, 0.0).unwrap(), 100.0);
        assert_eq!(log_t_quantum(n, 512.0, 0.0).unwrap(), 110.0);
        assert_eq!(quantum_formula(n, 32.0, 0.0), 150.0);
        assert_eq!(classical_formula(n, 32.0, 0.0), 225.0);
        assert_eq!(log_t_classical(n, 512.0, 0.0).unwrap(), 121.0);
        assert_eq!(log_t_quantum(n, n, 0.0).unwrap(), 0.0);
        assert!((log_t_classical(n, n, 1.0).unwrap() - 20.0 * 20f64.log2()).abs() < 1e-12);
        assert!(matches!(log_t_classical(n, 399.0, 0.0), Err(TradeoffError::Domain { .. })));
        assert!(log_t_classical(n, 400.0, 0.0).is_ok());
    }

    #[test]
    fn crossover_at_square_root() {
        for k in [10, 20, 30] {
            let n = 2f64.powi(k);
            let x = crossover_scan(n, 0.0).unwrap();
            assert_eq!(x.s_star, 2f64.powi(k / 2));
            assert_eq!(x.in_domain, k > 10);
            assert_eq!(crossover_scan(n, 3.0).unwrap().s_star, x.s_star);
        }
    }

    #[test]
    fn chosen_lengths() {
        assert_eq!(l_chosen(16, 16), 4);
        assert_eq!(l_chosen(16, 32), 2);
        assert_eq!(l_chosen(16, 64), 1);
        assert_eq!(l_chosen(16, 1), 16);
    }

    #[test]
    fn minimal_sweep() {
        let cfg = SweepConfig::from_toml("n = [16]\ns_grid = [16, 32, 64, 32]\n").unwrap();
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.measured_time_steps.is_some()));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some(CSV_HEADER));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn bad_configs() {
        assert!(SweepConfig::from_toml("n = [16]").is_err());
        assert!(SweepConfig::from_toml("n = [16]\ns_grid = [4]\nreps = 2").is_err());
        assert!(SweepConfig::from_toml("n = [16]\ns_grid = [4]\nbogus = 1").is_err());
        assert!(SweepConfig::from_toml("n = [16]\ns_grid = [4]\ndecider = \"magic\"").is_err());
    }
}
