use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use stconn::basis::{bperp_basis, circulation_count, FlowTable};
use stconn::dstcon::{dstcon, Decider, DstconError, Verdict};
use stconn::graph::{bfs_distance, Digraph};
use stconn::network::SwitchingNet;
use stconn::pebbling::{format_trace, replay, strategy_moves, PebbleConfig};
use stconn::prep;
use stconn::span::{dist_l, Mode};
use stconn::tradeoff::{sweep, write_csv, SweepConfig, TradeoffError};

/// Switching networks for directed st-connectivity.
///
/// Vertices on the command line and in graph files are 1-based.
#[derive(Parser)]
#[command(name = "stconn", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Switching network inspection.
    Net {
        #[command(subcommand)]
        cmd: NetCmd,
    },
    /// Flow and circulation basis inspection.
    Basis {
        #[command(subcommand)]
        cmd: BasisCmd,
    },
    /// State preparation checks.
    Prep {
        #[command(subcommand)]
        cmd: PrepCmd,
    },
    /// Decide whether v is within distance L of u.
    Decide(DecideArgs),
    /// Run the outer st-connectivity algorithm.
    Dstcon(DstconArgs),
    /// Print the recursive pebbling strategy along a path.
    Pebble(PebbleArgs),
    /// Tradeoff sweep from a TOML config, CSV out.
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum NetCmd {
    /// One line per edge: `sigma;i;label_from;label_to`.
    Dump {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 1)]
        root: usize,
    },
}

#[derive(Subcommand)]
enum BasisCmd {
    /// Dimension table and Gram matrix of the normalized B-perp basis as CSV.
    Dump {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 2)]
        sink: usize,
    },
}

#[derive(Subcommand)]
enum PrepCmd {
    /// Residual and gate count per preparer family.
    Verify {
        #[arg(long)]
        n: usize,
        /// Path length, a power of two.
        #[arg(long = "L")]
        l: usize,
    },
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    u: usize,
    #[arg(long)]
    v: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long, default_value = "exact")]
    mode: Mode,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DstconArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: usize,
    #[arg(long = "L")]
    l: usize,
    /// exact, swnet[:exact|:spectral] or noisy:P[:SEED].
    #[arg(long, default_value = "exact")]
    decider: Decider,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PebbleArgs {
    #[arg(long = "L")]
    l: usize,
    /// Graph file; a directed path on L+1 vertices when omitted.
    #[arg(long, requires = "path")]
    graph: Option<PathBuf>,
    /// Comma-separated vertices `v0,...,vL`.
    #[arg(long, value_delimiter = ',')]
    path: Option<Vec<usize>>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Invariant(String),
}

impl From<DstconError> for Failure {
    fn from(e: DstconError) -> Self {
        match e {
            DstconError::InvalidParams(_) => Failure::Config(e.to_string()),
            _ => Failure::Invariant(e.to_string()),
        }
    }
}

impl From<TradeoffError> for Failure {
    fn from(e: TradeoffError) -> Self {
        match e {
            TradeoffError::Run(inner) => inner.into(),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn load_graph(path: &Path) -> Result<Digraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Digraph::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn vertex(label: usize, n: usize, name: &str) -> Result<usize, Failure> {
    if label == 0 || label > n {
        return Err(Failure::Config(format!("--{name} {label} is not in 1..={n}")));
    }
    Ok(label - 1)
}

fn power_of_two_level(l: usize) -> Result<usize, Failure> {
    if !l.is_power_of_two() {
        return Err(Failure::Config(format!("L = {l} is not a power of two")));
    }
    Ok(l.trailing_zeros() as usize)
}

fn run(cmd: Cmd, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Cmd::Net { cmd: NetCmd::Dump { n, ell, root } } => {
            let root = vertex(root, n, "root")?;
            let net = SwitchingNet::build(n, ell, root).map_err(config)?;
            out.write_all(net.dump().as_bytes())?;
        }
        Cmd::Basis { cmd: BasisCmd::Dump { n, ell, sink } } => {
            let sink = vertex(sink, n, "sink")?;
            let net = SwitchingNet::build(n, ell, 0).map_err(config)?;
            let basis = bperp_basis(&net, &FlowTable::new(n, ell), sink);
            let expected = net.edge_count() + 4 - net.vertex_count();
            let mut text = String::from("quantity,value\n");
            for (k, v) in [
                ("n", n),
                ("ell", ell),
                ("edges", net.edge_count()),
                ("vertices", net.vertex_count()),
                ("state_dim", 2 * net.edge_count() + 4),
                ("circulations", circulation_count(n, ell)),
                ("bperp_basis", basis.len()),
                ("bperp_expected", expected),
            ] {
                let _ = writeln!(text, "{k},{v}");
            }
            text.push('\n');
            let gram = basis.normalized().gram();
            for row in gram.row_iter() {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:.12}")).collect();
                let _ = writeln!(text, "{}", cells.join(","));
            }
            out.write_all(text.as_bytes())?;
            if basis.len() != expected {
                return Err(Failure::Invariant(format!("basis has {} vectors, expected {expected}", basis.len())));
            }
        }
        Cmd::Prep { cmd: PrepCmd::Verify { n, l } } => {
            let ell = power_of_two_level(l)?;
            let checks = prep::verify(n, ell).map_err(config)?;
            writeln!(out, "{:<14}{:>10}{:>16}{:>12}{:>8}", "family", "instances", "max_residual", "gate_count", "budget")?;
            for c in &checks {
                let ok = if c.budget_ok { "ok" } else { "over" };
                writeln!(out, "{:<14}{:>10}{:>16.3e}{:>12}{:>8}", c.family, c.instances, c.max_residual, c.max_gates, ok)?;
            }
            if let Some(bad) = checks.iter().find(|c| c.max_residual >= 1e-9 || !c.budget_ok) {
                return Err(Failure::Invariant(format!("{} preparer failed verification", bad.family)));
            }
        }
        Cmd::Decide(a) => {
            let g = load_graph(&a.graph)?;
            let (u, v) = (vertex(a.u, g.n(), "u")?, vertex(a.v, g.n(), "v")?);
            let outcome = dist_l(&g, u, v, a.l, a.mode).map_err(config)?;
            let truth = bfs_distance(&g, u, v).is_some_and(|d| d <= a.l);
            if a.json {
                let body = json!({ "u": a.u, "v": a.v, "L": a.l, "mode": a.mode, "outcome": outcome, "bfs": truth });
                writeln!(out, "{}", serde_json::to_string_pretty(&body).map_err(config)?)?;
            } else {
                writeln!(out, "{}", if outcome.answer { "within" } else { "beyond" })?;
            }
            if a.mode == Mode::Exact && outcome.answer != truth {
                return Err(Failure::Invariant("exact decision disagrees with BFS".into()));
            }
        }
        Cmd::Dstcon(a) => {
            let g = load_graph(&a.graph)?;
            let (s, t) = (vertex(a.s, g.n(), "s")?, vertex(a.t, g.n(), "t")?);
            let result = dstcon(&g, s, t, a.l, a.decider, a.reps)?;
            if a.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&result).map_err(config)?)?;
            } else {
                let word = match result.verdict {
                    Verdict::Connected => "connected",
                    Verdict::NotConnected => "not connected",
                };
                writeln!(out, "{word}")?;
                let l = &result.ledger;
                writeln!(out, "time_steps={} space_cells={} quantum_space_cells={}", l.time_steps, l.space_cells, l.quantum_space_cells)?;
            }
        }
        Cmd::Pebble(a) => {
            power_of_two_level(a.l)?;
            let (g, path) = match (a.graph, a.path) {
                (Some(file), Some(labels)) => {
                    let g = load_graph(&file)?;
                    let path = labels.iter().map(|&v| vertex(v, g.n(), "path")).collect::<Result<Vec<_>, _>>()?;
                    (g, path)
                }
                (None, labels) => {
                    let g = Digraph::layered_path(a.l + 1).map_err(config)?;
                    let path = match labels {
                        Some(labels) => labels.iter().map(|&v| vertex(v, g.n(), "path")).collect::<Result<Vec<_>, _>>()?,
                        None => (0..=a.l).collect(),
                    };
                    (g, path)
                }
                (Some(_), None) => unreachable!("clap requires --path with --graph"),
            };
            let moves = strategy_moves(&g, &path, a.l).map_err(config)?;
            let (_, peak) = replay(&g, PebbleConfig::start(path[0]), &moves).map_err(|e| Failure::Invariant(e.to_string()))?;
            out.write_all(format_trace(a.l, &path, &moves).as_bytes())?;
            eprintln!("moves={} peak_pebbles={peak}", moves.len());
        }
        Cmd::Sweep(a) => {
            let text = fs::read_to_string(&a.config).map_err(|e| Failure::Config(format!("{}: {e}", a.config.display())))?;
            let cfg = SweepConfig::from_toml(&text)?;
            let rows = sweep(&cfg)?;
            for r in &rows {
                if let Some(q) = r.measured_quantum_cells {
                    let bound = stconn::tradeoff::quantum_space_bound(r.n, r.l);
                    if q > bound {
                        return Err(Failure::Invariant(format!("n={} L={}: {q} quantum cells exceed {bound}", r.n, r.l)));
                    }
                }
            }
            match a.out {
                Some(path) => write_csv(&rows, fs::File::create(path)?)?,
                None => write_csv(&rows, &mut *out)?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli.cmd, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(3)
        }
    }
}
