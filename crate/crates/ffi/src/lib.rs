//! C interface to `stconn`.
//!
//! Objects are opaque handles created by `*_new`/`*_build`/`*_parse` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`StconnStatus`]; on failure a message is available from
//! [`stconn_last_error`] until the next failing call on the same thread.
//! Vertex indices are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stconn::dstcon::{dstcon, Decider, DstconError, Verdict};
use stconn::graph::{Digraph, GraphOracle};
use stconn::network::SwitchingNet;
use stconn::span::{dist_l, Mode};
use stconn::tradeoff::{crossover_scan, log_t_classical, log_t_quantum, TradeoffError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StconnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Domain = 4,
    Invariant = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StconnMode {
    Exact = 0,
    Spectral = 1,
}

/// A directed graph without self-loops.
pub struct StconnGraph {
    inner: Digraph,
}

/// A switching network `N_{2^ell}(root)`.
pub struct StconnNet {
    inner: SwitchingNet,
}

/// Resource ledger of one `stconn_dstcon` run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StconnLedger {
    pub time_steps: u64,
    pub space_cells: usize,
    pub oracle_queries: u64,
    pub quantum_space_cells: usize,
    pub decider_calls: u64,
    pub peak_frontier: usize,
    pub guard_exhausted: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: StconnStatus, msg: impl ToString) -> StconnStatus {
    let text = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
    status
}

fn guard(f: impl FnOnce() -> StconnStatus) -> StconnStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(StconnStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, StconnStatus> {
    if p.is_null() {
        return Err(fail(StconnStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(StconnStatus::InvalidArgument, "string is not UTF-8"))
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => return fail(StconnStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
}

macro_rules! out {
    ($p:expr, $v:expr) => {
        match unsafe { $p.as_mut() } {
            Some(slot) => *slot = $v,
            None => return fail(StconnStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stconn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stconn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Empty graph on `n >= 2` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stconn_graph_new(n: usize, out: *mut *mut StconnGraph) -> StconnStatus {
    guard(|| match Digraph::new(n) {
        Ok(g) => {
            out!(out, Box::into_raw(Box::new(StconnGraph { inner: g })));
            StconnStatus::Ok
        }
        Err(e) => fail(StconnStatus::InvalidArgument, e),
    })
}

/// Parses the edge-list text format (`n m`, then `m` lines `i j`, 1-based).
///
/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn stconn_graph_parse(text: *const c_char, out: *mut *mut StconnGraph) -> StconnStatus {
    guard(|| {
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Digraph::parse(text) {
            Ok(g) => {
                out!(out, Box::into_raw(Box::new(StconnGraph { inner: g })));
                StconnStatus::Ok
            }
            Err(e) => fail(StconnStatus::Parse, e),
        }
    })
}

/// Adds the edge `a -> b`.
///
/// # Safety
/// `g` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn stconn_graph_add_edge(g: *mut StconnGraph, a: usize, b: usize) -> StconnStatus {
    guard(|| match unsafe { g.as_mut() } {
        Some(g) => match g.inner.add_edge(a, b) {
            Ok(()) => StconnStatus::Ok,
            Err(e) => fail(StconnStatus::InvalidArgument, e),
        },
        None => fail(StconnStatus::NullPointer, "null g"),
    })
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn stconn_graph_vertex_count(g: *const StconnGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stconn_graph_free(g: *mut StconnGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Builds `N_{2^ell}(root)` over `n` vertices, `n` a power of two.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stconn_net_build(n: usize, ell: usize, root: usize, out: *mut *mut StconnNet) -> StconnStatus {
    guard(|| match SwitchingNet::build(n, ell, root) {
        Ok(net) => {
            out!(out, Box::into_raw(Box::new(StconnNet { inner: net })));
            StconnStatus::Ok
        }
        Err(e) => fail(StconnStatus::InvalidArgument, e),
    })
}

/// # Safety
/// `net` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn stconn_net_edge_count(net: *const StconnNet) -> usize {
    net.as_ref().map_or(0, |n| n.inner.edge_count())
}

/// # Safety
/// `net` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn stconn_net_vertex_count(net: *const StconnNet) -> usize {
    net.as_ref().map_or(0, |n| n.inner.vertex_count())
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stconn_net_free(net: *mut StconnNet) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Whether the network connects its source to sink `sink` on input `g`.
///
/// # Safety
/// `net` and `g` must be live handles; `accepted` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stconn_net_accepts(
    net: *const StconnNet,
    g: *const StconnGraph,
    sink: usize,
    accepted: *mut bool,
) -> StconnStatus {
    guard(|| {
        let net = &deref!(net).inner;
        let g = &deref!(g).inner;
        if g.n() != net.n() || sink >= net.n() {
            return fail(StconnStatus::InvalidArgument, "graph size or sink does not match the network");
        }
        out!(accepted, net.accepts(&GraphOracle::new(g), sink).accepted);
        StconnStatus::Ok
    })
}

/// `Dist_L(u, v)`: whether `v` is within `l` steps of `u`.
///
/// # Safety
/// `g` must be a live handle; `answer` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stconn_dist(
    g: *const StconnGraph,
    u: usize,
    v: usize,
    l: usize,
    mode: StconnMode,
    answer: *mut bool,
) -> StconnStatus {
    guard(|| {
        let g = &deref!(g).inner;
        let mode = match mode {
            StconnMode::Exact => Mode::Exact,
            StconnMode::Spectral => Mode::Spectral,
        };
        match dist_l(g, u, v, l, mode) {
            Ok(o) => {
                out!(answer, o.answer);
                StconnStatus::Ok
            }
            Err(e) => fail(StconnStatus::InvalidArgument, e),
        }
    })
}

/// Runs the outer algorithm. `decider` is `exact`, `swnet[:exact|:spectral]`
/// or `noisy:P[:SEED]`; `connected` receives 1 or 0; `ledger` may be null.
///
/// # Safety
/// `g` must be a live handle, `decider` a NUL-terminated string and
/// `connected` writable.
#[no_mangle]
pub unsafe extern "C" fn stconn_dstcon(
    g: *const StconnGraph,
    s: usize,
    t: usize,
    l: usize,
    decider: *const c_char,
    reps: usize,
    connected: *mut c_int,
    ledger: *mut StconnLedger,
) -> StconnStatus {
    guard(|| {
        let g = &deref!(g).inner;
        let decider: Decider = match str_arg(decider).map(str::parse) {
            Ok(Ok(d)) => d,
            Ok(Err(e)) => return fail(StconnStatus::InvalidArgument, e),
            Err(s) => return s,
        };
        let result = match dstcon(g, s, t, l, decider, reps) {
            Ok(r) => r,
            Err(e @ DstconError::Invariant(_)) => return fail(StconnStatus::Invariant, e),
            Err(e) => return fail(StconnStatus::InvalidArgument, e),
        };
        out!(connected, c_int::from(result.verdict == Verdict::Connected));
        if let Some(slot) = unsafe { ledger.as_mut() } {
            let r = &result.ledger;
            *slot = StconnLedger {
                time_steps: r.time_steps,
                space_cells: r.space_cells,
                oracle_queries: r.oracle_queries,
                quantum_space_cells: r.quantum_space_cells,
                decider_calls: r.decider_calls,
                peak_frontier: r.peak_frontier,
                guard_exhausted: r.guard_exhausted,
            };
        }
        StconnStatus::Ok
    })
}

/// Both tradeoff exponents at `(n, s)` with hidden constant `c`.
///
/// # Safety
/// `classical` and `quantum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stconn_log_t(n: f64, s: f64, c: f64, classical: *mut f64, quantum: *mut f64) -> StconnStatus {
    guard(|| {
        let both = log_t_classical(n, s, c).and_then(|a| Ok((a, log_t_quantum(n, s, c)?)));
        match both {
            Ok((a, b)) => {
                out!(classical, a);
                out!(quantum, b);
                StconnStatus::Ok
            }
            Err(e @ TradeoffError::Domain { .. }) => fail(StconnStatus::Domain, e),
            Err(e) => fail(StconnStatus::InvalidArgument, e),
        }
    })
}

/// Largest power-of-two `S < n` where the quantum bound is at most the classical one.
///
/// # Safety
/// `s_star` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stconn_crossover(n: f64, c: f64, s_star: *mut f64) -> StconnStatus {
    guard(|| match crossover_scan(n, c) {
        Some(x) => {
            out!(s_star, x.s_star);
            StconnStatus::Ok
        }
        None => fail(StconnStatus::Domain, format!("no crossover below n = {n}")),
    })
}
