#ifndef STCONN_H
#define STCONN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StconnStatus {
  STCONN_STATUS_OK = 0,
  STCONN_STATUS_NULL_POINTER = 1,
  STCONN_STATUS_INVALID_ARGUMENT = 2,
  STCONN_STATUS_PARSE = 3,
  STCONN_STATUS_DOMAIN = 4,
  STCONN_STATUS_INVARIANT = 5,
  STCONN_STATUS_PANIC = 6,
} StconnStatus;

typedef enum StconnMode {
  STCONN_MODE_EXACT = 0,
  STCONN_MODE_SPECTRAL = 1,
} StconnMode;

// A directed graph without self-loops.
typedef struct StconnGraph StconnGraph;

// A switching network `N_{2^ell}(root)`.
typedef struct StconnNet StconnNet;

// Resource ledger of one `stconn_dstcon` run.
typedef struct StconnLedger {
  uint64_t time_steps;
  size_t space_cells;
  uint64_t oracle_queries;
  size_t quantum_space_cells;
  uint64_t decider_calls;
  size_t peak_frontier;
  bool guard_exhausted;
} StconnLedger;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or an empty string. The
// pointer stays valid until the next failing call on the same thread.
const char *stconn_last_error(void);

// Library version as a static NUL-terminated string.
const char *stconn_version(void);

// Empty graph on `n >= 2` vertices.
//
// # Safety
// `out` must be writable.
enum StconnStatus stconn_graph_new(size_t n, struct StconnGraph **out);

// Parses the edge-list text format (`n m`, then `m` lines `i j`, 1-based).
//
// # Safety
// `text` must be a NUL-terminated string.
enum StconnStatus stconn_graph_parse(const char *text, struct StconnGraph **out);

// Adds the edge `a -> b`.
//
// # Safety
// `g` must be a live handle from this library.
enum StconnStatus stconn_graph_add_edge(struct StconnGraph *g, size_t a, size_t b);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle from this library.
size_t stconn_graph_vertex_count(const struct StconnGraph *g);

// # Safety
// `g` must be null or a handle from this library not yet freed.
void stconn_graph_free(struct StconnGraph *g);

// Builds `N_{2^ell}(root)` over `n` vertices, `n` a power of two.
//
// # Safety
// `out` must be writable.
enum StconnStatus stconn_net_build(size_t n, size_t ell, size_t root, struct StconnNet **out);

// # Safety
// `net` must be null or a live handle from this library.
size_t stconn_net_edge_count(const struct StconnNet *net);

// # Safety
// `net` must be null or a live handle from this library.
size_t stconn_net_vertex_count(const struct StconnNet *net);

// # Safety
// `net` must be null or a handle from this library not yet freed.
void stconn_net_free(struct StconnNet *net);

// Whether the network connects its source to sink `sink` on input `g`.
//
// # Safety
// `net` and `g` must be live handles; `accepted` must be writable.
enum StconnStatus stconn_net_accepts(const struct StconnNet *net,
                                     const struct StconnGraph *g,
                                     size_t sink,
                                     bool *accepted);

// `Dist_L(u, v)`: whether `v` is within `l` steps of `u`.
//
// # Safety
// `g` must be a live handle; `answer` must be writable.
enum StconnStatus stconn_dist(const struct StconnGraph *g,
                              size_t u,
                              size_t v,
                              size_t l,
                              enum StconnMode mode,
                              bool *answer);

// Runs the outer algorithm. `decider` is `exact`, `swnet[:exact|:spectral]`
// or `noisy:P[:SEED]`; `connected` receives 1 or 0; `ledger` may be null.
//
// # Safety
// `g` must be a live handle, `decider` a NUL-terminated string and
// `connected` writable.
enum StconnStatus stconn_dstcon(const struct StconnGraph *g,
                                size_t s,
                                size_t t,
                                size_t l,
                                const char *decider,
                                size_t reps,
                                int *connected,
                                struct StconnLedger *ledger);

// Both tradeoff exponents at `(n, s)` with hidden constant `c`.
//
// # Safety
// `classical` and `quantum` must be writable.
enum StconnStatus stconn_log_t(double n, double s, double c, double *classical, double *quantum);

// Largest power-of-two `S < n` where the quantum bound is at most the classical one.
//
// # Safety
// `s_star` must be writable.
enum StconnStatus stconn_crossover(double n, double c, double *s_star);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STCONN_H */
