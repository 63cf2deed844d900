#ifndef STARCONS_H
#define STARCONS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum StarconsStatus {
  STARCONS_STATUS_OK = 0,
  STARCONS_STATUS_NULL_POINTER = 1,
  STARCONS_STATUS_INVALID_ARGUMENT = 2,
  STARCONS_STATUS_INVALID_GRAPH = 3,
  STARCONS_STATUS_UNSUPPORTED = 4,
  STARCONS_STATUS_NUMERICAL = 5,
  STARCONS_STATUS_PANIC = 6,
} StarconsStatus;

// Topology family selector.
typedef enum StarconsFamily {
  STARCONS_FAMILY_SYMMETRIC_STAR = 0,
  STARCONS_FAMILY_CCS_STAR = 1,
  STARCONS_FAMILY_KCS_STAR = 2,
} StarconsFamily;

// Weighting scheme selector.
typedef enum StarconsWeighting {
  STARCONS_WEIGHTING_OPTIMAL = 0,
  STARCONS_WEIGHTING_METROPOLIS = 1,
  STARCONS_WEIGHTING_MAX_DEGREE = 2,
  STARCONS_WEIGHTING_BEST_CONSTANT = 3,
} StarconsWeighting;

// Quantization scheme selector.
typedef enum StarconsScheme {
  STARCONS_SCHEME_UNIFORM = 0,
  STARCONS_SCHEME_PROBABILISTIC = 1,
  STARCONS_SCHEME_NONE = 2,
} StarconsScheme;

// Opaque graph handle.
typedef struct StarconsGraph StarconsGraph;

// Opaque weight-matrix handle.
typedef struct StarconsMatrix StarconsMatrix;

// Monte Carlo summary. Fields undefined without consensus are NaN.
typedef struct StarconsStats {
  double psi;
  double eta;
  double mu;
  double rho;
  uint64_t trials;
  uint64_t consensus_trials;
} StarconsStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next failing call.
const char *starcons_last_error(void);

// Builds a star-family graph. `k` is ignored except for `KcsStar`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum StarconsStatus starcons_graph_new(enum StarconsFamily family,
                                       uint32_t m,
                                       uint32_t n,
                                       uint32_t k,
                                       struct StarconsGraph **out);

// Builds a connected custom graph from `edge_count` pairs stored flat in `edges` (`u0, v0, u1, v1, ...`).
//
// # Safety
// `edges` must point to `2 * edge_count` readable values; `out` must be writable.
enum StarconsStatus starcons_graph_from_edges(uint32_t node_count,
                                              const uint32_t *edges,
                                              size_t edge_count,
                                              struct StarconsGraph **out);

// Releases a graph handle. Null is accepted.
//
// # Safety
// `g` must be null or a handle from this library not yet freed.
void starcons_graph_free(struct StarconsGraph *g);

// Node count of a graph, or 0 for null.
//
// # Safety
// `g` must be null or a live handle.
size_t starcons_graph_node_count(const struct StarconsGraph *g);

// Edge count of a graph, or 0 for null.
//
// # Safety
// `g` must be null or a live handle.
size_t starcons_graph_edge_count(const struct StarconsGraph *g);

// Builds the weight matrix of `g` under `w`. Custom graphs support every scheme but `Optimal`.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum StarconsStatus starcons_matrix_new(const struct StarconsGraph *g,
                                        enum StarconsWeighting w,
                                        struct StarconsMatrix **out);

// Releases a matrix handle. Null is accepted.
//
// # Safety
// `w` must be null or a handle from this library not yet freed.
void starcons_matrix_free(struct StarconsMatrix *w);

// Order of a matrix, or 0 for null.
//
// # Safety
// `w` must be null or a live handle.
size_t starcons_matrix_order(const struct StarconsMatrix *w);

// Entry `(i, j)` of a matrix.
//
// # Safety
// `w` must be a live handle; `out` must be writable.
enum StarconsStatus starcons_matrix_get(const struct StarconsMatrix *w,
                                        size_t i,
                                        size_t j,
                                        double *out);

// SLEM of a weight matrix by eigendecomposition.
//
// # Safety
// `w` must be a live handle; `out` must be writable.
enum StarconsStatus starcons_matrix_slem(const struct StarconsMatrix *w, double *out);

// Closed-form optimal SLEM of a star-family topology. `guaranteed` (may be null)
// receives 0 when a k-cored star exceeds its boundary number of centres.
//
// # Safety
// `out` must be writable; `guaranteed` must be null or writable.
enum StarconsStatus starcons_slem_closed_form(enum StarconsFamily family,
                                              uint32_t m,
                                              uint32_t n,
                                              uint32_t k,
                                              double *out,
                                              int32_t *guaranteed);

// Boundary number of centres for a k-cored star with `m` tail nodes per branch and `n` branches.
//
// # Safety
// `out` must be writable.
enum StarconsStatus starcons_k_max(uint32_t m, uint32_t n, uint64_t *out);

// Monte Carlo batch of quantized consensus trials on `w`. Deterministic in `seed`.
//
// # Safety
// `w` must be a live handle; `out` must be writable.
enum StarconsStatus starcons_monte_carlo(const struct StarconsMatrix *w,
                                         uint32_t bits,
                                         enum StarconsScheme scheme,
                                         uint64_t trials,
                                         uint64_t seed,
                                         uint64_t max_iters,
                                         struct StarconsStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STARCONS_H */
