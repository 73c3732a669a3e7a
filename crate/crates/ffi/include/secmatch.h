#ifndef SECMATCH_H
#define SECMATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  // a required pointer argument was null
  SM_STATUS_NULL_POINTER = 1,
  // arguments violate a precondition
  SM_STATUS_INVALID_INPUT = 2,
  // the exact solver would exceed its size limit
  SM_STATUS_CAPACITY = 3,
  // malformed JSON or CSV
  SM_STATUS_PARSE = 4,
  SM_STATUS_IO = 5,
  // a Rust panic was caught at the boundary
  SM_STATUS_INTERNAL = 6,
} SmStatus;

// Opaque weighted graph.
typedef struct SmGraph SmGraph;

// Opaque matching.
typedef struct SmMatching SmMatching;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *sm_last_error(void);

// Build a graph on `n` vertices from `m` edges given as parallel arrays.
//
// # Safety
// `us`, `vs`, `ws` must each point to `m` readable elements (or be null
// when `m == 0`); `out` must be writable.
enum SmStatus sm_graph_new(size_t n,
                           const size_t *us,
                           const size_t *vs,
                           const double *ws,
                           size_t m,
                           struct SmGraph **out);

// Parse a graph from `{"n": .., "edges": [[u, v, w], ..]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SmStatus sm_graph_from_json(const char *json, struct SmGraph **out);

// # Safety
// `g` must come from a graph constructor and not be freed twice.
void sm_graph_free(struct SmGraph *g);

// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum SmStatus sm_graph_vertex_count(const struct SmGraph *g, size_t *out);

// Weight of the pair `{u, v}` (0 for absent pairs).
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum SmStatus sm_graph_weight(const struct SmGraph *g, size_t u, size_t v, double *out);

// Maximum-weight matching on the whole vertex set.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum SmStatus sm_max_weight_matching(const struct SmGraph *g, struct SmMatching **out);

// One run of the vertex-arrival algorithm with exploration length `k`.
// Order and coin streams are derived from `seed` as in the CLI.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum SmStatus sm_vertex_run(const struct SmGraph *g,
                            size_t k,
                            uint64_t seed,
                            struct SmMatching **out);

// # Safety
// `m` must come from a matching constructor and not be freed twice.
void sm_matching_free(struct SmMatching *m);

// # Safety
// `m` must be a live matching handle; `out` must be writable.
enum SmStatus sm_matching_len(const struct SmMatching *m, size_t *out);

// The `i`-th pair, with `u < v`, in ascending order.
//
// # Safety
// `m` must be a live matching handle; `u` and `v` must be writable.
enum SmStatus sm_matching_pair(const struct SmMatching *m, size_t i, size_t *u, size_t *v);

// Total weight of `m` in `g`.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum SmStatus sm_matching_weight(const struct SmMatching *m, const struct SmGraph *g, double *out);

// Exact expected weight of the edge-arrival algorithm (at most 8 positive
// edges).
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
enum SmStatus sm_edge_exact_expected_value(const struct SmGraph *g, double *out);

// Probability that a vertex among the first `t` arrivals is matched, by
// recursion (`1 ≤ k ≤ t`).
//
// # Safety
// `out` must be writable.
enum SmStatus sm_p_recursive(size_t k, size_t t, double *out);

// Closed form of the same probability (`3 ≤ k ≤ t`).
//
// # Safety
// `out` must be writable.
enum SmStatus sm_p_closed(size_t k, size_t t, double *out);

// Edge-arrival acceptance target `α_t` in closed form (`m/2 < t ≤ m`).
//
// # Safety
// `out` must be writable.
enum SmStatus sm_alpha_closed(size_t m, size_t t, double *out);

// Hypergraph `α_t` in closed form.
//
// # Safety
// `out` must be writable.
enum SmStatus sm_hyper_alpha_closed(size_t m, size_t d, size_t t, double *out);

// Lower-bound coefficient of the hypergraph algorithm.
//
// # Safety
// `out` must be writable.
enum SmStatus sm_hyper_coefficient(size_t m, size_t d, double *out);

// Objective of an ordinal policy `c_1..c_n`, each in `[0, 1]`.
//
// # Safety
// `c` must point to `n` readable values; `out` must be writable.
enum SmStatus sm_ordinal_objective(const double *c, size_t n, double *out);

// Value of the threshold policy with cutoff `l` on `n` vertices.
//
// # Safety
// `out` must be writable.
enum SmStatus sm_threshold_value(size_t n, size_t l, double *out);

// Best threshold for `n`; `l_star` receives the smallest maximiser.
//
// # Safety
// `l_star` and `value` must be writable.
enum SmStatus sm_optimal_threshold(size_t n, size_t *l_star, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SECMATCH_H */
