#ifndef TRICOUNT_H
#define TRICOUNT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_ARGUMENT = 2,
  TC_STATUS_PARSE = 3,
  TC_STATUS_IO = 4,
  TC_STATUS_RUNTIME = 5,
  TC_STATUS_PANIC = 6,
} TcStatus;

/**
 * Values for [`TcRunOptions::algorithm`].
 */
typedef enum TcAlgorithm {
  TC_ALGORITHM_SEQ = 0,
  TC_ALGORITHM_SPACE_DIRECT = 1,
  TC_ALGORITHM_SPACE_SURROGATE = 2,
  TC_ALGORITHM_DYNAMIC = 3,
} TcAlgorithm;

/**
 * Values for [`TcRunOptions::cost`].
 */
typedef enum TcCost {
  TC_COST_UNIT = 0,
  TC_COST_DEGREE = 1,
  TC_COST_SUCC_SUM = 2,
  TC_COST_PRED_SUM = 3,
} TcCost;

/**
 * Values for [`TcRunOptions::backend`].
 */
typedef enum TcBackend {
  TC_BACKEND_DETERMINISTIC = 0,
  TC_BACKEND_PARALLEL = 1,
} TcBackend;

/**
 * Opaque graph handle.
 */
typedef struct TcGraph TcGraph;

/**
 * Opaque run report handle.
 */
typedef struct TcReport TcReport;

/**
 * Enum-valued fields are plain integers so that out-of-range values from C
 * are rejected instead of being undefined behavior.
 */
typedef struct TcRunOptions {
  /**
   * A [`TcAlgorithm`] value.
   */
  uint32_t algorithm;
  uint32_t ranks;
  /**
   * A [`TcCost`] value.
   */
  uint32_t cost;
  /**
   * A [`TcBackend`] value.
   */
  uint32_t backend;
  /**
   * Scheduler seed for the deterministic backend.
   */
  uint64_t seed;
  /**
   * Dynamic algorithm only: no tasks handed out after the initial split.
   */
  bool static_only;
} TcRunOptions;

typedef struct TcRankMetrics {
  uint64_t rank;
  uint64_t triangles;
  uint64_t data_msgs_sent;
  uint64_t bytes_sent;
  uint64_t requests_sent;
  uint64_t tasks_executed;
  uint64_t partition_bytes;
  /**
   * Seconds, or simulated work units under the deterministic backend.
   */
  double busy_time;
  double idle_time;
} TcRankMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *tc_last_error_message(void);

/**
 * Builds a graph from `edge_count` pairs stored flat in `pairs`
 * (`u0, v0, u1, v1, ...`). Loops and duplicates are dropped.
 *
 * # Safety
 * `pairs` must point to `2 * edge_count` readable values (it may be null
 * when `edge_count` is 0), and `out` must be a valid place to store a handle.
 */
enum TcStatus tc_graph_from_edges(const uint64_t *pairs, size_t edge_count, struct TcGraph **out);

/**
 * Loads a whitespace-separated edge list.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid place to store a
 * handle.
 */
enum TcStatus tc_graph_load_file(const char *path, struct TcGraph **out);

/**
 * Generates a preferential-attachment graph with `n` nodes and average
 * degree about `d` (even, at least 2).
 *
 * # Safety
 * `out` must be a valid place to store a handle.
 */
enum TcStatus tc_graph_generate_pa(size_t n, size_t d, uint64_t seed, struct TcGraph **out);

/**
 * # Safety
 * `graph` must be null or a handle from this library not yet freed.
 */
void tc_graph_free(struct TcGraph *graph);

/**
 * Node count, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t tc_graph_node_count(const struct TcGraph *graph);

/**
 * Edge count, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t tc_graph_edge_count(const struct TcGraph *graph);

/**
 * Sequential triangle count.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
enum TcStatus tc_count_triangles(const struct TcGraph *graph, uint64_t *out);

/**
 * Sequential algorithm, one rank, deterministic backend with seed 0.
 */
struct TcRunOptions tc_run_options_default(void);

/**
 * Runs one counting algorithm and returns its report.
 *
 * # Safety
 * `graph` and `options` must be valid pointers and `out` a valid place to
 * store a handle.
 */
enum TcStatus tc_run(const struct TcGraph *graph,
                     const struct TcRunOptions *options,
                     struct TcReport **out);

/**
 * # Safety
 * `report` must be null or a handle from [`tc_run`] not yet freed.
 */
void tc_report_free(struct TcReport *report);

/**
 * Total triangle count, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
uint64_t tc_report_total(const struct TcReport *report);

/**
 * Seconds, or simulated work units under the deterministic backend.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double tc_report_wall_time(const struct TcReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t tc_report_rank_count(const struct TcReport *report);

/**
 * Copies rank `rank`'s metrics into `out`.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum TcStatus tc_report_rank(const struct TcReport *report, size_t rank, struct TcRankMetrics *out);

/**
 * Static name of a status code, e.g. `"ok"`.
 */
const char *tc_status_name(enum TcStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRICOUNT_H */
