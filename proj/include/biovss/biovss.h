/*
 * C interface to the biovss vector-set search library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a bvss_status; on
 * failure bvss_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread).
 */
#ifndef BIOVSS_BIOVSS_H
#define BIOVSS_BIOVSS_H

#include <stddef.h>
#include <stdint.h>

#if defined(BIOVSS_BUILDING_C_API)
#define BVSS_API __attribute__((visibility("default")))
#else
#define BVSS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bvss_status {
  BVSS_OK = 0,
  BVSS_ERR_INVALID_ARGUMENT = 1,
  BVSS_ERR_IO = 2,
  BVSS_ERR_INTEGRITY = 3,
  BVSS_ERR_INTERNAL = 4
} bvss_status;

typedef enum bvss_mode { BVSS_MODE_EXACT = 0, BVSS_MODE_BIOVSS = 1, BVSS_MODE_BIOVSS_PP = 2 } bvss_mode;

typedef enum bvss_metric { BVSS_METRIC_HAUSDORFF = 0, BVSS_METRIC_MEANMIN = 1, BVSS_METRIC_MIN = 2 } bvss_metric;

typedef struct bvss_database bvss_database;
typedef struct bvss_index bvss_index;
typedef struct bvss_result bvss_result;
typedef struct bvss_ground_truth bvss_ground_truth;

BVSS_API const char* bvss_last_error(void);
BVSS_API const char* bvss_version(void);

BVSS_API bvss_status bvss_parse_mode(const char* name, bvss_mode* out);
BVSS_API bvss_status bvss_parse_metric(const char* name, bvss_metric* out);

/* ---- databases ---------------------------------------------------------- */

typedef struct bvss_synthetic_params {
  size_t num_sets;
  size_t min_cardinality;
  size_t max_cardinality;
  size_t dim;
  size_t num_clusters;
  double spread;
  uint64_t seed;
} bvss_synthetic_params;

BVSS_API void bvss_synthetic_defaults(bvss_synthetic_params* params);

/* Binary "BVSS" files, or JSON lines when the path ends in .jsonl. */
BVSS_API bvss_status bvss_database_read(const char* path, bvss_database** out);
BVSS_API bvss_status bvss_database_write(const bvss_database* db, const char* path);
BVSS_API bvss_status bvss_database_synthetic(const bvss_synthetic_params* params, bvss_database** out);
BVSS_API size_t bvss_database_size(const bvss_database* db);
BVSS_API size_t bvss_database_dim(const bvss_database* db);
BVSS_API size_t bvss_database_max_cardinality(const bvss_database* db);
BVSS_API uint64_t bvss_database_set_id(const bvss_database* db, size_t ordinal);
BVSS_API void bvss_database_free(bvss_database* db);

/* ---- indexes ------------------------------------------------------------ */

typedef struct bvss_build_params {
  size_t bloom_size; /* b */
  size_t wta;        /* L_wta */
  uint64_t seed;
  double density; /* random projection nonzero fraction */
  int train;      /* nonzero: learned projection */
  size_t epochs;
  size_t batch_size;
} bvss_build_params;

typedef struct bvss_build_timings {
  double training_s;
  double hashing_s;
  double count_filters_s;
  double sketches_s;
  double inverted_index_s;
} bvss_build_timings;

typedef struct bvss_storage_bytes {
  size_t dense;
  size_t coo;
  size_t csr;
} bvss_storage_bytes;

BVSS_API void bvss_build_defaults(bvss_build_params* params);
/* timings may be NULL. */
BVSS_API bvss_status bvss_index_build(const bvss_database* db, const bvss_build_params* params, bvss_index** out,
                                      bvss_build_timings* timings);
BVSS_API bvss_status bvss_index_save(const bvss_index* index, const char* path);
BVSS_API bvss_status bvss_index_load(const char* path, bvss_index** out);
/* Fails with BVSS_ERR_INVALID_ARGUMENT naming the first mismatched field. */
BVSS_API bvss_status bvss_index_check(const bvss_index* index, const bvss_database* db);
BVSS_API size_t bvss_index_bloom_size(const bvss_index* index);
BVSS_API size_t bvss_index_wta(const bvss_index* index);
BVSS_API uint64_t bvss_index_seed(const bvss_index* index);
BVSS_API int bvss_index_trained(const bvss_index* index);
BVSS_API bvss_status bvss_index_storage_bytes(const bvss_index* index, bvss_storage_bytes* out);
BVSS_API void bvss_index_free(bvss_index* index);

/* ---- search ------------------------------------------------------------- */

typedef struct bvss_search_params {
  bvss_mode mode;
  bvss_metric metric;
  size_t k;
  size_t access;      /* A */
  uint32_t min_count; /* M */
  size_t candidates;  /* c */
  size_t bloom_size;  /* 0: take from index; otherwise must match it */
  size_t wta;         /* 0: take from index; otherwise must match it */
  int exclude_self;   /* nonzero: drop the set whose id equals the query's id */
} bvss_search_params;

typedef struct bvss_diagnostics {
  size_t stage1_survivors;
  size_t stage2_survivors;
  size_t exact_evaluations;
  int truncated;
} bvss_diagnostics;

BVSS_API void bvss_search_defaults(bvss_search_params* params);
/* index may be NULL for BVSS_MODE_EXACT. */
BVSS_API bvss_status bvss_search(const bvss_index* index, const bvss_database* db, const bvss_database* queries,
                                 size_t query_ordinal, const bvss_search_params* params, bvss_result** out);
BVSS_API size_t bvss_result_size(const bvss_result* result);
BVSS_API bvss_status bvss_result_hit(const bvss_result* result, size_t rank, uint64_t* id, double* distance);
BVSS_API void bvss_result_diagnostics(const bvss_result* result, bvss_diagnostics* out);
BVSS_API void bvss_result_free(bvss_result* result);

/* ---- evaluation --------------------------------------------------------- */

/* queries == NULL samples num_queries sets from db and excludes each from its own ranking. */
BVSS_API bvss_status bvss_ground_truth_compute(const bvss_database* db, const bvss_database* queries,
                                               size_t num_queries, uint64_t seed, bvss_metric metric, size_t k,
                                               bvss_ground_truth** out);
BVSS_API bvss_status bvss_ground_truth_write_csv(const bvss_ground_truth* truth, const char* path);
BVSS_API bvss_status bvss_ground_truth_read_csv(const char* path, bvss_ground_truth** out);
BVSS_API size_t bvss_ground_truth_queries(const bvss_ground_truth* truth);
BVSS_API void bvss_ground_truth_free(bvss_ground_truth* truth);

typedef struct bvss_bench_grid {
  const bvss_mode* modes;
  size_t num_modes;
  const size_t* bloom_sizes;
  size_t num_bloom_sizes;
  const size_t* wtas;
  size_t num_wtas;
  const size_t* access;
  size_t num_access;
  const uint32_t* min_counts;
  size_t num_min_counts;
  const size_t* candidates;
  size_t num_candidates;
  const size_t* ks;
  size_t num_ks;
  bvss_metric metric;
  bvss_build_params build;
} bvss_bench_grid;

/* queries == NULL: in-corpus queries named by the ground truth's query ids. */
BVSS_API bvss_status bvss_bench_run(const bvss_database* db, const bvss_database* queries,
                                    const bvss_ground_truth* truth, const bvss_bench_grid* grid,
                                    const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* BIOVSS_BIOVSS_H */
