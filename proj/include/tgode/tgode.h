/* Copyright 2026 The tgode Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to libtgode. Every function returns a tgode_status; on
 * failure tgode_last_error() describes the problem (thread-local, valid
 * until the next call on the same thread). Handles are opaque and owned by
 * the caller once returned.
 */

#ifndef TGODE_TGODE_H_
#define TGODE_TGODE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TGODE_BUILDING_LIBRARY)
#define TGODE_API __attribute__((visibility("default")))
#else
#define TGODE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tgode_status {
  TGODE_OK = 0,
  TGODE_ERR_ARGUMENT = 1, /* null pointer or bad enum string */
  TGODE_ERR_PARSE = 2,    /* malformed input log, config or grid */
  TGODE_ERR_IO = 3,       /* file missing, unreadable, corrupt */
  TGODE_ERR_SHAPE = 4,
  TGODE_ERR_NUMERIC = 5,  /* divergence, NaN/Inf */
  TGODE_ERR_INTERNAL = 6
} tgode_status;

typedef struct tgode_dataset tgode_dataset;
typedef struct tgode_model tgode_model;

typedef struct tgode_dataset_stats {
  uint64_t users;
  uint64_t items;
  uint64_t interactions;
  uint64_t train;
  uint64_t valid;
  uint64_t test;
  int32_t intervals;
} tgode_dataset_stats;

typedef struct tgode_metrics {
  double recall5;
  double recall10;
  double mrr;
  uint64_t evaluated;
  uint64_t skipped_cold;
  uint64_t skipped_masked;
} tgode_metrics;

/* Receives one progress line per call (no trailing newline). */
typedef void (*tgode_log_fn)(const char* line, void* user_data);

TGODE_API const char* tgode_version(void);
TGODE_API const char* tgode_last_error(void);
TGODE_API const char* tgode_status_string(tgode_status status);

/* Progress sink for train/ablate; NULL disables. Process-wide. */
TGODE_API void tgode_set_log(tgode_log_fn fn, void* user_data);

/* format: "movielens" | "amazon". */
TGODE_API tgode_status tgode_dataset_prepare(const char* input_path, const char* format,
                                             int intervals, tgode_dataset** out);
TGODE_API tgode_status tgode_dataset_load(const char* snapshot_path, tgode_dataset** out);
TGODE_API tgode_status tgode_dataset_save(const tgode_dataset* dataset, const char* snapshot_path);
TGODE_API tgode_status tgode_dataset_stats_get(const tgode_dataset* dataset,
                                               tgode_dataset_stats* out);
TGODE_API void tgode_dataset_free(tgode_dataset* dataset);

/* Trains per the config file, writing <out>/metrics.csv and
 * <out>/checkpoint.tgck. `out` may be NULL. */
TGODE_API tgode_status tgode_train(const char* config_path, tgode_model** out);

/* Runs every cell of a grid file. Writes the CSV to csv_path, or to
 * <out>/ablation.csv of the first cell when csv_path is NULL. */
TGODE_API tgode_status tgode_ablate(const char* grid_path, const char* csv_path,
                                    uint64_t* failed_cells);

/* Loads a checkpoint together with the dataset its config names. */
TGODE_API tgode_status tgode_model_load(const char* checkpoint_path, tgode_model** out);
TGODE_API tgode_status tgode_model_save(const tgode_model* model, const char* checkpoint_path);
/* Evaluation-only override: nonzero averages metrics per user instead of
 * per interaction. Does not change the stored config. */
TGODE_API tgode_status tgode_model_set_per_user(tgode_model* model, int per_user);
/* split: "valid" | "test". */
TGODE_API tgode_status tgode_model_evaluate(const tgode_model* model, const char* split,
                                            tgode_metrics* out);
/* Metrics CSV (header + one row) for `split`; csv_path NULL or "-" is stdout. */
TGODE_API tgode_status tgode_model_evaluate_csv(const tgode_model* model, const char* split,
                                                const char* csv_path);
/* what: "embeddings" | "attention". */
TGODE_API tgode_status tgode_model_export(const tgode_model* model, const char* what,
                                          const char* csv_path);
TGODE_API void tgode_model_free(tgode_model* model);

#ifdef __cplusplus
}
#endif

#endif /* TGODE_TGODE_H_ */
