/* Copyright 2026 The gnnperf Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the gnnperf shared library. Handles are opaque; every
 * fallible call returns a status and leaves a message for
 * gnnperf_last_error() on the calling thread. Strings returned through
 * char** are owned by the caller and released with gnnperf_string_free().
 * Configuration arguments are JSON objects whose keys match the CLI flags.
 */
#ifndef GNNPERF_GNNPERF_H_
#define GNNPERF_GNNPERF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(GNNPERF_BUILDING_LIBRARY)
#define GNNPERF_API __attribute__((visibility("default")))
#else
#define GNNPERF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gnnperf_status {
  GNNPERF_OK = 0,
  GNNPERF_ERR_INTERNAL = 1,
  GNNPERF_ERR_CONFIG = 2,
  GNNPERF_ERR_DATA = 3,
  GNNPERF_ERR_NUMERIC = 4
} gnnperf_status;

typedef struct gnnperf_dataset gnnperf_dataset;
typedef struct gnnperf_model gnnperf_model;

GNNPERF_API const char* gnnperf_version(void);
/* Message of the last failed call on this thread; "" if none. */
GNNPERF_API const char* gnnperf_last_error(void);
GNNPERF_API void gnnperf_string_free(char* s);

/* Datasets. config_json keys: samples, seed, flows ("32" or "20..40"),
 * topology, nodes, k, rows, cols, exponent, capacities, traffic,
 * max-lambda, size-dist, size-mean, policy, buffer-bits, weights, duration,
 * warmup, random-tos, threads. */
GNNPERF_API gnnperf_status gnnperf_dataset_generate(const char* config_json, gnnperf_dataset** out);
/* Resolved generation config with every default filled in. */
GNNPERF_API gnnperf_status gnnperf_generate_config_resolve(const char* config_json, char** out_json);
GNNPERF_API gnnperf_status gnnperf_dataset_load(const char* path, gnnperf_dataset** out);
GNNPERF_API gnnperf_status gnnperf_dataset_save(const gnnperf_dataset* ds, const char* path);
GNNPERF_API size_t gnnperf_dataset_size(const gnnperf_dataset* ds);
GNNPERF_API gnnperf_status gnnperf_dataset_hash(const gnnperf_dataset* ds, char** out_hex);
/* The last round(fraction * n) samples (at least one) become validation. */
GNNPERF_API gnnperf_status gnnperf_dataset_split(const gnnperf_dataset* ds, double validation_fraction,
                                                 gnnperf_dataset** out_train, gnnperf_dataset** out_validation);
GNNPERF_API void gnnperf_dataset_free(gnnperf_dataset* ds);

/* Models. config_json keys: cell, hidden, iterations, readout-width, seed. */
GNNPERF_API gnnperf_status gnnperf_model_create(const char* config_json, gnnperf_model** out);
GNNPERF_API gnnperf_status gnnperf_model_load(const char* path, gnnperf_model** out);
/* Writes the checkpoint, including training state when the model came from
 * gnnperf_train or a resumable checkpoint. */
GNNPERF_API gnnperf_status gnnperf_model_save(const gnnperf_model* m, const char* path);
/* {"config": {...}, "parameters": n, "cell_parameters": n, "resumable": bool} */
GNNPERF_API gnnperf_status gnnperf_model_info(const gnnperf_model* m, char** out_json);
GNNPERF_API void gnnperf_model_free(gnnperf_model* m);

/* Trains on train_set, selecting the best epoch on validation_set.
 * train_config_json keys: task, lr, epochs, samples-per-update,
 * task-weights ({"delay": w, ...}), seed, patience, threads. When resume is
 * non-NULL it must be a model produced by an earlier run with the same
 * configuration; training continues from its last epoch.
 * out_result_json: {"metrics_csv", "config_hash", "best_epoch",
 * "epochs_run", "wall_seconds", "train_loss", "validation_loss"}. */
GNNPERF_API gnnperf_status gnnperf_train(const gnnperf_dataset* train_set, const gnnperf_dataset* validation_set,
                                         const char* model_config_json, const char* train_config_json,
                                         const gnnperf_model* resume, gnnperf_model** out_best,
                                         char** out_result_json);

/* {"model": {...}, "train": {...}, "config_hash": "..."} with defaults filled in. */
GNNPERF_API gnnperf_status gnnperf_train_config_resolve(const char* model_config_json, const char* train_config_json,
                                                        char** out_json);

/* {"tasks": {"delay": {"mape", "mae", "metric", "value"}, ...},
 *  "baseline": {"delay": {"mape", "mae"}}, "flows": n}. context is
 * "scheduling", "scalability" or "traffic-model" (selects the jitter metric). */
GNNPERF_API gnnperf_status gnnperf_evaluate(const gnnperf_model* m, const gnnperf_dataset* ds, const char* context,
                                            char** out_json);

/* Per-flow predictions: [{"sample", "flow", "delay", "jitter", "loss"}, ...]. */
GNNPERF_API gnnperf_status gnnperf_predict(const gnnperf_model* m, const gnnperf_dataset* ds, char** out_json);

/* runs_json: [{"label": "gru", "csv": "<metrics csv text>"}, ...]. Writes
 * comparison.csv and SVG charts into out_dir; out_json lists the files. */
GNNPERF_API gnnperf_status gnnperf_report(const char* runs_json, const char* context, const char* out_dir,
                                          char** out_json);

/* FNV-1a of a byte string as 16 hex digits. */
GNNPERF_API gnnperf_status gnnperf_hash_bytes(const char* data, size_t len, char** out_hex);

#ifdef __cplusplus
}
#endif

#endif /* GNNPERF_GNNPERF_H_ */
