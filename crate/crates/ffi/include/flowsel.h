#ifndef FLOWSEL_H
#define FLOWSEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FlowselStatus {
  FLOWSEL_STATUS_OK = 0,
  FLOWSEL_STATUS_NULL_POINTER = 1,
  FLOWSEL_STATUS_INVALID_ARGUMENT = 2,
  FLOWSEL_STATUS_IO = 3,
  FLOWSEL_STATUS_PARSE = 4,
  FLOWSEL_STATUS_DATA = 5,
  FLOWSEL_STATUS_TRAINING = 6,
  FLOWSEL_STATUS_MISMATCH = 7,
  FLOWSEL_STATUS_BUFFER_TOO_SMALL = 8,
  FLOWSEL_STATUS_PANIC = 9,
} FlowselStatus;

typedef struct FlowselModel FlowselModel;

// Normalized, aggregated feature scores.
typedef struct FlowselScores FlowselScores;

// A table plus the category codes of its text columns.
typedef struct FlowselTable FlowselTable;

typedef struct FlowselMetrics {
  double accuracy;
  double precision;
  double recall;
  double f1;
} FlowselMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *flowsel_last_error(void);

// Library version as a static NUL-terminated string.
const char *flowsel_version(void);

// Reads a CSV file. Text columns are coded lexicographically.
//
// # Safety
// `path` and `label_column` are NUL-terminated strings; `out` is writable.
enum FlowselStatus flowsel_table_load_csv(const char *path,
                                          const char *label_column,
                                          struct FlowselTable **out);

// Builds a binary table from row-major feature values and 0/1 labels.
//
// # Safety
// `values` holds `rows * features` doubles, `names` holds `features`
// NUL-terminated strings, `labels` holds `rows` bytes.
enum FlowselStatus flowsel_table_from_rows(const double *values,
                                           size_t rows,
                                           size_t features,
                                           const char *const *names,
                                           const uint8_t *labels,
                                           struct FlowselTable **out);

// # Safety
// `table` is a live handle; `rows` and `features` are writable.
enum FlowselStatus flowsel_table_shape(const struct FlowselTable *table,
                                       size_t *rows,
                                       size_t *features);

// Drops non-finite and negative rows and single-valued columns, then
// min-max normalizes every feature. The input handle is left untouched.
//
// # Safety
// `table` is a live handle; `out` is writable.
enum FlowselStatus flowsel_table_clean(const struct FlowselTable *table, struct FlowselTable **out);

// Keeps the rows labelled `benign` or `attack` and binarizes the label
// (benign 0, attack 1).
//
// # Safety
// `table` is a live handle; the labels are NUL-terminated; `out` is writable.
enum FlowselStatus flowsel_table_binarize(const struct FlowselTable *table,
                                          const char *benign,
                                          const char *attack,
                                          struct FlowselTable **out);

// Projection onto the given feature indices, in the given order.
//
// # Safety
// `table` is a live handle; `indices` holds `count` entries.
enum FlowselStatus flowsel_table_select(const struct FlowselTable *table,
                                        const size_t *indices,
                                        size_t count,
                                        struct FlowselTable **out);

// # Safety
// `table` is NULL or a handle not yet freed.
void flowsel_table_free(struct FlowselTable *table);

// Scores every feature of a cleaned binary table with all six methods and
// aggregates the normalized scores. `relief_m` 0 means `min(rows, 5000)`.
//
// # Safety
// `table` is a live handle; `out` is writable.
enum FlowselStatus flowsel_scores_compute(const struct FlowselTable *table,
                                          size_t bins,
                                          size_t relief_m,
                                          uint64_t seed,
                                          struct FlowselScores **out);

// Mean scores in feature order; `count` receives the feature count.
//
// # Safety
// `scores` is a live handle; `buf` holds `cap` doubles.
enum FlowselStatus flowsel_scores_mean(const struct FlowselScores *scores,
                                       double *buf,
                                       size_t cap,
                                       size_t *count);

// Indices of features scoring at least `threshold`, best first.
//
// # Safety
// `scores` is a live handle; `buf` holds `cap` entries.
enum FlowselStatus flowsel_scores_select(const struct FlowselScores *scores,
                                         double threshold,
                                         size_t *buf,
                                         size_t cap,
                                         size_t *count);

// The score table as CSV text.
//
// # Safety
// `scores` is a live handle; `buf` holds `cap` bytes.
enum FlowselStatus flowsel_scores_csv(const struct FlowselScores *scores,
                                      char *buf,
                                      size_t cap,
                                      size_t *needed);

// # Safety
// `scores` is NULL or a handle not yet freed.
void flowsel_scores_free(struct FlowselScores *scores);

// Trains a classifier. `algorithm` is one of `logistic`, `naive_bayes`,
// `svm`, `tree`, `forest`. `params_json` is NULL for defaults or a JSON
// object of that algorithm's settings, e.g. `{"tree_count": 25}`.
//
// # Safety
// `table` is a live handle; strings are NUL-terminated; `out` is writable.
enum FlowselStatus flowsel_model_train(const struct FlowselTable *table,
                                       const char *algorithm,
                                       const char *params_json,
                                       struct FlowselModel **out);

// # Safety
// `model` is a live handle; `buf` holds `cap` bytes.
enum FlowselStatus flowsel_model_to_json(const struct FlowselModel *model,
                                         char *buf,
                                         size_t cap,
                                         size_t *needed);

// # Safety
// `json` is NUL-terminated; `out` is writable.
enum FlowselStatus flowsel_model_from_json(const char *json, struct FlowselModel **out);

// # Safety
// `model` is a live handle; `path` is NUL-terminated.
enum FlowselStatus flowsel_model_save(const struct FlowselModel *model, const char *path);

// # Safety
// `path` is NUL-terminated; `out` is writable.
enum FlowselStatus flowsel_model_load(const char *path, struct FlowselModel **out);

// Predicts every row of `table`, whose features must match the model's
// manifest exactly. `classes` and `scores` (either may be NULL) hold `cap`
// entries; `count` receives the row count.
//
// # Safety
// Handles are live; buffers hold `cap` entries when non-NULL.
enum FlowselStatus flowsel_model_predict(const struct FlowselModel *model,
                                         const struct FlowselTable *table,
                                         uint8_t *classes,
                                         double *scores,
                                         size_t cap,
                                         size_t *count);

// Predicts one row given in manifest order.
//
// # Safety
// `model` is a live handle; `row` holds `len` doubles; outputs are writable.
enum FlowselStatus flowsel_model_predict_row(const struct FlowselModel *model,
                                             const double *row,
                                             size_t len,
                                             uint8_t *class_,
                                             double *score);

// # Safety
// `model` is NULL or a handle not yet freed.
void flowsel_model_free(struct FlowselModel *model);

// Accuracy, precision, recall and F1 from confusion counts, attack
// positive. Undefined ratios are 0.
//
// # Safety
// `out` is writable.
enum FlowselStatus flowsel_metrics(uint64_t tp,
                                   uint64_t fp,
                                   uint64_t fn_,
                                   uint64_t tn,
                                   struct FlowselMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOWSEL_H */
