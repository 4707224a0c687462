#ifndef TRUECAL_H
#define TRUECAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TRUECAL_BUILDING_LIBRARY)
#    define TC_API __declspec(dllexport)
#  else
#    define TC_API __declspec(dllimport)
#  endif
#else
#  define TC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure, tc_last_error_message()
 * and tc_last_error_row() describe the error on the calling thread until the
 * next failing call on that thread. */
typedef enum tc_status {
  TC_OK = 0,
  TC_ERR_NEGATIVE_ENTRY = 1,
  TC_ERR_SUM_OUT_OF_TOLERANCE = 2,
  TC_ERR_DIMENSION_TOO_SMALL = 3,
  TC_ERR_NON_FINITE_ENTRY = 4,
  TC_ERR_CLASS_INDEX_OUT_OF_RANGE = 5,
  TC_ERR_LABEL_OUT_OF_RANGE = 6,
  TC_ERR_DIMENSION_MISMATCH = 7,
  TC_ERR_EMPTY_DATASET = 8,
  TC_ERR_INVALID_ARGUMENT = 9,
  TC_ERR_INVALID_SPEC = 10,
  TC_ERR_UNSUPPORTED_COLUMN = 11,
  TC_ERR_BUDGET_EXCEEDED = 12,
  TC_ERR_CONFIG_INVALID = 13,
  TC_ERR_INVARIANT_BREACH = 14,
  TC_ERR_NULL_ARGUMENT = 15,
  TC_ERR_OUT_OF_MEMORY = 16,
  TC_ERR_INTERNAL = 17
} tc_status;

/* Labels are passed as int64 with an explicit base. The base is applied once,
 * at dataset creation. */
typedef enum tc_label_base { TC_LABELS_ZERO_BASED = 0, TC_LABELS_ONE_BASED = 1 } tc_label_base;

typedef enum tc_measure_kind {
  TC_MEASURE_RAW_ECE = 0,
  TC_MEASURE_L1_QECE = 1,
  TC_MEASURE_L2_QECE = 2,
  TC_MEASURE_L1_FIXED = 3,
  TC_MEASURE_L2_FIXED = 4
} tc_measure_kind;

typedef enum tc_aggregation { TC_AGG_CLASSWISE = 0, TC_AGG_CONFIDENCE = 1 } tc_aggregation;

typedef enum tc_loss_kind {
  TC_LOSS_LOG = 0,
  TC_LOSS_BRIER = 1,
  TC_LOSS_CLASSIFICATION = 2,
  TC_LOSS_SPHERICAL = 3
} tc_loss_kind;

typedef enum tc_score_mode { TC_SCORES_LOGITS = 0, TC_SCORES_PROBS = 1 } tc_score_mode;

typedef struct tc_dataset tc_dataset;
typedef struct tc_result tc_result;

typedef struct tc_bin_summary {
  size_t size;
  double mean_prediction;
  double mean_outcome;
  double residual_sum;
} tc_bin_summary;

typedef struct tc_temperature_result {
  double temperature;
  double loss;
  double loss_at_one;
  size_t iterations;
} tc_temperature_result;

TC_API const char* tc_version(void);
TC_API const char* tc_status_name(tc_status status);
TC_API const char* tc_last_error_message(void);
/* Offending 0-based row of the last error, or -1 when not row-specific. */
TC_API int64_t tc_last_error_row(void);

/* Losses that diverge (log loss with p[y] = 0) are reported as this value,
 * which is IEEE +infinity. */
TC_API double tc_infinity(void);
TC_API int tc_is_infinity(double value);

TC_API tc_status tc_measure_kind_from_name(const char* name, tc_measure_kind* out);
TC_API const char* tc_measure_kind_name(tc_measure_kind kind);
TC_API tc_status tc_aggregation_from_name(const char* name, tc_aggregation* out);
TC_API const char* tc_aggregation_name(tc_aggregation agg);
TC_API tc_status tc_loss_kind_from_name(const char* name, tc_loss_kind* out);
TC_API const char* tc_loss_kind_name(tc_loss_kind kind);

/* probs is row-major n x k; labels has n entries. Every row is validated;
 * failures report the row through tc_last_error_row(). */
TC_API tc_status tc_dataset_create(const double* probs, const int64_t* labels, size_t n, size_t k,
                                   tc_label_base base, tc_dataset** out);
TC_API void tc_dataset_destroy(tc_dataset* ds);
TC_API size_t tc_dataset_size(const tc_dataset* ds);
TC_API size_t tc_dataset_classes(const tc_dataset* ds);

/* bins is ignored for TC_MEASURE_RAW_ECE. */
TC_API tc_status tc_measure_compute(const tc_dataset* ds, tc_measure_kind kind, tc_aggregation agg, size_t bins,
                                    tc_result** out);
TC_API tc_status tc_measure_value(const tc_dataset* ds, tc_measure_kind kind, tc_aggregation agg, size_t bins,
                                  double* out);
/* out_values receives count values, one per entry of bins. */
TC_API tc_status tc_measure_sweep(const tc_dataset* ds, tc_measure_kind kind, tc_aggregation agg,
                                  const size_t* bins, size_t count, double* out_values);

TC_API double tc_result_value(const tc_result* result);
/* k reductions for classwise aggregation, 1 for confidence. */
TC_API size_t tc_result_reduction_count(const tc_result* result);
TC_API double tc_result_reduction_value(const tc_result* result, size_t reduction);
/* Bins used by a reduction (for raw ECE: number of distinct prediction values). */
TC_API size_t tc_result_bin_count(const tc_result* result, size_t reduction);
TC_API tc_status tc_result_bin(const tc_result* result, size_t reduction, size_t bin, tc_bin_summary* out);
TC_API void tc_result_destroy(tc_result* result);

/* Mean per-sample loss over the dataset; may be tc_infinity(). */
TC_API tc_status tc_loss_mean(const tc_dataset* ds, tc_loss_kind kind, double* out);

/* Fits T by golden-section search on ln T in [-5, 5]. Probabilities are
 * turned into logits with log(max(p, 1e-12)). */
TC_API tc_status tc_temperature_fit(const double* scores, const int64_t* labels, size_t n, size_t k,
                                    tc_label_base base, tc_score_mode mode, double tolerance,
                                    tc_temperature_result* out);
/* out_probs (n x k) receives softmax(logits / T). */
TC_API tc_status tc_temperature_apply(const double* scores, size_t n, size_t k, tc_score_mode mode,
                                      double temperature, double* out_probs);

/* Runs a JSON-configured experiment; *out_json must be released with
 * tc_string_free. */
TC_API tc_status tc_run_experiment(const char* config_json, char** out_json);
TC_API void tc_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* TRUECAL_H */
