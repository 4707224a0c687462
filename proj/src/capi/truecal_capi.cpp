#include "truecal.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "domain.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "losses.hpp"
#include "multiclass.hpp"
#include "numeric.hpp"
#include "temperature.hpp"

struct tc_dataset {
  truecal::LabeledDataset data;
};

struct tc_result {
  truecal::MulticlassResult data;
};

namespace {

struct LastError {
  std::string message;
  int64_t row = -1;
};

thread_local LastError last_error;

tc_status status_of(truecal::ErrorCode code) {
  using truecal::ErrorCode;
  switch (code) {
    case ErrorCode::NegativeEntry: return TC_ERR_NEGATIVE_ENTRY;
    case ErrorCode::SumOutOfTolerance: return TC_ERR_SUM_OUT_OF_TOLERANCE;
    case ErrorCode::DimensionTooSmall: return TC_ERR_DIMENSION_TOO_SMALL;
    case ErrorCode::NonFiniteEntry: return TC_ERR_NON_FINITE_ENTRY;
    case ErrorCode::ClassIndexOutOfRange: return TC_ERR_CLASS_INDEX_OUT_OF_RANGE;
    case ErrorCode::LabelOutOfRange: return TC_ERR_LABEL_OUT_OF_RANGE;
    case ErrorCode::DimensionMismatch: return TC_ERR_DIMENSION_MISMATCH;
    case ErrorCode::EmptyDataset: return TC_ERR_EMPTY_DATASET;
    case ErrorCode::InvalidArgument: return TC_ERR_INVALID_ARGUMENT;
    case ErrorCode::InvalidSpec: return TC_ERR_INVALID_SPEC;
    case ErrorCode::UnsupportedColumn: return TC_ERR_UNSUPPORTED_COLUMN;
    case ErrorCode::BudgetExceeded: return TC_ERR_BUDGET_EXCEEDED;
    case ErrorCode::ConfigInvalid: return TC_ERR_CONFIG_INVALID;
    case ErrorCode::InvariantBreach: return TC_ERR_INVARIANT_BREACH;
  }
  return TC_ERR_INTERNAL;
}

tc_status fail(tc_status status, std::string message, int64_t row = -1) {
  last_error.message = std::move(message);
  last_error.row = row;
  return status;
}

template <typename F>
tc_status guarded(F&& body) {
  try {
    body();
    return TC_OK;
  } catch (const truecal::Error& e) {
    return fail(status_of(e.code()), e.what(), e.index() ? static_cast<int64_t>(*e.index()) : -1);
  } catch (const std::bad_alloc&) {
    return fail(TC_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(TC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TC_ERR_INTERNAL, "unknown failure");
  }
}

tc_status null_argument(const char* name) { return fail(TC_ERR_NULL_ARGUMENT, std::string(name) + " is null"); }

truecal::MeasureKind to_core(tc_measure_kind kind) {
  switch (kind) {
    case TC_MEASURE_RAW_ECE: return truecal::MeasureKind::RawEce;
    case TC_MEASURE_L1_QECE: return truecal::MeasureKind::L1Qece;
    case TC_MEASURE_L2_QECE: return truecal::MeasureKind::L2Qece;
    case TC_MEASURE_L1_FIXED: return truecal::MeasureKind::L1Fixed;
    case TC_MEASURE_L2_FIXED: return truecal::MeasureKind::L2Fixed;
  }
  throw truecal::Error(truecal::ErrorCode::InvalidArgument, "unknown measure kind");
}

truecal::Aggregation to_core(tc_aggregation agg) {
  switch (agg) {
    case TC_AGG_CLASSWISE: return truecal::Aggregation::Classwise;
    case TC_AGG_CONFIDENCE: return truecal::Aggregation::Confidence;
  }
  throw truecal::Error(truecal::ErrorCode::InvalidArgument, "unknown aggregation");
}

truecal::LossKind to_core(tc_loss_kind kind) {
  switch (kind) {
    case TC_LOSS_LOG: return truecal::LossKind::Log;
    case TC_LOSS_BRIER: return truecal::LossKind::Brier;
    case TC_LOSS_CLASSIFICATION: return truecal::LossKind::Classification;
    case TC_LOSS_SPHERICAL: return truecal::LossKind::Spherical;
  }
  throw truecal::Error(truecal::ErrorCode::InvalidArgument, "unknown loss kind");
}

truecal::MeasureSpec make_spec(tc_measure_kind kind, tc_aggregation agg, size_t bins) {
  truecal::MeasureSpec spec{truecal::BinaryMeasure{to_core(kind), bins}, to_core(agg)};
  if (spec.measure.kind == truecal::MeasureKind::RawEce && spec.measure.bins == 0) spec.measure.bins = 1;
  spec.measure.validate();
  return spec;
}

std::vector<uint32_t> zero_based_labels(const int64_t* labels, size_t n, size_t k, tc_label_base base) {
  std::vector<uint32_t> out(n);
  const int64_t offset = base == TC_LABELS_ONE_BASED ? 1 : 0;
  for (size_t i = 0; i < n; ++i) {
    const int64_t v = labels[i] - offset;
    if (v < 0 || static_cast<uint64_t>(v) >= k) {
      throw truecal::Error(truecal::ErrorCode::LabelOutOfRange, "label outside the class range", i);
    }
    out[i] = static_cast<uint32_t>(v);
  }
  return out;
}

truecal::ScoreMode to_core(tc_score_mode mode) {
  if (mode == TC_SCORES_LOGITS) return truecal::ScoreMode::Logits;
  if (mode == TC_SCORES_PROBS) return truecal::ScoreMode::Probs;
  throw truecal::Error(truecal::ErrorCode::InvalidArgument, "unknown score mode");
}

}  // namespace

extern "C" {

const char* tc_version(void) { return truecal::kVersion; }

const char* tc_status_name(tc_status status) {
  switch (status) {
    case TC_OK: return "Ok";
    case TC_ERR_NEGATIVE_ENTRY: return "NegativeEntry";
    case TC_ERR_SUM_OUT_OF_TOLERANCE: return "SumOutOfTolerance";
    case TC_ERR_DIMENSION_TOO_SMALL: return "DimensionTooSmall";
    case TC_ERR_NON_FINITE_ENTRY: return "NonFiniteEntry";
    case TC_ERR_CLASS_INDEX_OUT_OF_RANGE: return "ClassIndexOutOfRange";
    case TC_ERR_LABEL_OUT_OF_RANGE: return "LabelOutOfRange";
    case TC_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case TC_ERR_EMPTY_DATASET: return "EmptyDataset";
    case TC_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case TC_ERR_INVALID_SPEC: return "InvalidSpec";
    case TC_ERR_UNSUPPORTED_COLUMN: return "UnsupportedColumn";
    case TC_ERR_BUDGET_EXCEEDED: return "BudgetExceeded";
    case TC_ERR_CONFIG_INVALID: return "ConfigInvalid";
    case TC_ERR_INVARIANT_BREACH: return "InvariantBreach";
    case TC_ERR_NULL_ARGUMENT: return "NullArgument";
    case TC_ERR_OUT_OF_MEMORY: return "OutOfMemory";
    case TC_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* tc_last_error_message(void) { return last_error.message.c_str(); }

int64_t tc_last_error_row(void) { return last_error.row; }

double tc_infinity(void) { return std::numeric_limits<double>::infinity(); }

int tc_is_infinity(double value) { return std::isinf(value) && value > 0 ? 1 : 0; }

tc_status tc_measure_kind_from_name(const char* name, tc_measure_kind* out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  const auto kind = truecal::parse_measure_kind(name);
  if (!kind) return fail(TC_ERR_INVALID_ARGUMENT, std::string("unknown measure \"") + name + "\"");
  *out = static_cast<tc_measure_kind>(static_cast<int>(*kind));
  return TC_OK;
}

const char* tc_measure_kind_name(tc_measure_kind kind) {
  try {
    return truecal::to_string(to_core(kind)).data();
  } catch (...) {
    return "unknown";
  }
}

tc_status tc_aggregation_from_name(const char* name, tc_aggregation* out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  const auto agg = truecal::parse_aggregation(name);
  if (!agg) return fail(TC_ERR_INVALID_ARGUMENT, std::string("unknown aggregation \"") + name + "\"");
  *out = *agg == truecal::Aggregation::Classwise ? TC_AGG_CLASSWISE : TC_AGG_CONFIDENCE;
  return TC_OK;
}

const char* tc_aggregation_name(tc_aggregation agg) {
  try {
    return truecal::to_string(to_core(agg)).data();
  } catch (...) {
    return "unknown";
  }
}

tc_status tc_loss_kind_from_name(const char* name, tc_loss_kind* out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  const auto kind = truecal::parse_loss_kind(name);
  if (!kind || *kind == truecal::LossKind::Induced) {
    return fail(TC_ERR_INVALID_ARGUMENT, std::string("unknown loss \"") + name + "\"");
  }
  switch (*kind) {
    case truecal::LossKind::Log: *out = TC_LOSS_LOG; break;
    case truecal::LossKind::Brier: *out = TC_LOSS_BRIER; break;
    case truecal::LossKind::Classification: *out = TC_LOSS_CLASSIFICATION; break;
    default: *out = TC_LOSS_SPHERICAL; break;
  }
  return TC_OK;
}

const char* tc_loss_kind_name(tc_loss_kind kind) {
  try {
    return truecal::to_string(to_core(kind)).data();
  } catch (...) {
    return "unknown";
  }
}

tc_status tc_dataset_create(const double* probs, const int64_t* labels, size_t n, size_t k, tc_label_base base,
                            tc_dataset** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (n > 0 && (!probs || !labels)) return null_argument("probs/labels");
  if (base != TC_LABELS_ZERO_BASED && base != TC_LABELS_ONE_BASED) {
    return fail(TC_ERR_INVALID_ARGUMENT, "unknown label base");
  }
  return guarded([&] {
    if (k != 0 && n > std::numeric_limits<size_t>::max() / k) {
      throw truecal::Error(truecal::ErrorCode::InvalidArgument, "n * k overflows");
    }
    std::vector<long long> label_copy(labels, labels + n);
    auto ds = truecal::LabeledDataset::from_flat(
        std::span<const double>(probs, n * k), label_copy, k,
        base == TC_LABELS_ONE_BASED ? truecal::LabelBase::One : truecal::LabelBase::Zero);
    *out = new tc_dataset{std::move(ds)};
  });
}

void tc_dataset_destroy(tc_dataset* ds) { delete ds; }

size_t tc_dataset_size(const tc_dataset* ds) { return ds ? ds->data.size() : 0; }

size_t tc_dataset_classes(const tc_dataset* ds) { return ds ? ds->data.classes() : 0; }

tc_status tc_measure_compute(const tc_dataset* ds, tc_measure_kind kind, tc_aggregation agg, size_t bins,
                             tc_result** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!ds) return null_argument("ds");
  return guarded([&] { *out = new tc_result{truecal::evaluate(make_spec(kind, agg, bins), ds->data)}; });
}

tc_status tc_measure_value(const tc_dataset* ds, tc_measure_kind kind, tc_aggregation agg, size_t bins,
                           double* out) {
  if (!ds) return null_argument("ds");
  if (!out) return null_argument("out");
  return guarded([&] { *out = truecal::measure_value(make_spec(kind, agg, bins), ds->data); });
}

tc_status tc_measure_sweep(const tc_dataset* ds, tc_measure_kind kind, tc_aggregation agg, const size_t* bins,
                           size_t count, double* out_values) {
  if (!ds) return null_argument("ds");
  if (count > 0 && (!bins || !out_values)) return null_argument("bins/out_values");
  return guarded([&] {
    const auto values =
        truecal::sweep_values(to_core(kind), to_core(agg), ds->data, std::span<const size_t>(bins, count));
    std::copy(values.begin(), values.end(), out_values);
  });
}

double tc_result_value(const tc_result* result) {
  return result ? result->data.value : std::numeric_limits<double>::quiet_NaN();
}

size_t tc_result_reduction_count(const tc_result* result) { return result ? result->data.per_class.size() : 0; }

double tc_result_reduction_value(const tc_result* result, size_t reduction) {
  if (!result || reduction >= result->data.per_class.size()) return std::numeric_limits<double>::quiet_NaN();
  return result->data.per_class[reduction].value;
}

size_t tc_result_bin_count(const tc_result* result, size_t reduction) {
  if (!result || reduction >= result->data.per_class.size()) return 0;
  return result->data.per_class[reduction].per_bin.size();
}

tc_status tc_result_bin(const tc_result* result, size_t reduction, size_t bin, tc_bin_summary* out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("out");
  if (reduction >= result->data.per_class.size()) return fail(TC_ERR_INVALID_ARGUMENT, "reduction out of range");
  const auto& bins = result->data.per_class[reduction].per_bin;
  if (bin >= bins.size()) return fail(TC_ERR_INVALID_ARGUMENT, "bin out of range");
  const auto& b = bins[bin];
  *out = tc_bin_summary{b.size, b.mean_prediction, b.mean_outcome, b.residual_sum};
  return TC_OK;
}

void tc_result_destroy(tc_result* result) { delete result; }

tc_status tc_loss_mean(const tc_dataset* ds, tc_loss_kind kind, double* out) {
  if (!ds) return null_argument("ds");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto loss = truecal::LossId::named(to_core(kind));
    truecal::CompensatedSum total;
    bool infinite = false;
    for (size_t i = 0; i < ds->data.size(); ++i) {
      const double v = truecal::loss_value(loss, ds->data.prediction(i), ds->data.label(i));
      if (std::isinf(v)) infinite = true;
      else total.add(v);
    }
    *out = infinite ? tc_infinity() : total.value() / static_cast<double>(ds->data.size());
  });
}

tc_status tc_temperature_fit(const double* scores, const int64_t* labels, size_t n, size_t k, tc_label_base base,
                             tc_score_mode mode, double tolerance, tc_temperature_result* out) {
  if (!out) return null_argument("out");
  if (n > 0 && (!scores || !labels)) return null_argument("scores/labels");
  return guarded([&] {
    if (n == 0) throw truecal::Error(truecal::ErrorCode::EmptyDataset, "no rows");
    if (k < 2) throw truecal::Error(truecal::ErrorCode::DimensionTooSmall, "need at least 2 classes");
    const auto y = zero_based_labels(labels, n, k, base);
    const auto logits = truecal::scores_to_logits(std::span<const double>(scores, n * k), k, to_core(mode));
    const auto fit = truecal::fit_temperature(logits, y, k, tolerance);
    *out = tc_temperature_result{fit.temperature, fit.loss, fit.loss_at_one, fit.iterations};
  });
}

tc_status tc_temperature_apply(const double* scores, size_t n, size_t k, tc_score_mode mode, double temperature,
                               double* out_probs) {
  if (n > 0 && (!scores || !out_probs)) return null_argument("scores/out_probs");
  return guarded([&] {
    if (n == 0) throw truecal::Error(truecal::ErrorCode::EmptyDataset, "no rows");
    const auto logits = truecal::scores_to_logits(std::span<const double>(scores, n * k), k, to_core(mode));
    const auto probs = truecal::apply_temperature(logits, k, temperature);
    std::copy(probs.begin(), probs.end(), out_probs);
  });
}

tc_status tc_run_experiment(const char* config_json, char** out_json) {
  if (!config_json) return null_argument("config_json");
  if (!out_json) return null_argument("out_json");
  *out_json = nullptr;
  return guarded([&] {
    const auto text = truecal::run_experiment(config_json);
    auto* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out_json = buffer;
  });
}

void tc_string_free(char* text) { delete[] text; }

}  // extern "C"
