#include "report.hpp"

#include <cmath>
#include <memory>

namespace truecal::cli {

void check(tc_status status) {
  if (status != TC_OK) throw ApiError(status, tc_last_error_message(), tc_last_error_row());
}

Dataset::Dataset(const ScoreTable& table, tc_label_base base) {
  check(tc_dataset_create(table.scores.data(), table.labels.data(), table.rows(), table.k, base, &handle_));
}

tc_measure_kind measure_kind(const std::string& name, bool fixed_binning) {
  tc_measure_kind kind;
  check(tc_measure_kind_from_name(name.c_str(), &kind));
  if (fixed_binning && kind == TC_MEASURE_L1_QECE) return TC_MEASURE_L1_FIXED;
  if (fixed_binning && kind == TC_MEASURE_L2_QECE) return TC_MEASURE_L2_FIXED;
  return kind;
}

tc_aggregation aggregation(const std::string& name) {
  tc_aggregation agg;
  check(tc_aggregation_from_name(name.c_str(), &agg));
  return agg;
}

json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "NaN";
  return x > 0 ? "Infinity" : "-Infinity";
}

namespace {

const char* binning_name(tc_measure_kind kind) {
  switch (kind) {
    case TC_MEASURE_RAW_ECE: return "exact-value";
    case TC_MEASURE_L1_FIXED:
    case TC_MEASURE_L2_FIXED: return "fixed";
    default: return "quantile";
  }
}

bool squared(tc_measure_kind kind) { return kind == TC_MEASURE_L2_QECE || kind == TC_MEASURE_L2_FIXED; }

using ResultPtr = std::unique_ptr<tc_result, decltype(&tc_result_destroy)>;

json measure_json(const Dataset& ds, const MeasureRequest& req) {
  tc_result* raw = nullptr;
  check(tc_measure_compute(ds.get(), req.kind, req.aggregation, req.bins, &raw));
  ResultPtr result(raw, &tc_result_destroy);

  const double n = static_cast<double>(ds.size());
  json reductions = json::array();
  double recomputed_total = 0.0;
  const std::size_t count = tc_result_reduction_count(result.get());
  for (std::size_t r = 0; r < count; ++r) {
    json bins = json::array();
    double recomputed = 0.0;
    for (std::size_t j = 0; j < tc_result_bin_count(result.get(), r); ++j) {
      tc_bin_summary b;
      check(tc_result_bin(result.get(), r, j, &b));
      recomputed += squared(req.kind) ? b.residual_sum * b.residual_sum : std::abs(b.residual_sum);
      bins.push_back(json{{"size", b.size},
                          {"mean_prediction", real(b.mean_prediction)},
                          {"mean_outcome", real(b.mean_outcome)},
                          {"residual_sum", real(b.residual_sum)}});
    }
    recomputed /= squared(req.kind) ? n * n : n;
    const double value = tc_result_reduction_value(result.get(), r);
    if (std::abs(recomputed - value) > 1e-12 * std::max(1.0, std::abs(value))) {
      throw InvariantError("reduction value is not recomputable from its bins");
    }
    recomputed_total += recomputed;
    json entry = json::object();
    if (req.aggregation == TC_AGG_CLASSWISE) entry["class"] = r + 1;
    entry["value"] = real(value);
    entry["per_bin"] = std::move(bins);
    reductions.push_back(std::move(entry));
  }
  const double value = tc_result_value(result.get());
  if (std::abs(recomputed_total / static_cast<double>(count) - value) > 1e-12 * std::max(1.0, std::abs(value))) {
    throw InvariantError("measure value is not recomputable from its bins");
  }

  json out{{"id", tc_measure_kind_name(req.kind)},
           {"aggregation", tc_aggregation_name(req.aggregation)},
           {"m", req.kind == TC_MEASURE_RAW_ECE ? json(nullptr) : json(req.bins)},
           {"binning", binning_name(req.kind)},
           {"value", real(value)}};
  if (req.aggregation == TC_AGG_CLASSWISE) {
    out["per_class"] = std::move(reductions);
  } else {
    out["per_bin"] = std::move(reductions[0]["per_bin"]);
  }
  return out;
}

}  // namespace

json metrics_report(const Dataset& ds, std::span<const MeasureRequest> requests, const std::string& digest,
                    std::uint64_t seed, tc_label_base base) {
  json measures = json::array();
  for (const auto& req : requests) measures.push_back(measure_json(ds, req));

  json losses = json::object();
  for (auto kind : {TC_LOSS_LOG, TC_LOSS_BRIER, TC_LOSS_SPHERICAL, TC_LOSS_CLASSIFICATION}) {
    double v = 0.0;
    check(tc_loss_mean(ds.get(), kind, &v));
    losses[tc_loss_kind_name(kind)] = real(v);
  }
  return json{{"dataset", json{{"digest", digest}, {"n", ds.size()}, {"k", ds.classes()}}},
              {"measures", std::move(measures)},
              {"losses", std::move(losses)},
              {"meta", json{{"version", tc_version()},
                            {"seed", seed},
                            {"label_base", base == TC_LABELS_ONE_BASED ? 1 : 0}}}};
}

std::vector<std::vector<double>> sweep_table(const Dataset& ds, std::span<const SweepColumn> columns,
                                             std::span<const std::size_t> bins) {
  std::vector<std::vector<double>> table(bins.size(), std::vector<double>(columns.size()));
  std::vector<double> values(bins.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    check(tc_measure_sweep(ds.get(), columns[c].kind, columns[c].aggregation, bins.data(), bins.size(),
                           values.data()));
    for (std::size_t j = 0; j < bins.size(); ++j) table[j][c] = values[j];
  }
  return table;
}

std::string sweep_csv(std::span<const SweepColumn> columns, std::span<const std::size_t> bins,
                      const std::vector<std::vector<double>>& table) {
  std::string out = "m";
  for (const auto& c : columns) {
    out += ',';
    out += tc_measure_kind_name(c.kind);
    out += ':';
    out += tc_aggregation_name(c.aggregation);
  }
  out += '\n';
  for (std::size_t j = 0; j < bins.size(); ++j) {
    out += std::to_string(bins[j]);
    for (double v : table[j]) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace truecal::cli
