#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv_io.hpp"
#include "truecal.h"

namespace truecal::cli {

using json = nlohmann::ordered_json;

// A failing C API call, with the library's message and row (-1 if none).
class ApiError : public std::runtime_error {
 public:
  ApiError(tc_status status, const std::string& what, std::int64_t row)
      : std::runtime_error(what), status_(status), row_(row) {}
  tc_status status() const noexcept { return status_; }
  std::int64_t row() const noexcept { return row_; }

 private:
  tc_status status_;
  std::int64_t row_;
};

void check(tc_status status);

class Dataset {
 public:
  Dataset(const ScoreTable& table, tc_label_base base);
  ~Dataset() { tc_dataset_destroy(handle_); }
  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;

  const tc_dataset* get() const noexcept { return handle_; }
  std::size_t size() const { return tc_dataset_size(handle_); }
  std::size_t classes() const { return tc_dataset_classes(handle_); }

 private:
  tc_dataset* handle_ = nullptr;
};

struct MeasureRequest {
  tc_measure_kind kind;
  tc_aggregation aggregation;
  std::size_t bins;
};

/// Parses a measure name, switching quantile kinds to their fixed-width
/// counterparts when `fixed_binning` is set.
tc_measure_kind measure_kind(const std::string& name, bool fixed_binning);
tc_aggregation aggregation(const std::string& name);

/// Value fields recomputed from per-bin residual sums disagree with the
/// reported values.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json real(double x);

/// Full metrics report: requested measures with per-bin data plus the four
/// named losses. Checks that every value is recomputable from its bins.
json metrics_report(const Dataset& ds, std::span<const MeasureRequest> requests, const std::string& digest,
                    std::uint64_t seed, tc_label_base base);

struct SweepColumn {
  tc_measure_kind kind;
  tc_aggregation aggregation;
};

/// One row per bin count, one column per (measure, aggregation).
std::vector<std::vector<double>> sweep_table(const Dataset& ds, std::span<const SweepColumn> columns,
                                             std::span<const std::size_t> bins);

std::string sweep_csv(std::span<const SweepColumn> columns, std::span<const std::size_t> bins,
                      const std::vector<std::vector<double>>& table);

}  // namespace truecal::cli
