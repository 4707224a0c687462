#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "binning.hpp"
#include "domain.hpp"

namespace truecal {

enum class MeasureKind { RawEce, L1Qece, L2Qece, L1Fixed, L2Fixed };

std::string_view to_string(MeasureKind kind) noexcept;
std::optional<MeasureKind> parse_measure_kind(std::string_view name) noexcept;

bool is_binned(MeasureKind kind) noexcept;
bool is_squared(MeasureKind kind) noexcept;
std::optional<BinningScheme> binning_of(MeasureKind kind) noexcept;

/// A binary calibration measure together with its bin count (ignored for
/// raw ECE).
struct BinaryMeasure {
  MeasureKind kind = MeasureKind::L2Qece;
  std::size_t bins = 1;

  void validate() const;
  friend bool operator==(const BinaryMeasure&, const BinaryMeasure&) = default;
};

/// Per-bin statistics. For an empty bin all fields are zero.
struct BinSummary {
  std::size_t size = 0;
  double mean_prediction = 0.0;
  double mean_outcome = 0.0;
  double residual_sum = 0.0;  // sum over the bin of (p_i - y_i)
};

struct MeasureResult {
  double value = 0.0;
  MeasureKind kind = MeasureKind::L2Qece;
  std::size_t m = 0;  // bins used; number of exact-value groups for raw ECE
  std::vector<BinSummary> per_bin;
};

/// Recomputes a measure value from per-bin residual sums: (1/n) sum |s_j| for
/// the l1 family and raw ECE, (1/n^2) sum s_j^2 for the l2 family.
double value_from_bins(MeasureKind kind, std::span<const BinSummary> per_bin, std::size_t n) noexcept;

MeasureResult raw_ece(const BinaryDataset& ds);
MeasureResult l1_qece(const BinaryDataset& ds, std::size_t m);
MeasureResult l2_qece(const BinaryDataset& ds, std::size_t m);
MeasureResult l1_fixed_ece(const BinaryDataset& ds, std::size_t m);
MeasureResult l2_fixed_ece(const BinaryDataset& ds, std::size_t m);

MeasureResult evaluate(const BinaryMeasure& measure, const BinaryDataset& ds);

/// Same as evaluate() with a precomputed sort, so bin sweeps sort once.
MeasureResult evaluate(const BinaryMeasure& measure, const BinaryDataset& ds, const SortedView& view);

/// Measure value only, skipping per-bin summaries. Bit-identical to
/// evaluate(...).value; used in hot Monte Carlo loops.
double measure_value(const BinaryMeasure& measure, const BinaryDataset& ds, const SortedView& view);

}  // namespace truecal
