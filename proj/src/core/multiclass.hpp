#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "binary_measures.hpp"
#include "domain.hpp"

namespace truecal {

enum class Aggregation { Classwise, Confidence };

std::string_view to_string(Aggregation agg) noexcept;
std::optional<Aggregation> parse_aggregation(std::string_view name) noexcept;

/// A binary measure lifted to k classes.
struct MeasureSpec {
  BinaryMeasure measure;
  Aggregation aggregation = Aggregation::Classwise;
};

struct MulticlassResult {
  double value = 0.0;
  MeasureSpec spec;
  // One entry per class for classwise (class order), a single entry for
  // confidence.
  std::vector<MeasureResult> per_class;
};

/// (1/k) sum_r measure(binary_reduction(ds, r)); each class sorted on its own.
MulticlassResult classwise(const BinaryMeasure& measure, const LabeledDataset& ds);

/// measure(confidence_reduction(ds)).
MulticlassResult confidence(const BinaryMeasure& measure, const LabeledDataset& ds);

MulticlassResult evaluate(const MeasureSpec& spec, const LabeledDataset& ds);

/// One result per entry of `bins`, sorting every reduction once.
std::vector<MulticlassResult> evaluate_sweep(MeasureKind kind, Aggregation agg, const LabeledDataset& ds,
                                             std::span<const std::size_t> bins);

/// Values only; bit-identical to evaluate(...).value.
double measure_value(const MeasureSpec& spec, const LabeledDataset& ds);
std::vector<double> sweep_values(MeasureKind kind, Aggregation agg, const LabeledDataset& ds,
                                 std::span<const std::size_t> bins);

}  // namespace truecal
