#include "multiclass.hpp"

#include "numeric.hpp"

namespace truecal {

std::string_view to_string(Aggregation agg) noexcept {
  return agg == Aggregation::Classwise ? "classwise" : "confidence";
}

std::optional<Aggregation> parse_aggregation(std::string_view name) noexcept {
  if (name == "classwise") return Aggregation::Classwise;
  if (name == "confidence" || name == "conf") return Aggregation::Confidence;
  return std::nullopt;
}

namespace {

struct Reduction {
  BinaryDataset data;
  SortedView view;
};

std::vector<Reduction> reductions(Aggregation agg, const LabeledDataset& ds) {
  std::vector<Reduction> out;
  if (agg == Aggregation::Confidence) {
    auto data = confidence_reduction(ds);
    auto view = sort_by_prediction(data);
    out.push_back({std::move(data), std::move(view)});
    return out;
  }
  out.reserve(ds.classes());
  for (std::size_t r = 0; r < ds.classes(); ++r) {
    auto data = binary_reduction_index(ds, r);
    auto view = sort_by_prediction(data);
    out.push_back({std::move(data), std::move(view)});
  }
  return out;
}

double mean_in_order(std::span<const double> xs) {
  return compensated_sum(xs) / static_cast<double>(xs.size());
}

MulticlassResult assemble(const MeasureSpec& spec, std::vector<MeasureResult> per_class) {
  MulticlassResult out;
  out.spec = spec;
  std::vector<double> values;
  values.reserve(per_class.size());
  for (const auto& r : per_class) values.push_back(r.value);
  out.value = mean_in_order(values);
  out.per_class = std::move(per_class);
  return out;
}

}  // namespace

std::vector<MulticlassResult> evaluate_sweep(MeasureKind kind, Aggregation agg, const LabeledDataset& ds,
                                             std::span<const std::size_t> bins) {
  const auto reds = reductions(agg, ds);
  std::vector<MulticlassResult> out;
  out.reserve(bins.size());
  for (auto m : bins) {
    const MeasureSpec spec{{kind, m}, agg};
    std::vector<MeasureResult> per_class;
    per_class.reserve(reds.size());
    for (const auto& red : reds) per_class.push_back(evaluate(spec.measure, red.data, red.view));
    out.push_back(assemble(spec, std::move(per_class)));
  }
  return out;
}

MulticlassResult evaluate(const MeasureSpec& spec, const LabeledDataset& ds) {
  const std::size_t m[] = {spec.measure.bins};
  return std::move(evaluate_sweep(spec.measure.kind, spec.aggregation, ds, m).front());
}

MulticlassResult classwise(const BinaryMeasure& measure, const LabeledDataset& ds) {
  return evaluate({measure, Aggregation::Classwise}, ds);
}

MulticlassResult confidence(const BinaryMeasure& measure, const LabeledDataset& ds) {
  return evaluate({measure, Aggregation::Confidence}, ds);
}

std::vector<double> sweep_values(MeasureKind kind, Aggregation agg, const LabeledDataset& ds,
                                 std::span<const std::size_t> bins) {
  const auto reds = reductions(agg, ds);
  std::vector<double> out;
  out.reserve(bins.size());
  std::vector<double> per_class(reds.size());
  for (auto m : bins) {
    const BinaryMeasure measure{kind, m};
    for (std::size_t c = 0; c < reds.size(); ++c) {
      per_class[c] = measure_value(measure, reds[c].data, reds[c].view);
    }
    out.push_back(mean_in_order(per_class));
  }
  return out;
}

double measure_value(const MeasureSpec& spec, const LabeledDataset& ds) {
  const std::size_t m[] = {spec.measure.bins};
  return sweep_values(spec.measure.kind, spec.aggregation, ds, m).front();
}

}  // namespace truecal
