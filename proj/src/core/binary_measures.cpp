#include "binary_measures.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

#include "error.hpp"
#include "numeric.hpp"

namespace truecal {

std::string_view to_string(MeasureKind kind) noexcept {
  switch (kind) {
    case MeasureKind::RawEce: return "raw_ece";
    case MeasureKind::L1Qece: return "l1_qece";
    case MeasureKind::L2Qece: return "l2_qece";
    case MeasureKind::L1Fixed: return "l1_fixed";
    case MeasureKind::L2Fixed: return "l2_fixed";
  }
  return "unknown";
}

std::optional<MeasureKind> parse_measure_kind(std::string_view name) noexcept {
  for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::L1Fixed,
                    MeasureKind::L2Fixed}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

bool is_binned(MeasureKind kind) noexcept { return kind != MeasureKind::RawEce; }

bool is_squared(MeasureKind kind) noexcept {
  return kind == MeasureKind::L2Qece || kind == MeasureKind::L2Fixed;
}

std::optional<BinningScheme> binning_of(MeasureKind kind) noexcept {
  switch (kind) {
    case MeasureKind::L1Qece:
    case MeasureKind::L2Qece: return BinningScheme::Quantile;
    case MeasureKind::L1Fixed:
    case MeasureKind::L2Fixed: return BinningScheme::Fixed;
    case MeasureKind::RawEce: break;
  }
  return std::nullopt;
}

void BinaryMeasure::validate() const {
  if (is_binned(kind) && bins == 0) throw Error(ErrorCode::InvalidArgument, "bin count m must be at least 1");
}

double value_from_bins(MeasureKind kind, std::span<const BinSummary> per_bin, std::size_t n) noexcept {
  CompensatedSum acc;
  const double dn = static_cast<double>(n);
  if (is_squared(kind)) {
    for (const auto& bin : per_bin) acc.add(bin.residual_sum * bin.residual_sum);
    return acc.value() / (dn * dn);
  }
  for (const auto& bin : per_bin) acc.add(std::abs(bin.residual_sum));
  return acc.value() / dn;
}

namespace {

BinSummary summarize(const BinaryDataset& ds, std::span<const std::size_t> members) {
  BinSummary out;
  out.size = members.size();
  if (members.empty()) return out;
  CompensatedSum sp, sy, sr;
  for (auto i : members) {
    const double p = ds.p(i);
    const double y = ds.y(i);
    sp.add(p);
    sy.add(y);
    sr.add(p - y);
  }
  const double size = static_cast<double>(members.size());
  out.mean_prediction = sp.value() / size;
  out.mean_outcome = sy.value() / size;
  out.residual_sum = sr.value();
  return out;
}

MeasureResult from_assignment(MeasureKind kind, const BinaryDataset& ds, const BinAssignment& bins) {
  MeasureResult out;
  out.kind = kind;
  out.m = bins.m;
  out.per_bin.reserve(bins.bins.size());
  for (const auto& bin : bins.bins) out.per_bin.push_back(summarize(ds, bin));
  out.value = value_from_bins(kind, out.per_bin, ds.size());
  return out;
}

MeasureResult raw_ece_sorted(const BinaryDataset& ds, const SortedView& view) {
  // Contiguous runs of bit-identical predictions after the stable sort.
  BinAssignment groups;
  groups.scheme = BinningScheme::Fixed;
  const auto& order = view.order;
  for (std::size_t start = 0; start < order.size();) {
    const auto key = std::bit_cast<std::uint64_t>(ds.p(order[start]));
    std::size_t end = start + 1;
    while (end < order.size() && std::bit_cast<std::uint64_t>(ds.p(order[end])) == key) ++end;
    groups.bins.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    start = end;
  }
  groups.m = groups.bins.size();
  return from_assignment(MeasureKind::RawEce, ds, groups);
}

}  // namespace

MeasureResult evaluate(const BinaryMeasure& measure, const BinaryDataset& ds, const SortedView& view) {
  measure.validate();
  if (view.order.size() != ds.size()) throw Error(ErrorCode::DimensionMismatch, "sorted view does not match dataset");
  switch (measure.kind) {
    case MeasureKind::RawEce: return raw_ece_sorted(ds, view);
    case MeasureKind::L1Qece:
    case MeasureKind::L2Qece: return from_assignment(measure.kind, ds, quantile_bins(view, measure.bins));
    case MeasureKind::L1Fixed:
    case MeasureKind::L2Fixed: return from_assignment(measure.kind, ds, fixed_bins(ds, view, measure.bins));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure kind");
}

MeasureResult evaluate(const BinaryMeasure& measure, const BinaryDataset& ds) {
  return evaluate(measure, ds, sort_by_prediction(ds));
}

MeasureResult raw_ece(const BinaryDataset& ds) { return evaluate({MeasureKind::RawEce, 1}, ds); }
MeasureResult l1_qece(const BinaryDataset& ds, std::size_t m) { return evaluate({MeasureKind::L1Qece, m}, ds); }
MeasureResult l2_qece(const BinaryDataset& ds, std::size_t m) { return evaluate({MeasureKind::L2Qece, m}, ds); }
MeasureResult l1_fixed_ece(const BinaryDataset& ds, std::size_t m) { return evaluate({MeasureKind::L1Fixed, m}, ds); }
MeasureResult l2_fixed_ece(const BinaryDataset& ds, std::size_t m) { return evaluate({MeasureKind::L2Fixed, m}, ds); }

double measure_value(const BinaryMeasure& measure, const BinaryDataset& ds, const SortedView& view) {
  if (binning_of(measure.kind) != BinningScheme::Quantile) return evaluate(measure, ds, view).value;
  measure.validate();
  const auto bounds = quantile_bounds(ds.size(), measure.bins);
  const bool squared = is_squared(measure.kind);
  CompensatedSum total;
  for (std::size_t j = 0; j < measure.bins; ++j) {
    CompensatedSum residual;
    for (std::size_t rank = bounds[j]; rank < bounds[j + 1]; ++rank) {
      const auto i = view.order[rank];
      residual.add(ds.p(i) - static_cast<double>(ds.y(i)));
    }
    const double s = residual.value();
    total.add(squared ? s * s : std::abs(s));
  }
  const double dn = static_cast<double>(ds.size());
  return squared ? total.value() / (dn * dn) : total.value() / dn;
}

}  // namespace truecal
