#include "binning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace truecal {

namespace {

void require_positive_bins(std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "bin count m must be at least 1");
}

// floor(j * n / m) without overflow for any 64-bit n, m.
std::size_t floor_ratio(std::size_t j, std::size_t n, std::size_t m) noexcept {
  __extension__ using wide_t = unsigned __int128;
  return static_cast<std::size_t>(static_cast<wide_t>(j) * n / m);
}

}  // namespace

SortedView sort_by_prediction(const BinaryDataset& ds) {
  SortedView view;
  view.order.resize(ds.size());
  std::iota(view.order.begin(), view.order.end(), std::size_t{0});
  const auto p = ds.predictions();
  std::stable_sort(view.order.begin(), view.order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return view;
}

std::vector<std::size_t> quantile_bounds(std::size_t n, std::size_t m) {
  require_positive_bins(m);
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "quantile binning needs n >= 1");
  std::vector<std::size_t> bounds(m + 1);
  for (std::size_t j = 0; j <= m; ++j) bounds[j] = floor_ratio(j, n, m);
  return bounds;
}

BinAssignment quantile_bins(std::size_t n, std::size_t m) {
  const auto bounds = quantile_bounds(n, m);
  BinAssignment out;
  out.scheme = BinningScheme::Quantile;
  out.m = m;
  out.bins.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto& bin = out.bins[j];
    bin.resize(bounds[j + 1] - bounds[j]);
    std::iota(bin.begin(), bin.end(), bounds[j]);
  }
  return out;
}

BinAssignment quantile_bins(const SortedView& view, std::size_t m) {
  auto out = quantile_bins(view.order.size(), m);
  for (auto& bin : out.bins) {
    for (auto& rank : bin) rank = view.order[rank];
  }
  return out;
}

std::size_t fixed_bin_of(double p, std::size_t m) noexcept {
  const double scaled = std::ceil(p * static_cast<double>(m));
  if (!(scaled >= 1.0)) return 0;
  if (scaled >= static_cast<double>(m)) return m - 1;
  return static_cast<std::size_t>(scaled) - 1;
}

BinAssignment fixed_bins(const BinaryDataset& ds, const SortedView& view, std::size_t m) {
  require_positive_bins(m);
  BinAssignment out;
  out.scheme = BinningScheme::Fixed;
  out.m = m;
  out.bins.resize(m);
  for (auto idx : view.order) out.bins[fixed_bin_of(ds.p(idx), m)].push_back(idx);
  return out;
}

BinAssignment fixed_bins(const BinaryDataset& ds, std::size_t m) {
  require_positive_bins(m);
  BinAssignment out;
  out.scheme = BinningScheme::Fixed;
  out.m = m;
  out.bins.resize(m);
  for (std::size_t i = 0; i < ds.size(); ++i) out.bins[fixed_bin_of(ds.p(i), m)].push_back(i);
  return out;
}

}  // namespace truecal
