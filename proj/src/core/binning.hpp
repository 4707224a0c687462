#pragma once

#include <cstddef>
#include <vector>

#include "domain.hpp"

namespace truecal {

enum class BinningScheme { Quantile, Fixed };

/// Rank -> original index. Predictions are nondecreasing along `order`, ties
/// kept in original index order.
struct SortedView {
  std::vector<std::size_t> order;
};

/// A partition of sample indices into m bins. For quantile bins produced by
/// quantile_bins(n, m) the entries are sorted ranks; everything else holds
/// original dataset indices. Within a bin, entries appear in ascending
/// sorted-rank order.
struct BinAssignment {
  BinningScheme scheme = BinningScheme::Quantile;
  std::size_t m = 0;
  std::vector<std::vector<std::size_t>> bins;
};

SortedView sort_by_prediction(const BinaryDataset& ds);

/// Bin j (1-based) holds 0-based ranks i-1 with floor((j-1)n/m) < i <= floor(jn/m),
/// computed in exact integer arithmetic. Empty bins are kept when m > n.
BinAssignment quantile_bins(std::size_t n, std::size_t m);

/// Rank boundaries only: bin j covers ranks [bounds[j], bounds[j+1]).
std::vector<std::size_t> quantile_bounds(std::size_t n, std::size_t m);

/// quantile_bins composed with a sorted view: entries are original indices.
BinAssignment quantile_bins(const SortedView& view, std::size_t m);

/// Bin of a prediction under m equal-width intervals ((j-1)/m, j/m], p = 0 in
/// bin 1. Returned 0-based.
std::size_t fixed_bin_of(double p, std::size_t m) noexcept;

/// Equal-width bins over [0,1]; entries are original indices in sorted-rank
/// order when `view` is supplied, ascending index order otherwise.
BinAssignment fixed_bins(const BinaryDataset& ds, std::size_t m);
BinAssignment fixed_bins(const BinaryDataset& ds, const SortedView& view, std::size_t m);

}  // namespace truecal
