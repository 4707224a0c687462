#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "binary_measures.hpp"
#include "rng.hpp"
#include "test_util.hpp"

namespace truecal {
namespace {

using testing::binary;

// Straightforward reference: sort (p, index) pairs, slice by the rational
// quantile rule, sum residuals in long double.
long double reference_qece(const std::vector<double>& p, const std::vector<int>& y, std::size_t m, bool squared) {
  const std::size_t n = p.size();
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < n; ++i) order.emplace_back(p[i], i);
  std::stable_sort(order.begin(), order.end(), [](auto a, auto b) { return a.first < b.first; });
  long double total = 0;
  for (std::size_t j = 1; j <= m; ++j) {
    long double s = 0;
    for (std::size_t rank = 1; rank <= n; ++rank) {
      if ((j - 1) * n < rank * m && rank * m <= j * n) {
        const auto i = order[rank - 1].second;
        s += static_cast<long double>(p[i]) - y[i];
      }
    }
    total += squared ? s * s : std::fabs(s);
  }
  const long double nn = static_cast<long double>(n);
  return squared ? total / (nn * nn) : total / nn;
}

long double reference_raw(const std::vector<double>& p, const std::vector<int>& y) {
  std::map<double, std::pair<long double, std::size_t>> groups;
  for (std::size_t i = 0; i < p.size(); ++i) {
    groups[p[i]].first += y[i];
    groups[p[i]].second += 1;
  }
  long double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& g = groups[p[i]];
    total += std::fabs(static_cast<long double>(p[i]) - g.first / static_cast<long double>(g.second));
  }
  return total / static_cast<long double>(p.size());
}

BinaryDataset make(const std::vector<double>& p, const std::vector<int>& y) {
  std::vector<std::uint8_t> bits(y.begin(), y.end());
  return BinaryDataset(p, bits);
}

TEST(RawEce, Examples) {
  EXPECT_EQ(raw_ece(binary({{0.5, 1}, {0.5, 0}})).value, 0.0);
  EXPECT_NEAR(raw_ece(binary({{0.3, 1}})).value, 0.7, 1e-15);
  EXPECT_NEAR(raw_ece(binary({{0.2, 0}, {0.2, 0}, {0.8, 1}})).value, 0.2, 1e-15);
}

TEST(RawEce, GroupsByExactValue) {
  const double a = 0.3;
  const double b = std::nextafter(0.3, 1.0);
  const auto r = raw_ece(binary({{a, 1}, {b, 0}}));
  EXPECT_EQ(r.m, 2u);
  EXPECT_NEAR(r.value, (0.7 + b) / 2.0, 1e-15);
}

TEST(L1Qece, Examples) {
  EXPECT_NEAR(l1_qece(binary({{0.3, 0}, {0.5, 1}}), 1).value, 0.1, 1e-15);
  EXPECT_NEAR(l1_qece(binary({{0.3, 0}, {0.5, 1}}), 2).value, 0.4, 1e-15);
  EXPECT_EQ(l1_qece(binary({{1.0, 1}, {0.0, 0}, {1.0, 1}}), 2).value, 0.0);
}

TEST(L2Qece, Examples) {
  EXPECT_EQ(l2_qece(binary({{0.5, 1}, {0.5, 1}}), 1).value, 0.25);
  EXPECT_EQ(l2_qece(binary({{0.5, 1}, {0.5, 0}}), 1).value, 0.0);
}

TEST(FixedEce, Examples) {
  EXPECT_NEAR(l1_fixed_ece(binary({{0.1, 0}, {0.9, 1}}), 2).value, 0.1, 1e-15);
  const auto inside = binary({{0.61, 1}, {0.7, 0}, {0.65, 1}});
  EXPECT_EQ(l1_fixed_ece(inside, 5).value, l1_qece(inside, 1).value);
  const auto low = binary({{0.1, 0}, {0.2, 1}, {0.05, 0}});
  const auto r = l2_fixed_ece(low, 4);
  ASSERT_EQ(r.per_bin.size(), 4u);
  EXPECT_EQ(r.per_bin[0].size, 3u);
  for (std::size_t j = 1; j < 4; ++j) {
    EXPECT_EQ(r.per_bin[j].size, 0u);
    EXPECT_EQ(r.per_bin[j].residual_sum, 0.0);
  }
  EXPECT_NEAR(r.value, std::pow(0.35 - 1.0, 2) / 9.0, 1e-15);
}

TEST(BinaryMeasures, RejectZeroBins) {
  const auto ds = binary({{0.5, 1}});
  EXPECT_TRUE(testing::error_of([&] { l1_qece(ds, 0); }).has_value());
  EXPECT_TRUE(testing::error_of([&] { l2_fixed_ece(ds, 0); }).has_value());
}

TEST(BinaryMeasures, BinSummariesConsistent) {
  CounterRng rng(21, 0);
  std::vector<double> p;
  std::vector<int> y;
  for (int i = 0; i < 37; ++i) {
    p.push_back(rng.uniform());
    y.push_back(rng.bernoulli(p.back()) ? 1 : 0);
  }
  const auto ds = make(p, y);
  for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::L1Fixed,
                    MeasureKind::L2Fixed}) {
    const auto r = evaluate(BinaryMeasure{kind, 6}, ds);
    std::size_t total = 0;
    for (const auto& b : r.per_bin) {
      total += b.size;
      EXPECT_NEAR(b.residual_sum, static_cast<double>(b.size) * (b.mean_prediction - b.mean_outcome), 1e-12);
      EXPECT_LE(std::fabs(b.residual_sum), static_cast<double>(b.size) + 1e-12);
    }
    EXPECT_EQ(total, p.size());
    EXPECT_NEAR(value_from_bins(kind, r.per_bin, p.size()), r.value, 1e-15);
  }
}

// Randomized cases against the reference plus the structural identities.
TEST(BinaryMeasures, FuzzAgainstReference) {
  for (std::uint64_t c = 0; c < 1000; ++c) {
    CounterRng rng(1234, c);
    const std::size_t n = 1 + rng.below(30);
    // Distinct values: a shuffled grid with random offsets.
    std::vector<double> p(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = (static_cast<double>(i) + 0.5 * rng.uniform() + 0.25) / static_cast<double>(n + 1);
      y[i] = rng.bernoulli(p[i]) ? 1 : 0;
    }
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    const auto ds = make(p, y);
    const std::size_t m = 1 + rng.below(n + 3);

    const double l1 = l1_qece(ds, m).value;
    const double l2 = l2_qece(ds, m).value;
    ASSERT_NEAR(l1, static_cast<double>(reference_qece(p, y, m, false)), 1e-13) << "case " << c;
    ASSERT_NEAR(l2, static_cast<double>(reference_qece(p, y, m, true)), 1e-13) << "case " << c;
    ASSERT_NEAR(raw_ece(ds).value, static_cast<double>(reference_raw(p, y)), 1e-13) << "case " << c;
    EXPECT_GE(l1, 0.0);
    EXPECT_LE(l1, 1.0);
    EXPECT_LE(l2, l1 + 1e-15);

    // m = 1: |mean(p) - mean(y)|; m = n: sum of squared residuals over n^2.
    long double sp = 0, sy = 0, sq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sp += p[i];
      sy += y[i];
      sq += (p[i] - y[i]) * static_cast<long double>(p[i] - y[i]);
    }
    const long double nn = static_cast<long double>(n);
    EXPECT_NEAR(l1_qece(ds, 1).value, static_cast<double>(std::fabs(sp / nn - sy / nn)), 1e-13);
    EXPECT_NEAR(l2_qece(ds, n).value, static_cast<double>(sq / (nn * nn)), 1e-13);

    // Permutation invariance on distinct predictions.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<double> pp(n);
    std::vector<int> yy(n);
    for (std::size_t i = 0; i < n; ++i) {
      pp[i] = p[perm[i]];
      yy[i] = y[perm[i]];
    }
    const auto shuffled = make(pp, yy);
    for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::L1Fixed,
                      MeasureKind::L2Fixed}) {
      EXPECT_EQ(evaluate(BinaryMeasure{kind, m}, ds).value, evaluate(BinaryMeasure{kind, m}, shuffled).value);
    }
  }
}

TEST(RawEce, EqualsGroupBinnedL1WhenGroupsContiguous) {
  for (std::uint64_t c = 0; c < 200; ++c) {
    CounterRng rng(77, c);
    const std::size_t n = 2 + rng.below(25);
    const std::vector<double> levels{0.1, 0.35, 0.6, 0.85};
    std::vector<double> p(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = levels[rng.below(levels.size())];
      y[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    // Each exact-value group as one bin: (1/n) sum_groups |sum (p - y)|.
    std::map<double, long double> residual;
    for (std::size_t i = 0; i < n; ++i) residual[p[i]] += p[i] - y[i];
    long double total = 0;
    for (const auto& [v, s] : residual) total += std::fabs(s);
    EXPECT_NEAR(raw_ece(make(p, y)).value, static_cast<double>(total / static_cast<long double>(n)), 1e-13);
  }
}

TEST(BinaryMeasures, MeasureValueMatchesEvaluate) {
  CounterRng rng(99, 0);
  std::vector<double> p;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 64; ++i) {
    p.push_back(std::floor(rng.uniform() * 8.0) / 8.0);
    y.push_back(rng.bernoulli(0.4) ? 1 : 0);
  }
  const BinaryDataset ds(p, y);
  const auto view = sort_by_prediction(ds);
  for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::L1Fixed,
                    MeasureKind::L2Fixed}) {
    for (std::size_t m : {1u, 3u, 10u, 64u, 100u}) {
      const BinaryMeasure bm{kind, m};
      EXPECT_EQ(measure_value(bm, ds, view), evaluate(bm, ds).value);
    }
  }
}

TEST(MeasureKind, NamesRoundTrip) {
  for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::L1Fixed,
                    MeasureKind::L2Fixed}) {
    EXPECT_EQ(parse_measure_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_measure_kind("l3_qece").has_value());
}

}  // namespace
}  // namespace truecal
