#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "multiclass.hpp"
#include "rng.hpp"
#include "test_util.hpp"

namespace truecal {
namespace {

using testing::labeled;

LabeledDataset random_dataset(CounterRng& rng, std::size_t n, std::size_t k) {
  std::vector<double> probs;
  std::vector<long long> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = rng.dirichlet_flat(k);
    probs.insert(probs.end(), row.begin(), row.end());
    labels.push_back(static_cast<long long>(rng.categorical(row)));
  }
  return LabeledDataset::from_flat(probs, labels, k, LabelBase::Zero);
}

TEST(Classwise, UniformThreeClassExample) {
  const auto ds = labeled({{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1});
  const auto r = classwise(BinaryMeasure{MeasureKind::L1Qece, 1}, ds);
  EXPECT_NEAR(r.value, 4.0 / 9.0, 1e-15);
  ASSERT_EQ(r.per_class.size(), 3u);
}

TEST(Classwise, PerfectOneHotIsZero) {
  const auto ds = labeled({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}, {1, 3, 2});
  for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::L1Fixed,
                    MeasureKind::L2Fixed}) {
    EXPECT_EQ(classwise(BinaryMeasure{kind, 2}, ds).value, 0.0);
    EXPECT_EQ(confidence(BinaryMeasure{kind, 2}, ds).value, 0.0);
  }
}

TEST(Classwise, BinaryComplementSymmetry) {
  for (std::uint64_t c = 0; c < 100; ++c) {
    CounterRng rng(5, c);
    // Reversing the order mirrors the quantile partition only when all bins have equal size.
    const std::size_t m = 1 + rng.below(8);
    const auto ds = random_dataset(rng, m * (1 + rng.below(4)), 2);
    for (auto kind : {MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::RawEce}) {
      const auto r = classwise(BinaryMeasure{kind, m}, ds);
      ASSERT_EQ(r.per_class.size(), 2u);
      EXPECT_NEAR(r.per_class[0].value, r.per_class[1].value, 1e-12);
      EXPECT_NEAR(r.value, evaluate(BinaryMeasure{kind, m}, binary_reduction(ds, 2)).value, 1e-12);
    }
  }
}

TEST(Classwise, UnevenQuantileSplitIsNotComplementSymmetric) {
  // n=5, m=2: class 1 bins ranks {1,2},{3,4,5}; class 2 sees the reverse order and bins {5,4},{3,2,1}.
  const auto ds = labeled({{0.9, 0.1}, {0.8, 0.2}, {0.7, 0.3}, {0.6, 0.4}, {0.5, 0.5}}, {1, 1, 2, 2, 2});
  const auto r = classwise(BinaryMeasure{MeasureKind::L1Qece, 2}, ds);
  // Class 1 bins: {0.5,0.6}/{0,0} and {0.7,0.8,0.9}/{0,1,1}; class 2 bins: {0.1,0.2}/{0,0} and {0.3,0.4,0.5}/{1,1,1}.
  EXPECT_NEAR(r.per_class[0].value, (2 * 0.55 + 3 * (0.8 - 2.0 / 3)) / 5, 1e-15);
  EXPECT_NEAR(r.per_class[1].value, (2 * 0.15 + 3 * 0.6) / 5, 1e-15);
  EXPECT_GT(r.per_class[1].value - r.per_class[0].value, 0.1);
}

TEST(Classwise, RawEceComplementSymmetryForAnySize) {
  for (std::uint64_t c = 0; c < 50; ++c) {
    CounterRng rng(15, c);
    const auto ds = random_dataset(rng, 1 + rng.below(25), 2);
    const auto r = classwise(BinaryMeasure{MeasureKind::RawEce, 1}, ds);
    EXPECT_NEAR(r.per_class[0].value, r.per_class[1].value, 1e-12);
  }
}

TEST(Classwise, MeanOfPerClassValues) {
  CounterRng rng(6, 0);
  const auto ds = random_dataset(rng, 40, 4);
  const auto r = classwise(BinaryMeasure{MeasureKind::L2Qece, 5}, ds);
  double total = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(r.per_class[c].value, evaluate(BinaryMeasure{MeasureKind::L2Qece, 5}, binary_reduction(ds, c + 1)).value);
    total += r.per_class[c].value;
  }
  EXPECT_NEAR(r.value, total / 4.0, 1e-15);
}

TEST(Classwise, AllZeroClassColumn) {
  const auto ds = labeled({{0.5, 0.5, 0.0}, {0.2, 0.8, 0.0}}, {1, 2});
  const auto r = classwise(BinaryMeasure{MeasureKind::L1Qece, 1}, ds);
  EXPECT_EQ(r.per_class[2].value, 0.0);
}

TEST(Confidence, Examples) {
  const auto single = labeled({{0.25, 0.25, 0.5}}, {3});
  EXPECT_EQ(confidence(BinaryMeasure{MeasureKind::RawEce, 1}, single).value, 0.5);
  const auto pair = labeled({{0.6, 0.4}, {0.6, 0.4}}, {1, 2});
  EXPECT_NEAR(confidence(BinaryMeasure{MeasureKind::L1Qece, 1}, pair).value, 0.1, 1e-15);
}

TEST(Confidence, TieRuleIsSmallestIndex) {
  const auto ds = labeled({{0.4, 0.4, 0.2}}, {2});
  const auto r = confidence(BinaryMeasure{MeasureKind::RawEce, 1}, ds);
  EXPECT_NEAR(r.value, 0.4, 1e-15);
}

TEST(Aggregation, ClassPermutationInvariance) {
  for (std::uint64_t c = 0; c < 50; ++c) {
    CounterRng rng(15, c);
    const std::size_t k = 2 + rng.below(4);
    const std::size_t n = 1 + rng.below(25);
    const auto ds = random_dataset(rng, n, k);
    std::vector<std::size_t> perm(k);
    for (std::size_t r = 0; r < k; ++r) perm[r] = (r + 1) % k;
    std::vector<double> probs(n * k);
    std::vector<long long> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < k; ++r) probs[i * k + perm[r]] = ds.prob(i, r);
      labels[i] = static_cast<long long>(perm[ds.label(i)]);
    }
    const auto moved = LabeledDataset::from_flat(probs, labels, k, LabelBase::Zero);
    const std::size_t m = 1 + rng.below(6);
    for (auto kind : {MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::RawEce}) {
      EXPECT_NEAR(classwise(BinaryMeasure{kind, m}, ds).value, classwise(BinaryMeasure{kind, m}, moved).value, 1e-14);
      // Dirichlet rows have a unique argmax with probability one.
      EXPECT_EQ(confidence(BinaryMeasure{kind, m}, ds).value, confidence(BinaryMeasure{kind, m}, moved).value);
    }
  }
}

TEST(Sweep, MatchesSingleEvaluations) {
  CounterRng rng(16, 0);
  const auto ds = random_dataset(rng, 30, 3);
  const std::vector<std::size_t> bins{1, 2, 5, 30, 45};
  for (auto agg : {Aggregation::Classwise, Aggregation::Confidence}) {
    const auto values = sweep_values(MeasureKind::L1Qece, agg, ds, bins);
    const auto results = evaluate_sweep(MeasureKind::L1Qece, agg, ds, bins);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const MeasureSpec spec{BinaryMeasure{MeasureKind::L1Qece, bins[i]}, agg};
      EXPECT_EQ(values[i], evaluate(spec, ds).value);
      EXPECT_EQ(results[i].value, values[i]);
      EXPECT_EQ(measure_value(spec, ds), values[i]);
    }
  }
}

TEST(Aggregation, Names) {
  EXPECT_EQ(parse_aggregation("classwise"), Aggregation::Classwise);
  EXPECT_EQ(parse_aggregation("confidence"), Aggregation::Confidence);
  EXPECT_EQ(parse_aggregation("conf"), Aggregation::Confidence);
  EXPECT_FALSE(parse_aggregation("topk").has_value());
}

}  // namespace
}  // namespace truecal
