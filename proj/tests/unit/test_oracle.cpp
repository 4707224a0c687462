#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "rng.hpp"
#include "test_util.hpp"

namespace truecal {
namespace {

using V = std::vector<double>;

MeasureSpec l2(Aggregation agg, std::size_t m) { return MeasureSpec{BinaryMeasure{MeasureKind::L2Qece, m}, agg}; }

// Independent enumeration for binary truths: recursion over outcome bits,
// computing the measure on each full outcome vector via evaluate().
double brute_binary(const BinaryMeasure& bm, const V& truths, const V& reports) {
  const std::size_t n = truths.size();
  double total = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 1;
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = (mask >> i) & 1u;
      w *= y[i] ? truths[i] : 1 - truths[i];
    }
    total += w * evaluate(bm, BinaryDataset(reports, y)).value;
  }
  return total;
}

TEST(ExactExpected, SingleUniformSample) {
  const auto truth = ProfileOfDistributions::binary(V{0.5});
  EXPECT_NEAR(exact_expected_measure(l2(Aggregation::Classwise, 1), truth, truth), 0.25, 1e-15);
}

TEST(ExactExpected, FourFairCoins) {
  const V half{0.5, 0.5, 0.5, 0.5};
  for (std::size_t m = 1; m <= 4; ++m) {
    EXPECT_NEAR(exact_expected_binary(BinaryMeasure{MeasureKind::L2Qece, m}, half, half), 0.0625, 1e-15);
  }
  EXPECT_EQ(closed_form_l2qece(half), 0.0625);
}

TEST(ClosedForm, Examples) {
  EXPECT_EQ(closed_form_l2qece(V{0.0, 1.0, 1.0}), 0.0);
  EXPECT_NEAR(closed_form_l2qece(V{0.3, 0.8}), 0.0925, 1e-15);
  EXPECT_NEAR(exact_expected_binary(BinaryMeasure{MeasureKind::L2Qece, 1}, V{0.3, 0.8}, V{0.3, 0.8}), 0.0925, 1e-15);
}

TEST(ExactExpected, DeterministicTruthIsZero) {
  const ProfileOfDistributions truth({SimplexVector::one_hot(3, 0), SimplexVector::one_hot(3, 2),
                                      SimplexVector::one_hot(3, 1)});
  for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece, MeasureKind::L1Fixed}) {
    for (auto agg : {Aggregation::Classwise, Aggregation::Confidence}) {
      EXPECT_EQ(exact_expected_measure(MeasureSpec{BinaryMeasure{kind, 2}, agg}, truth, truth), 0.0);
    }
  }
}

TEST(ExactExpected, MatchesBruteForceBinary) {
  for (std::uint64_t c = 0; c < 40; ++c) {
    CounterRng rng(50, c);
    const std::size_t n = 1 + rng.below(7);
    V truths(n), reports(n);
    for (std::size_t i = 0; i < n; ++i) {
      truths[i] = rng.uniform();
      reports[i] = rng.uniform();
    }
    for (auto kind : {MeasureKind::RawEce, MeasureKind::L1Qece, MeasureKind::L2Qece}) {
      const BinaryMeasure bm{kind, 1 + rng.below(n + 1)};
      EXPECT_NEAR(exact_expected_binary(bm, truths, reports), brute_binary(bm, truths, reports), 1e-13);
    }
  }
}

TEST(ExpectedL2, FormulaMatchesEnumeration) {
  for (std::uint64_t c = 0; c < 40; ++c) {
    CounterRng rng(51, c);
    const std::size_t n = 1 + rng.below(7);
    V truths(n), reports(n);
    for (std::size_t i = 0; i < n; ++i) {
      truths[i] = rng.uniform();
      reports[i] = rng.uniform();
    }
    const std::size_t m = 1 + rng.below(n + 1);
    EXPECT_NEAR(expected_l2_binary(reports, truths, m),
                exact_expected_binary(BinaryMeasure{MeasureKind::L2Qece, m}, truths, reports), 1e-14);
    EXPECT_NEAR(expected_l2_binary(reports, truths, m, BinningScheme::Fixed),
                exact_expected_binary(BinaryMeasure{MeasureKind::L2Fixed, m}, truths, reports), 1e-14);
  }
}

TEST(ExactExpected, ClasswiseIsMeanOfPerClassExpectations) {
  CounterRng rng(52, 0);
  const auto truth = random_model(rng, 4, 3);
  const auto reports = random_model(rng, 4, 3);
  const auto spec = l2(Aggregation::Classwise, 2);
  double mean = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    V t, q;
    for (std::size_t i = 0; i < 4; ++i) {
      t.push_back(truth[i][r]);
      q.push_back(reports[i][r]);
    }
    mean += exact_expected_binary(spec.measure, t, q) / 3.0;
  }
  EXPECT_NEAR(exact_expected_measure(spec, truth, reports), mean, 1e-14);
  EXPECT_NEAR(expected_l2(Aggregation::Classwise, truth, reports, 2), mean, 1e-14);
}

TEST(ExactExpected, BudgetExceeded) {
  const auto truth = ProfileOfDistributions::binary(V(12, 0.5));
  EXPECT_EQ(testing::error_of([&] { exact_expected_measure(l2(Aggregation::Classwise, 1), truth, truth, 1000); }),
            ErrorCode::BudgetExceeded);
}

TEST(Truthfulness, ClasswiseL2HasNoViolations) {
  for (std::uint64_t c = 0; c < 5; ++c) {
    CounterRng rng(60, c);
    const auto truth = random_model(rng, 3, 3);
    TruthfulnessConfig cfg;
    cfg.deviations = 200;
    cfg.seed = c;
    const auto report = truthfulness_probe(l2(Aggregation::Classwise, 2), truth, cfg);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.deviations_tested, 200u);
  }
  CounterRng rng(61, 0);
  const auto binary_truth = random_model(rng, 4, 2);
  EXPECT_TRUE(truthfulness_probe(l2(Aggregation::Classwise, 2), binary_truth, TruthfulnessConfig{}).passed());
}

TEST(Truthfulness, RawEceLosesToConstantHalf) {
  const std::size_t n = 10;
  V grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  // The last row is deterministic, the constant reporter still wins.
  const auto truth = ProfileOfDistributions::binary(grid);
  const std::vector<ReportProfile> constant{ProfileOfDistributions::binary(V(n, 0.5))};
  const MeasureSpec raw{BinaryMeasure{MeasureKind::RawEce, 1}, Aggregation::Confidence};
  const auto report = truthfulness_probe(raw, truth, constant, 1e-12);
  EXPECT_FALSE(report.passed());
  EXPECT_EQ(report.violations, 1u);
}

TEST(Witness, ConfidenceL2HasWitness) {
  WitnessSearchConfig cfg;
  cfg.models_per_size = 10;
  cfg.deviations_per_model = 40;
  cfg.seed = 3;
  const auto result = nontruthfulness_witness(l2(Aggregation::Confidence, 1), cfg);
  ASSERT_TRUE(result.witness.has_value());
  const auto& w = *result.witness;
  EXPECT_GE(w.margin, 1e-6);
  // Re-evaluate both sides independently of the search.
  const auto spec = l2(Aggregation::Confidence, w.m);
  EXPECT_NEAR(exact_expected_measure(spec, w.truth, w.truth), w.truth_value, 1e-14);
  EXPECT_NEAR(exact_expected_measure(spec, w.truth, w.deviation), w.deviation_value, 1e-14);
  EXPECT_NEAR(w.truth_value - w.deviation_value, w.margin, 1e-14);
}

TEST(Witness, ClasswiseL1HasWitness) {
  WitnessSearchConfig cfg;
  cfg.models_per_size = 10;
  cfg.deviations_per_model = 40;
  cfg.seed = 4;
  const auto result =
      nontruthfulness_witness(MeasureSpec{BinaryMeasure{MeasureKind::L1Qece, 1}, Aggregation::Classwise}, cfg);
  ASSERT_TRUE(result.witness.has_value());
  EXPECT_GE(result.witness->margin, 1e-6);
}

TEST(Witness, ClasswiseL2HasNone) {
  WitnessSearchConfig cfg;
  cfg.models_per_size = 10;
  cfg.deviations_per_model = 40;
  cfg.seed = 5;
  const auto result = nontruthfulness_witness(l2(Aggregation::Classwise, 1), cfg);
  EXPECT_FALSE(result.witness.has_value());
  EXPECT_GT(result.deviations_evaluated, 0u);
}

TEST(Deviation, ProfilesAreValidAndDiffer) {
  CounterRng rng(70, 0);
  const auto truth = random_model(rng, 4, 3);
  for (auto s : {DeviationStrategy::RandomMixture, DeviationStrategy::ConstantUniform, DeviationStrategy::ArgmaxFlip,
                 DeviationStrategy::CoordinateBias}) {
    const auto dev = make_deviation(s, truth, rng);
    ASSERT_EQ(dev.size(), truth.size());
    bool differs = false;
    for (std::size_t i = 0; i < dev.size(); ++i) differs = differs || !(dev[i] == truth[i]);
    EXPECT_TRUE(differs || s == DeviationStrategy::ConstantUniform) << to_string(s);
  }
}

}  // namespace
}  // namespace truecal
