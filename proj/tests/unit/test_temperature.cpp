#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "temperature.hpp"
#include "test_util.hpp"

namespace truecal {
namespace {

// Rows log(0.7, 0.2, 0.1) scaled by `scale`, with labels in proportion 7:2:1,
// so T = scale minimizes the loss.
void calibrated_fixture(double scale, std::vector<double>& logits, std::vector<std::uint32_t>& labels) {
  const double p[3] = {0.7, 0.2, 0.1};
  const std::uint32_t counts[3] = {7, 2, 1};
  for (std::uint32_t y = 0; y < 3; ++y) {
    for (std::uint32_t c = 0; c < counts[y]; ++c) {
      for (double v : p) logits.push_back(scale * std::log(v));
      labels.push_back(y);
    }
  }
}

TEST(Temperature, CalibratedLogitsGiveOne) {
  std::vector<double> logits;
  std::vector<std::uint32_t> labels;
  calibrated_fixture(1.0, logits, labels);
  const auto fit = fit_temperature(logits, labels, 3);
  EXPECT_NEAR(fit.temperature, 1.0, 1e-5);
  EXPECT_LE(fit.loss, fit.loss_at_one + 1e-12);
}

TEST(Temperature, OverconfidentLogitsGiveFive) {
  std::vector<double> logits;
  std::vector<std::uint32_t> labels;
  calibrated_fixture(5.0, logits, labels);
  const auto fit = fit_temperature(logits, labels, 3);
  EXPECT_NEAR(fit.temperature, 5.0, 5e-5);
  EXPECT_LT(fit.loss, fit.loss_at_one);
}

TEST(Temperature, EqualLogitsReturnOne) {
  const std::vector<double> logits{2, 2, 2, -1, -1, -1};
  const std::vector<std::uint32_t> labels{0, 2};
  const auto fit = fit_temperature(logits, labels, 3);
  EXPECT_EQ(fit.temperature, 1.0);
  EXPECT_NEAR(fit.loss, std::log(3.0), 1e-15);
  EXPECT_EQ(fit.loss, fit.loss_at_one);
}

TEST(Temperature, LossIsMinimalAroundFit) {
  const std::vector<double> logits{1.5, -0.3, 0.2, 0.1, 2.2, -1.0, -0.5, 0.4, 0.9, 3.0, 0.0, 0.1};
  const std::vector<std::uint32_t> labels{0, 1, 2, 1};
  const auto fit = fit_temperature(logits, labels, 3, 1e-8);
  ASSERT_GT(fit.temperature, 1.1 * std::exp(kLogTemperatureMin));
  ASSERT_LT(fit.temperature, std::exp(kLogTemperatureMax) / 1.1);
  for (double f : {0.9, 0.99, 1.01, 1.1}) {
    EXPECT_LE(fit.loss, mean_log_loss(logits, labels, 3, fit.temperature * f) + 1e-12);
  }
}

TEST(Temperature, ProbsModeUsesFlooredLog) {
  const std::vector<double> probs{0.0, 1.0, 0.25, 0.75};
  const auto logits = scores_to_logits(probs, 2, ScoreMode::Probs);
  EXPECT_EQ(logits[0], std::log(kProbabilityFloor));
  EXPECT_EQ(logits[1], 0.0);
  EXPECT_EQ(logits[2], std::log(0.25));
}

TEST(Temperature, ApplyProducesSoftmax) {
  const std::vector<double> logits{0.0, std::log(3.0)};
  const auto one = apply_temperature(logits, 2, 1.0);
  EXPECT_NEAR(one[0], 0.25, 1e-15);
  EXPECT_NEAR(one[1], 0.75, 1e-15);
  const auto hot = apply_temperature(logits, 2, 1e6);
  EXPECT_NEAR(hot[0], 0.5, 1e-6);
}

TEST(Temperature, Errors) {
  const std::vector<double> bad{0.1, std::numeric_limits<double>::infinity(), 0.3, 0.4};
  EXPECT_EQ(testing::error_of([&] { scores_to_logits(bad, 2, ScoreMode::Logits); }), ErrorCode::NonFiniteEntry);
  EXPECT_EQ(testing::error_index_of([&] { scores_to_logits(bad, 2, ScoreMode::Logits); }), 0u);
  const std::vector<double> negative{0.5, 0.5, -0.1, 1.1};
  EXPECT_EQ(testing::error_index_of([&] { scores_to_logits(negative, 2, ScoreMode::Probs); }), 1u);
  const std::vector<double> logits{0.0, 1.0};
  const std::vector<std::uint32_t> out_of_range{2};
  EXPECT_EQ(testing::error_of([&] { fit_temperature(logits, out_of_range, 2); }), ErrorCode::LabelOutOfRange);
  const std::vector<std::uint32_t> ok{1};
  EXPECT_EQ(testing::error_of([&] { apply_temperature(logits, 2, 0.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(testing::error_of([&] { fit_temperature(logits, ok, 2, 0.0); }), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace truecal
