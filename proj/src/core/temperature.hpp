#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace truecal {

enum class ScoreMode { Logits, Probs };

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kLogTemperatureMin = -5.0;
inline constexpr double kLogTemperatureMax = 5.0;

/// Row-major n x k scores turned into logits: copied for Logits mode,
/// log(max(p, 1e-12)) for Probs mode. Non-finite inputs throw
/// Error{NonFiniteEntry} with the row index.
std::vector<double> scores_to_logits(std::span<const double> scores, std::size_t k, ScoreMode mode);

/// softmax(logits / T) for every row.
std::vector<double> apply_temperature(std::span<const double> logits, std::size_t k, double temperature);

/// Mean cross-entropy of softmax(logits / T) against 0-based labels.
double mean_log_loss(std::span<const double> logits, std::span<const std::uint32_t> labels, std::size_t k,
                     double temperature);

struct TemperatureFit {
  double temperature = 1.0;
  double loss = 0.0;         // mean log loss at `temperature`
  double loss_at_one = 0.0;  // mean log loss of the unscaled logits
  std::size_t iterations = 0;
};

/// Golden-section search on ln T over [-5, 5] until the bracket is narrower
/// than `tolerance`. When every row has equal logits the loss is flat in T and
/// the bracket midpoint T = 1 is returned.
TemperatureFit fit_temperature(std::span<const double> logits, std::span<const std::uint32_t> labels, std::size_t k,
                               double tolerance = 1e-6);

}  // namespace truecal
