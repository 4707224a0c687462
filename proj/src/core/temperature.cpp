#include "temperature.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "numeric.hpp"

namespace truecal {

namespace {

void check_shape(std::size_t values, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::DimensionTooSmall, "need at least 2 classes");
  if (values == 0) throw Error(ErrorCode::EmptyDataset, "no rows");
  if (values % k != 0) throw Error(ErrorCode::DimensionMismatch, "score array is not a multiple of k");
}

// log sum_r exp(z_r / T) - z_y / T, shifted by the row max.
double row_log_loss(std::span<const double> z, std::size_t y, double inv_t) {
  const double top = *std::max_element(z.begin(), z.end()) * inv_t;
  double acc = 0.0;
  for (double v : z) acc += std::exp(v * inv_t - top);
  return top + std::log(acc) - z[y] * inv_t;
}

}  // namespace

std::vector<double> scores_to_logits(std::span<const double> scores, std::size_t k, ScoreMode mode) {
  check_shape(scores.size(), k);
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteEntry, "non-finite score", i / k);
    if (mode == ScoreMode::Probs) {
      if (s < 0.0) throw Error(ErrorCode::NegativeEntry, "negative probability", i / k);
      out[i] = std::log(std::max(s, kProbabilityFloor));
    } else {
      out[i] = s;
    }
  }
  return out;
}

std::vector<double> apply_temperature(std::span<const double> logits, std::size_t k, double temperature) {
  check_shape(logits.size(), k);
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be positive and finite");
  }
  const double inv_t = 1.0 / temperature;
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); i += k) {
    const auto z = logits.subspan(i, k);
    const double top = *std::max_element(z.begin(), z.end()) * inv_t;
    double total = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      out[i + r] = std::exp(z[r] * inv_t - top);
      total += out[i + r];
    }
    for (std::size_t r = 0; r < k; ++r) out[i + r] /= total;
  }
  return out;
}

double mean_log_loss(std::span<const double> logits, std::span<const std::uint32_t> labels, std::size_t k,
                     double temperature) {
  check_shape(logits.size(), k);
  const std::size_t n = logits.size() / k;
  if (labels.size() != n) throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
  const double inv_t = 1.0 / temperature;
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= k) throw Error(ErrorCode::LabelOutOfRange, "label outside 0..k-1", i);
    total.add(row_log_loss(logits.subspan(i * k, k), labels[i], inv_t));
  }
  return total.value() / static_cast<double>(n);
}

TemperatureFit fit_temperature(std::span<const double> logits, std::span<const std::uint32_t> labels, std::size_t k,
                               double tolerance) {
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) throw Error(ErrorCode::NonFiniteEntry, "non-finite logit", k ? i / k : 0);
  }
  const auto loss_at = [&](double u) { return mean_log_loss(logits, labels, k, std::exp(u)); };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLogTemperatureMin;
  double b = kLogTemperatureMax;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = loss_at(c);
  double fd = loss_at(d);
  TemperatureFit fit;
  bool flat = true;
  for (std::size_t i = 0; flat && i < logits.size(); ++i) flat = logits[i] == logits[i - i % k];
  if (flat) a = b = 0.0;  // every row has equal logits, T does not matter
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = loss_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = loss_at(d);
    }
    ++fit.iterations;
  }
  const double u = 0.5 * (a + b);
  fit.temperature = std::exp(u);
  fit.loss = loss_at(u);
  fit.loss_at_one = loss_at(0.0);
  return fit;
}

}  // namespace truecal
