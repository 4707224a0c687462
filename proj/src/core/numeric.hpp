#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace truecal {

// Neumaier-compensated running sum. Order of add() calls is part of the
// result, so callers that need bit-reproducibility must fix it.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

// Sample mean and standard error of the mean (n - 1 denominator).
inline MeanAndError mean_and_std_error(std::span<const double> xs) noexcept {
  MeanAndError out;
  const auto n = xs.size();
  if (n == 0) return out;
  out.mean = compensated_sum(xs) / static_cast<double>(n);
  if (n < 2) return out;
  CompensatedSum sq;
  for (double x : xs) {
    const double d = x - out.mean;
    sq.add(d * d);
  }
  const double variance = sq.value() / static_cast<double>(n - 1);
  out.std_error = std::sqrt(variance / static_cast<double>(n));
  return out;
}

}  // namespace truecal
