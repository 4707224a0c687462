#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace truecal {

inline constexpr double kSimplexTolerance = 1e-9;

/// A probability vector over k >= 2 outcomes. Construction validates and never
/// renormalizes.
class SimplexVector {
 public:
  /// Throws Error{NegativeEntry | SumOutOfTolerance | DimensionTooSmall |
  /// NonFiniteEntry}.
  static SimplexVector validate(std::span<const double> raw);

  static SimplexVector uniform(std::size_t k);
  static SimplexVector one_hot(std::size_t k, std::size_t index);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t r) const noexcept { return probs_[r]; }
  std::span<const double> probs() const noexcept { return probs_; }

  friend bool operator==(const SimplexVector&, const SimplexVector&) = default;

 private:
  explicit SimplexVector(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

/// Class label. Externally 1-indexed, stored 0-indexed.
class OutcomeLabel {
 public:
  static OutcomeLabel from_one_based(long long label, std::size_t k);
  static OutcomeLabel from_index(std::size_t index, std::size_t k);

  std::size_t index() const noexcept { return index_; }
  long long one_based() const noexcept { return static_cast<long long>(index_) + 1; }

  friend bool operator==(OutcomeLabel, OutcomeLabel) = default;

 private:
  explicit OutcomeLabel(std::size_t index) : index_(index) {}
  std::size_t index_;
};

enum class LabelBase { Zero = 0, One = 1 };

/// n (prediction, label) pairs sharing a common class count k. Predictions
/// are stored row-major.
class LabeledDataset {
 public:
  LabeledDataset(std::span<const SimplexVector> predictions, std::span<const OutcomeLabel> labels);

  /// Validates every row; errors carry the offending row index (0-based).
  static LabeledDataset from_flat(std::span<const double> probs, std::span<const long long> labels,
                                  std::size_t k, LabelBase base);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t classes() const noexcept { return k_; }

  std::span<const double> prediction(std::size_t i) const noexcept {
    return std::span<const double>(probs_).subspan(i * k_, k_);
  }
  double prob(std::size_t i, std::size_t r) const noexcept { return probs_[i * k_ + r]; }
  std::size_t label(std::size_t i) const noexcept { return labels_[i]; }

  std::span<const double> flat_predictions() const noexcept { return probs_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }

  /// Same predictions, new 0-based labels (each checked against k).
  LabeledDataset relabeled(std::span<const std::uint32_t> labels) const;

 private:
  LabeledDataset() = default;
  std::size_t k_ = 0;
  std::vector<double> probs_;
  std::vector<std::uint32_t> labels_;
};

struct BinaryPair {
  double p;
  std::uint8_t y;
};

/// n scalar (prediction, bit) pairs in structure-of-arrays form.
class BinaryDataset {
 public:
  BinaryDataset(std::vector<double> predictions, std::vector<std::uint8_t> outcomes);
  explicit BinaryDataset(std::span<const BinaryPair> pairs);

  std::size_t size() const noexcept { return p_.size(); }
  double p(std::size_t i) const noexcept { return p_[i]; }
  std::uint8_t y(std::size_t i) const noexcept { return y_[i]; }
  std::span<const double> predictions() const noexcept { return p_; }
  std::span<const std::uint8_t> outcomes() const noexcept { return y_; }

 private:
  std::vector<double> p_;
  std::vector<std::uint8_t> y_;
};

/// Index of the largest entry; ties go to the smallest index.
std::size_t argmax_smallest_index(std::span<const double> probs) noexcept;

/// (p_i[r], 1{y_i = r}) for every sample. `r` is 1-based.
BinaryDataset binary_reduction(const LabeledDataset& ds, std::size_t r);

/// Same as binary_reduction but with a 0-based class index.
BinaryDataset binary_reduction_index(const LabeledDataset& ds, std::size_t r_index);

/// (p_i[argmax p_i], 1{y_i = argmax p_i}) with smallest-index tie-breaking.
BinaryDataset confidence_reduction(const LabeledDataset& ds);

}  // namespace truecal
