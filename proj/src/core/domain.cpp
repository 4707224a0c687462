#include "domain.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace truecal {

namespace {

void check_simplex(std::span<const double> raw, std::optional<std::size_t> row) {
  if (raw.size() < 2) {
    throw Error(ErrorCode::DimensionTooSmall,
                "simplex vector needs at least 2 entries, got " + std::to_string(raw.size()), row);
  }
  double total = 0.0;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    const double x = raw[r];
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::NonFiniteEntry, "entry " + std::to_string(r + 1) + " is not finite", row);
    }
    // -0.0 compares equal to 0 and is accepted.
    if (x < 0.0) {
      throw Error(ErrorCode::NegativeEntry, "entry " + std::to_string(r + 1) + " is negative", row);
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw Error(ErrorCode::SumOutOfTolerance,
                "entries sum to " + std::to_string(total) + ", not 1 within 1e-9", row);
  }
  for (std::size_t r = 0; r < raw.size(); ++r) {
    if (raw[r] > 1.0) {
      throw Error(ErrorCode::SumOutOfTolerance, "entry " + std::to_string(r + 1) + " exceeds 1", row);
    }
  }
}

}  // namespace

SimplexVector SimplexVector::validate(std::span<const double> raw) {
  check_simplex(raw, std::nullopt);
  std::vector<double> probs(raw.begin(), raw.end());
  for (auto& x : probs) x += 0.0;  // folds -0.0 into +0.0
  return SimplexVector(std::move(probs));
}

SimplexVector SimplexVector::uniform(std::size_t k) {
  if (k < 2) throw Error(ErrorCode::DimensionTooSmall, "k must be at least 2");
  return SimplexVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

SimplexVector SimplexVector::one_hot(std::size_t k, std::size_t index) {
  if (k < 2) throw Error(ErrorCode::DimensionTooSmall, "k must be at least 2");
  if (index >= k) throw Error(ErrorCode::ClassIndexOutOfRange, "one-hot index out of range");
  std::vector<double> probs(k, 0.0);
  probs[index] = 1.0;
  return SimplexVector(std::move(probs));
}

OutcomeLabel OutcomeLabel::from_one_based(long long label, std::size_t k) {
  if (label < 1 || static_cast<unsigned long long>(label) > k) {
    throw Error(ErrorCode::LabelOutOfRange,
                "label " + std::to_string(label) + " outside 1.." + std::to_string(k));
  }
  return OutcomeLabel(static_cast<std::size_t>(label - 1));
}

OutcomeLabel OutcomeLabel::from_index(std::size_t index, std::size_t k) {
  if (index >= k) {
    throw Error(ErrorCode::LabelOutOfRange,
                "label index " + std::to_string(index) + " outside 0.." + std::to_string(k - 1));
  }
  return OutcomeLabel(index);
}

LabeledDataset::LabeledDataset(std::span<const SimplexVector> predictions,
                               std::span<const OutcomeLabel> labels) {
  if (predictions.empty()) throw Error(ErrorCode::EmptyDataset, "dataset must have at least one pair");
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and label counts differ");
  }
  k_ = predictions.front().size();
  probs_.reserve(predictions.size() * k_);
  labels_.reserve(labels.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != k_) {
      throw Error(ErrorCode::DimensionMismatch, "predictions do not share a class count", i);
    }
    if (labels[i].index() >= k_) {
      throw Error(ErrorCode::LabelOutOfRange, "label outside 1..k", i);
    }
    probs_.insert(probs_.end(), predictions[i].probs().begin(), predictions[i].probs().end());
    labels_.push_back(static_cast<std::uint32_t>(labels[i].index()));
  }
}

LabeledDataset LabeledDataset::from_flat(std::span<const double> probs, std::span<const long long> labels,
                                         std::size_t k, LabelBase base) {
  if (k < 2) throw Error(ErrorCode::DimensionTooSmall, "k must be at least 2");
  if (labels.empty()) throw Error(ErrorCode::EmptyDataset, "dataset must have at least one pair");
  if (probs.size() != labels.size() * k) {
    throw Error(ErrorCode::DimensionMismatch, "probability array is not n x k");
  }
  LabeledDataset ds;
  ds.k_ = k;
  ds.probs_.assign(probs.begin(), probs.end());
  ds.labels_.reserve(labels.size());
  const long long offset = base == LabelBase::One ? 1 : 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    check_simplex(probs.subspan(i * k, k), i);
    const long long idx = labels[i] - offset;
    if (idx < 0 || static_cast<unsigned long long>(idx) >= k) {
      throw Error(ErrorCode::LabelOutOfRange,
                  "label " + std::to_string(labels[i]) + " out of range for k=" + std::to_string(k), i);
    }
    ds.labels_.push_back(static_cast<std::uint32_t>(idx));
  }
  for (auto& x : ds.probs_) x += 0.0;
  return ds;
}

LabeledDataset LabeledDataset::relabeled(std::span<const std::uint32_t> labels) const {
  if (labels.size() != labels_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "relabeling must keep n");
  }
  LabeledDataset out;
  out.k_ = k_;
  out.probs_ = probs_;
  out.labels_.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k_) throw Error(ErrorCode::LabelOutOfRange, "label outside 1..k", i);
  }
  return out;
}

BinaryDataset::BinaryDataset(std::vector<double> predictions, std::vector<std::uint8_t> outcomes)
    : p_(std::move(predictions)), y_(std::move(outcomes)) {
  if (p_.empty()) throw Error(ErrorCode::EmptyDataset, "binary dataset must have at least one pair");
  if (p_.size() != y_.size()) throw Error(ErrorCode::DimensionMismatch, "prediction and outcome counts differ");
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0 && p_[i] <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "binary prediction outside [0,1]", i);
    }
    if (y_[i] > 1) throw Error(ErrorCode::InvalidArgument, "binary outcome must be 0 or 1", i);
    p_[i] += 0.0;  // -0.0 and 0.0 must group together under bit equality
  }
}

BinaryDataset::BinaryDataset(std::span<const BinaryPair> pairs) : BinaryDataset([&] {
    std::vector<double> p;
    p.reserve(pairs.size());
    for (const auto& pair : pairs) p.push_back(pair.p);
    return p;
  }(), [&] {
    std::vector<std::uint8_t> y;
    y.reserve(pairs.size());
    for (const auto& pair : pairs) y.push_back(pair.y);
    return y;
  }()) {}

std::size_t argmax_smallest_index(std::span<const double> probs) noexcept {
  std::size_t best = 0;
  for (std::size_t r = 1; r < probs.size(); ++r) {
    if (probs[r] > probs[best]) best = r;
  }
  return best;
}

BinaryDataset binary_reduction_index(const LabeledDataset& ds, std::size_t r_index) {
  if (r_index >= ds.classes()) {
    throw Error(ErrorCode::ClassIndexOutOfRange,
                "class " + std::to_string(r_index + 1) + " outside 1.." + std::to_string(ds.classes()));
  }
  const auto n = ds.size();
  std::vector<double> p(n);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = ds.prob(i, r_index);
    y[i] = ds.label(i) == r_index ? 1 : 0;
  }
  return BinaryDataset(std::move(p), std::move(y));
}

BinaryDataset binary_reduction(const LabeledDataset& ds, std::size_t r) {
  if (r < 1 || r > ds.classes()) {
    throw Error(ErrorCode::ClassIndexOutOfRange,
                "class " + std::to_string(r) + " outside 1.." + std::to_string(ds.classes()));
  }
  return binary_reduction_index(ds, r - 1);
}

BinaryDataset confidence_reduction(const LabeledDataset& ds) {
  const auto n = ds.size();
  std::vector<double> p(n);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto top = argmax_smallest_index(ds.prediction(i));
    p[i] = ds.prob(i, top);
    y[i] = ds.label(i) == top ? 1 : 0;
  }
  return BinaryDataset(std::move(p), std::move(y));
}

}  // namespace truecal
