#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "binning.hpp"
#include "domain.hpp"
#include "multiclass.hpp"
#include "rng.hpp"

namespace truecal {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

/// Ground-truth outcome distributions p*_1..p*_n. The same shape doubles as a
/// report profile.
class ProfileOfDistributions {
 public:
  explicit ProfileOfDistributions(std::vector<SimplexVector> rows);

  /// Binary model: row i is (1 - q_i, q_i), i.e. q_i is the probability of
  /// class 2.
  static ProfileOfDistributions binary(std::span<const double> positive_probs);

  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t classes() const noexcept { return rows_.front().size(); }
  const SimplexVector& operator[](std::size_t i) const noexcept { return rows_[i]; }
  std::span<const SimplexVector> rows() const noexcept { return rows_; }

 private:
  std::vector<SimplexVector> rows_;
};

using GroundTruthModel = ProfileOfDistributions;
using ReportProfile = ProfileOfDistributions;

/// Exact E_{y_i ~ p*_i independent}[measure(reports; y)] by enumerating all
/// k^n outcome vectors in odometer order with compensated accumulation.
/// Throws Error{BudgetExceeded} when k^n exceeds `budget`.
double exact_expected_measure(const MeasureSpec& spec, const GroundTruthModel& truth, const ReportProfile& reports,
                              std::uint64_t budget = kDefaultEnumerationBudget);

/// Binary version: truths and reports are P(y = 1); enumerates {0,1}^n.
double exact_expected_binary(const BinaryMeasure& measure, std::span<const double> truths,
                             std::span<const double> reports, std::uint64_t budget = kDefaultEnumerationBudget);

/// (1/n^2) sum_i p*_i (1 - p*_i) for binary truths given as P(y = 1).
double closed_form_l2qece(std::span<const double> positive_probs);

/// Exact expected l2 binned ECE of fixed binary reports against independent
/// Bernoulli truths: (1/n^2) [ sum_j (sum_{B_j} (q_i - p*_i))^2 + sum_i p*_i (1 - p*_i) ].
/// Bins depend on the reports only, so no enumeration is needed.
double expected_l2_binary(std::span<const double> reports, std::span<const double> truths, std::size_t m,
                          BinningScheme scheme = BinningScheme::Quantile);

/// Same identity lifted through classwise or confidence aggregation.
double expected_l2(Aggregation agg, const GroundTruthModel& truth, const ReportProfile& reports, std::size_t m,
                   BinningScheme scheme = BinningScheme::Quantile);

enum class DeviationStrategy { RandomMixture, ConstantUniform, ArgmaxFlip, CoordinateBias };

std::string_view to_string(DeviationStrategy s) noexcept;

/// Builds one deviation profile from the truth. Every sample is perturbed with
/// probability 1/2 (at least one always is), except ConstantUniform which
/// replaces every row.
ReportProfile make_deviation(DeviationStrategy strategy, const GroundTruthModel& truth, CounterRng& rng);

/// Random model with rows from a flat Dirichlet, occasionally snapped to
/// one-hot or uniform rows so boundary cases are exercised.
GroundTruthModel random_model(CounterRng& rng, std::size_t n, std::size_t k);

struct TruthfulnessConfig {
  std::size_t deviations = 200;  // spread evenly over the four strategies
  double tolerance = 1e-12;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

struct TruthfulnessReport {
  double truth_value = 0.0;
  std::size_t deviations_tested = 0;
  std::size_t violations = 0;        // slack < -tolerance
  std::size_t within_tolerance = 0;  // -tolerance <= slack < 0
  double min_slack = 0.0;            // min over deviations of E[dev] - E[truth]
  std::optional<ReportProfile> worst_deviation;
  std::optional<std::size_t> worst_index;
  std::optional<DeviationStrategy> worst_strategy;
  double worst_value = 0.0;
  bool passed() const noexcept { return violations == 0; }
};

TruthfulnessReport truthfulness_probe(const MeasureSpec& spec, const GroundTruthModel& truth,
                                      const TruthfulnessConfig& config);

/// Also probes an explicit list of deviations (used for constant reporters).
TruthfulnessReport truthfulness_probe(const MeasureSpec& spec, const GroundTruthModel& truth,
                                      std::span<const ReportProfile> deviations, double tolerance,
                                      std::uint64_t budget = kDefaultEnumerationBudget);

struct WitnessSearchConfig {
  std::size_t n_max = 4;
  std::size_t k = 3;
  // Bin counts to try; 0 stands for m = n.
  std::vector<std::size_t> bins = {1, 2, 0};
  std::size_t models_per_size = 40;
  std::size_t deviations_per_model = 100;
  double margin = 1e-6;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

struct Witness {
  GroundTruthModel truth;
  ReportProfile deviation;
  DeviationStrategy strategy;
  std::size_t m;
  double truth_value;
  double deviation_value;
  double margin;  // truth_value - deviation_value
};

struct WitnessSearchResult {
  std::optional<Witness> witness;  // largest margin found, if >= config.margin
  std::size_t models_searched = 0;
  std::size_t deviations_evaluated = 0;
};

/// Searches small instances for a deviation whose exact expected measure beats
/// truthful reporting by at least `margin`. Bin count is taken from each
/// candidate m; `spec.measure.bins` is ignored.
WitnessSearchResult nontruthfulness_witness(const MeasureSpec& spec, const WitnessSearchConfig& config);

}  // namespace truecal
