#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"
#include "losses.hpp"
#include "multiclass.hpp"
#include "rng.hpp"

namespace truecal {

// Benchmark world: x uniform on {1..k}; y = x with probability 1 - eps1,
// otherwise y = x + 1 (wrapping k -> 1).
struct SyntheticWorld {
  std::size_t k = 10;
  double eps1 = 0.1;

  void validate() const;
  /// P(y | x), both 0-based.
  double conditional(std::size_t x, std::size_t y) const noexcept;
};

enum class Family { F1, F2, F3, F4 };

std::string_view to_string(Family f) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;

// f1: ground truth (1 - eps1 at x, eps1 at x + 1). f2: f1 shifted by eps2
// toward the minority class. f3: uniform. f4: constant
// (1/k + (k-1) eps3, 1/k - eps3, ...).
struct SyntheticPredictorSpec {
  Family family = Family::F1;
  std::size_t k = 10;
  double eps1 = 0.1;
  double eps2 = 0.0;
  double eps3 = 0.0;

  /// Throws Error{InvalidSpec}.
  void validate() const;
};

/// Prediction for feature x in 1..k.
SimplexVector predict(const SyntheticPredictorSpec& spec, std::size_t x);

/// Features and labels of one draw from the world, 0-based.
struct WorldSample {
  std::vector<std::uint32_t> features;
  std::vector<std::uint32_t> labels;
};

WorldSample draw_world(const SyntheticWorld& world, std::size_t n, CounterRng& rng);

/// Predictions of `spec` on an existing world draw.
LabeledDataset predict_dataset(const SyntheticPredictorSpec& spec, const WorldSample& sample);

/// n i.i.d. pairs; a pure function of (world, spec, n, seed).
LabeledDataset sample_dataset(const SyntheticWorld& world, const SyntheticPredictorSpec& spec, std::size_t n,
                              std::uint64_t seed);

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Trial t uses CounterRng(seed, t) for its world draw, so results are
/// independent of evaluation order and thread count.
MonteCarloResult mc_expected_error(const MeasureSpec& measure, const SyntheticWorld& world,
                                   const SyntheticPredictorSpec& spec, std::size_t n, std::size_t trials,
                                   std::uint64_t seed);

/// Same draws evaluated at every bin count in `bins`.
std::vector<MonteCarloResult> mc_sweep(MeasureKind kind, Aggregation agg, const SyntheticWorld& world,
                                       const SyntheticPredictorSpec& spec, std::size_t n,
                                       std::span<const std::size_t> bins, std::size_t trials, std::uint64_t seed);

/// Exact expected l2-qECE under the world, accounting for the actual
/// quantile-bin sizes and for the random mix of prediction values inside each
/// reduction (multinomial enumeration; at most three distinct values per
/// reduction). Throws Error{UnsupportedColumn} for l1 measures.
double exact_expected_l2(const SyntheticWorld& world, const SyntheticPredictorSpec& spec, Aggregation agg,
                         std::size_t n, std::size_t m);

enum class Table1Column { L1Confidence, L1Classwise, L2Confidence, L2Classwise };

std::string_view to_string(Table1Column c) noexcept;
std::optional<Table1Column> parse_table1_column(std::string_view name) noexcept;

struct Table1Entry {
  bool exact = false;
  // l2 columns: the tabulated value. l1 columns: the leading bias term only.
  double value = 0.0;
  // l1 columns: sqrt(v * m / n) with v the row's outcome variance; the
  // sampling term is Theta of this, constant unstated.
  double sampling_scale = 0.0;
  std::string descriptor;
};

/// The tabulated expected error (1/m bias factors, i.e. exact when m | n and,
/// for f2 classwise, when m is large against k).
Table1Entry table1_closed_form(const SyntheticPredictorSpec& spec, Table1Column column, std::size_t n,
                               std::size_t m);

/// Numeric value of an l2 column; Error{UnsupportedColumn} for l1.
double table1_exact(const SyntheticPredictorSpec& spec, Table1Column column, std::size_t n, std::size_t m);

/// E_{(x,y) ~ D}[loss(f(x), y)] by exact summation over the k^2 support.
double world_expected_loss(const SyntheticWorld& world, const SyntheticPredictorSpec& spec, const LossId& loss);

struct BrierIdentityReport {
  double expected_brier = 0.0;   // exact under the world
  double identity_value = 0.0;   // expected_brier / (k n)
  MonteCarloResult mc;           // l2-qECE classwise
  double z_score = 0.0;
  bool within_three_se = false;
};

/// Error{InvalidSpec} for the miscalibrated families f2 and f4.
BrierIdentityReport brier_identity_check(const SyntheticWorld& world, const SyntheticPredictorSpec& spec,
                                         std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed);

struct DominanceConfig {
  std::size_t random_losses = 64;
  std::size_t max_actions = 8;
  std::uint64_t seed = 0;
  double tolerance = 1e-12;
};

struct DominanceEntry {
  std::string loss;
  double loss_a = 0.0;
  double loss_b = 0.0;
  double margin = 0.0;  // loss_b - loss_a; >= 0 when A is at least as good
};

struct DominanceReport {
  std::vector<DominanceEntry> entries;
  bool a_dominates_b = false;  // every margin >= -tolerance
  bool strict_somewhere = false;
  bool all_ties = false;
};

DominanceReport dominance_check(const SyntheticWorld& world, const SyntheticPredictorSpec& a,
                                const SyntheticPredictorSpec& b, const DominanceConfig& config);

struct RankingFlipRow {
  std::size_t m = 0;
  MonteCarloResult a;
  MonteCarloResult b;
  MonteCarloResult difference;  // paired a - b on common draws
  int order = 0;                // sign of difference.estimate
};

struct RankingFlipTable {
  std::vector<RankingFlipRow> rows;
  std::optional<std::size_t> crossover_m;  // first m whose order differs from the first row
  bool flips() const noexcept { return crossover_m.has_value(); }
};

/// Both predictors are evaluated on the same world draws (common random
/// numbers) at every bin count.
RankingFlipTable ranking_flip_experiment(MeasureKind kind, Aggregation agg, const SyntheticWorld& world,
                                         const SyntheticPredictorSpec& a, const SyntheticPredictorSpec& b,
                                         std::size_t n, std::span<const std::size_t> bins, std::size_t trials,
                                         std::uint64_t seed);

struct CalibrationCheck {
  bool calibrated = false;
  double max_deviation = 0.0;  // max |P(y = r | f_r(x) = v) - v|
};

struct Example1Report {
  MonteCarloResult truth_raw_ece;     // reports p*_i = i/n
  MonteCarloResult constant_raw_ece;  // reports 0.5 everywhere
  std::vector<std::size_t> bins;
  std::vector<double> truth_l2;       // exact expected l2-qECE per entry of bins
  std::vector<double> constant_l2;
};

/// Binary world with P(y_i = 1) = i/n, i = 1..n: raw ECE of the truth-teller
/// against the constant 0.5 reporter by Monte Carlo, plus exact expected
/// l2-qECE of both.
Example1Report example1_replication(std::size_t n, std::size_t trials, std::uint64_t seed,
                                    std::span<const std::size_t> bins);

/// Exact classwise calibration check on the finite world.
CalibrationCheck classwise_calibration(const SyntheticWorld& world, const SyntheticPredictorSpec& spec,
                                       double tolerance = 1e-12);

}  // namespace truecal
