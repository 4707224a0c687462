#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"
#include "rng.hpp"

namespace truecal {

/// Finite decision problem: |A| actions, loss L(a, y) >= 0 stored row-major.
class DecisionProblem {
 public:
  DecisionProblem(std::size_t actions, std::size_t classes, std::vector<double> loss_matrix);

  /// Actions are the classes, L(a, y) = 1{a != y}.
  static DecisionProblem zero_one(std::size_t k);

  /// Entries i.i.d. uniform on [0, 1).
  static DecisionProblem random(CounterRng& rng, std::size_t actions, std::size_t k);

  std::size_t actions() const noexcept { return actions_; }
  std::size_t classes() const noexcept { return classes_; }
  double loss(std::size_t action, std::size_t y) const noexcept { return matrix_[action * classes_ + y]; }
  std::span<const double> matrix() const noexcept { return matrix_; }

  DecisionProblem scaled(double factor) const;

 private:
  std::size_t actions_;
  std::size_t classes_;
  std::vector<double> matrix_;
};

enum class LossKind { Log, Brier, Classification, Spherical, Induced };

std::string_view to_string(LossKind kind) noexcept;
std::optional<LossKind> parse_loss_kind(std::string_view name) noexcept;

struct LossId {
  LossKind kind = LossKind::Brier;
  std::optional<DecisionProblem> problem;  // set iff kind == Induced

  static LossId named(LossKind kind);
  static LossId induced(DecisionProblem problem);
  std::string name() const;
};

/// Any per-sample loss on (report, 0-based outcome). Used for properness
/// probing of losses outside the named set.
using LossFunction = std::function<double(std::span<const double>, std::size_t)>;

double log_loss(std::span<const double> p, std::size_t y) noexcept;
double brier_loss(std::span<const double> p, std::size_t y) noexcept;
double classification_error(std::span<const double> p, std::size_t y) noexcept;
double spherical_loss(std::span<const double> p, std::size_t y) noexcept;

inline double log_loss(const SimplexVector& p, OutcomeLabel y) noexcept { return log_loss(p.probs(), y.index()); }
inline double brier_loss(const SimplexVector& p, OutcomeLabel y) noexcept { return brier_loss(p.probs(), y.index()); }
inline double classification_error(const SimplexVector& p, OutcomeLabel y) noexcept {
  return classification_error(p.probs(), y.index());
}
inline double spherical_loss(const SimplexVector& p, OutcomeLabel y) noexcept {
  return spherical_loss(p.probs(), y.index());
}

/// argmin_a sum_y q[y] L(a, y), smallest action index on ties. 0-based.
std::size_t best_response(const DecisionProblem& dp, std::span<const double> q);

/// L(best_response(dp, q), y).
double induced_loss(const DecisionProblem& dp, std::span<const double> q, std::size_t y);

double loss_value(const LossId& loss, std::span<const double> report, std::size_t y);
LossFunction as_function(const LossId& loss);

/// sum_y p_true[y] * loss(report, y), with 0 * inf = 0.
double expected_loss(const LossFunction& loss, std::span<const double> p_true, std::span<const double> report);
double expected_loss(const LossId& loss, const SimplexVector& p_true, const SimplexVector& report);

/// Every point of {c / steps : c in N^k, sum c = steps}, in lexicographic
/// order of the count vector.
std::vector<std::vector<double>> simplex_grid(std::size_t k, std::size_t steps);

struct ProperViolation {
  std::vector<double> truth;
  std::vector<double> report;
  double slack = 0.0;
};

struct PropernessConfig {
  std::size_t k = 2;
  double grid_step = 0.05;
  double tolerance = 1e-12;
  std::size_t random_reports = 0;  // extra Dirichlet reports per truth
  std::uint64_t seed = 0;
};

struct PropernessReport {
  std::size_t grid_points = 0;
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;         // slack < -tolerance
  std::size_t within_tolerance = 0;   // -tolerance <= slack < 0
  double min_slack = 0.0;             // over all pairs, so at most 0
  std::optional<ProperViolation> worst;  // most negative slack when violated
  bool passed() const noexcept { return violations == 0; }
};

/// Checks E_{y~p}[l(p, y)] <= E_{y~p}[l(q, y)] + tolerance over every pair of
/// grid points (p, q), plus optional random reports q.
PropernessReport properness_probe(const LossFunction& loss, const PropernessConfig& config);
PropernessReport properness_probe(const LossId& loss, const PropernessConfig& config);

}  // namespace truecal
