#include "losses.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace truecal {

DecisionProblem::DecisionProblem(std::size_t actions, std::size_t classes, std::vector<double> loss_matrix)
    : actions_(actions), classes_(classes), matrix_(std::move(loss_matrix)) {
  if (actions_ == 0) throw Error(ErrorCode::InvalidArgument, "decision problem needs at least one action");
  if (classes_ < 2) throw Error(ErrorCode::DimensionTooSmall, "decision problem needs k >= 2");
  if (matrix_.size() != actions_ * classes_) {
    throw Error(ErrorCode::DimensionMismatch, "loss matrix is not |A| x k");
  }
  for (double x : matrix_) {
    if (!std::isfinite(x) || x < 0.0) throw Error(ErrorCode::InvalidArgument, "loss entries must be finite and >= 0");
  }
}

DecisionProblem DecisionProblem::zero_one(std::size_t k) {
  std::vector<double> matrix(k * k, 1.0);
  for (std::size_t a = 0; a < k; ++a) matrix[a * k + a] = 0.0;
  return DecisionProblem(k, k, std::move(matrix));
}

DecisionProblem DecisionProblem::random(CounterRng& rng, std::size_t actions, std::size_t k) {
  std::vector<double> matrix(actions * k);
  for (auto& x : matrix) x = rng.uniform();
  return DecisionProblem(actions, k, std::move(matrix));
}

DecisionProblem DecisionProblem::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
  auto matrix = matrix_;
  for (auto& x : matrix) x *= factor;
  return DecisionProblem(actions_, classes_, std::move(matrix));
}

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::Log: return "log";
    case LossKind::Brier: return "brier";
    case LossKind::Classification: return "classification";
    case LossKind::Spherical: return "spherical";
    case LossKind::Induced: return "induced";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view name) noexcept {
  for (auto kind : {LossKind::Log, LossKind::Brier, LossKind::Classification, LossKind::Spherical,
                    LossKind::Induced}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

LossId LossId::named(LossKind kind) {
  if (kind == LossKind::Induced) throw Error(ErrorCode::InvalidArgument, "induced loss needs a decision problem");
  return LossId{kind, std::nullopt};
}

LossId LossId::induced(DecisionProblem problem) { return LossId{LossKind::Induced, std::move(problem)}; }

std::string LossId::name() const {
  if (kind != LossKind::Induced) return std::string(to_string(kind));
  return "induced[" + std::to_string(problem->actions()) + "x" + std::to_string(problem->classes()) + "]";
}

double log_loss(std::span<const double> p, std::size_t y) noexcept {
  if (p[y] <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(p[y]);
}

double brier_loss(std::span<const double> p, std::size_t y) noexcept {
  double total = 0.0;
  for (std::size_t r = 0; r < p.size(); ++r) {
    const double d = p[r] - (r == y ? 1.0 : 0.0);
    total += d * d;
  }
  return total;
}

double classification_error(std::span<const double> p, std::size_t y) noexcept {
  return argmax_smallest_index(p) == y ? 0.0 : 1.0;
}

double spherical_loss(std::span<const double> p, std::size_t y) noexcept {
  double sq = 0.0;
  for (double x : p) sq += x * x;
  return 1.0 - p[y] / std::sqrt(sq);
}

std::size_t best_response(const DecisionProblem& dp, std::span<const double> q) {
  if (q.size() != dp.classes()) throw Error(ErrorCode::DimensionMismatch, "report dimension differs from problem");
  std::size_t best = 0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < dp.actions(); ++a) {
    double risk = 0.0;
    for (std::size_t y = 0; y < q.size(); ++y) risk += q[y] * dp.loss(a, y);
    if (risk < best_risk) {
      best_risk = risk;
      best = a;
    }
  }
  return best;
}

double induced_loss(const DecisionProblem& dp, std::span<const double> q, std::size_t y) {
  if (y >= dp.classes()) throw Error(ErrorCode::DimensionMismatch, "outcome outside problem classes");
  return dp.loss(best_response(dp, q), y);
}

double loss_value(const LossId& loss, std::span<const double> report, std::size_t y) {
  switch (loss.kind) {
    case LossKind::Log: return log_loss(report, y);
    case LossKind::Brier: return brier_loss(report, y);
    case LossKind::Classification: return classification_error(report, y);
    case LossKind::Spherical: return spherical_loss(report, y);
    case LossKind::Induced: return induced_loss(*loss.problem, report, y);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown loss");
}

LossFunction as_function(const LossId& loss) {
  return [loss](std::span<const double> report, std::size_t y) { return loss_value(loss, report, y); };
}

double expected_loss(const LossFunction& loss, std::span<const double> p_true, std::span<const double> report) {
  if (p_true.size() != report.size()) throw Error(ErrorCode::DimensionMismatch, "truth and report dimensions differ");
  double total = 0.0;
  for (std::size_t y = 0; y < p_true.size(); ++y) {
    if (p_true[y] == 0.0) continue;
    total += p_true[y] * loss(report, y);
  }
  return total;
}

double expected_loss(const LossId& loss, const SimplexVector& p_true, const SimplexVector& report) {
  return expected_loss(as_function(loss), p_true.probs(), report.probs());
}

std::vector<std::vector<double>> simplex_grid(std::size_t k, std::size_t steps) {
  if (k < 2) throw Error(ErrorCode::DimensionTooSmall, "grid needs k >= 2");
  if (steps == 0) throw Error(ErrorCode::InvalidArgument, "grid needs at least one step");
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> counts(k, 0);
  const double denom = static_cast<double>(steps);
  // Recursive enumeration of compositions of `steps` into k parts.
  auto fill = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == k) {
      counts[pos] = remaining;
      std::vector<double> point(k);
      for (std::size_t r = 0; r < k; ++r) point[r] = static_cast<double>(counts[r]) / denom;
      out.push_back(std::move(point));
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  fill(fill, 0, steps);
  return out;
}

PropernessReport properness_probe(const LossFunction& loss, const PropernessConfig& config) {
  if (!(config.grid_step > 0.0 && config.grid_step <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "grid step must lie in (0, 1]");
  }
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / config.grid_step));
  const auto truths = simplex_grid(config.k, steps);

  auto reports = truths;
  CounterRng rng(config.seed, 0);
  for (std::size_t t = 0; t < truths.size() * config.random_reports; ++t) {
    reports.push_back(rng.dirichlet_flat(config.k));
  }

  // Loss vectors l(q, .) for every report, computed once.
  const auto k = config.k;
  std::vector<double> loss_table(reports.size() * k);
  for (std::size_t q = 0; q < reports.size(); ++q) {
    for (std::size_t y = 0; y < k; ++y) loss_table[q * k + y] = loss(reports[q], y);
  }
  auto expected = [&](const std::vector<double>& p, std::size_t q) {
    double total = 0.0;
    for (std::size_t y = 0; y < k; ++y) {
      if (p[y] == 0.0) continue;
      total += p[y] * loss_table[q * k + y];
    }
    return total;
  };

  PropernessReport report;
  report.grid_points = truths.size();
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < truths.size(); ++t) {
    const double honest = expected(truths[t], t);
    for (std::size_t q = 0; q < reports.size(); ++q) {
      ++report.pairs_checked;
      const double deviated = expected(truths[t], q);
      double slack = deviated - honest;
      if (std::isnan(slack)) slack = 0.0;  // both infinite
      if (slack < report.min_slack) report.min_slack = slack;
      if (slack < -config.tolerance) {
        ++report.violations;
        if (!report.worst || slack < report.worst->slack) {
          report.worst = ProperViolation{truths[t], reports[q], slack};
        }
      } else if (slack < 0.0) {
        ++report.within_tolerance;
      }
    }
  }
  return report;
}

PropernessReport properness_probe(const LossId& loss, const PropernessConfig& config) {
  return properness_probe(as_function(loss), config);
}

}  // namespace truecal
