#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"
#include "numeric.hpp"

namespace truecal {

ProfileOfDistributions::ProfileOfDistributions(std::vector<SimplexVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw Error(ErrorCode::EmptyDataset, "profile needs at least one row");
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].size() != rows_.front().size()) {
      throw Error(ErrorCode::DimensionMismatch, "profile rows do not share k", i);
    }
  }
}

ProfileOfDistributions ProfileOfDistributions::binary(std::span<const double> positive_probs) {
  std::vector<SimplexVector> rows;
  rows.reserve(positive_probs.size());
  for (double q : positive_probs) {
    const double pair[] = {1.0 - q, q};
    rows.push_back(SimplexVector::validate(pair));
  }
  return ProfileOfDistributions(std::move(rows));
}

namespace {

void check_shapes(const GroundTruthModel& truth, const ReportProfile& reports) {
  if (truth.size() != reports.size()) throw Error(ErrorCode::DimensionMismatch, "truth and report counts differ");
  if (truth.classes() != reports.classes()) throw Error(ErrorCode::DimensionMismatch, "truth and report k differ");
}

std::uint64_t outcome_count(std::size_t k, std::size_t n, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > budget / k) {
      throw Error(ErrorCode::BudgetExceeded, "k^n = " + std::to_string(k) + "^" + std::to_string(n) +
                                                 " exceeds enumeration budget " + std::to_string(budget));
    }
    total *= k;
  }
  if (total > budget) throw Error(ErrorCode::BudgetExceeded, "k^n exceeds enumeration budget");
  return total;
}

// Binary reductions of the report profile; only outcomes change between
// enumerated outcome vectors, so predictions, reduction classes and sort
// orders are computed once.
struct PreparedReports {
  std::vector<std::vector<double>> predictions;  // per reduction
  std::vector<std::vector<std::size_t>> target;  // per reduction: class whose event is y = 1
  std::vector<SortedView> views;
};

PreparedReports prepare(Aggregation agg, const ReportProfile& reports) {
  PreparedReports out;
  const auto n = reports.size();
  const auto k = reports.classes();
  auto add = [&](std::vector<double> p, std::vector<std::size_t> cls) {
    BinaryDataset probe(p, std::vector<std::uint8_t>(n, 0));
    out.views.push_back(sort_by_prediction(probe));
    out.predictions.push_back(std::move(p));
    out.target.push_back(std::move(cls));
  };
  if (agg == Aggregation::Confidence) {
    std::vector<double> p(n);
    std::vector<std::size_t> cls(n);
    for (std::size_t i = 0; i < n; ++i) {
      cls[i] = argmax_smallest_index(reports[i].probs());
      p[i] = reports[i][cls[i]];
    }
    add(std::move(p), std::move(cls));
  } else {
    for (std::size_t r = 0; r < k; ++r) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = reports[i][r];
      add(std::move(p), std::vector<std::size_t>(n, r));
    }
  }
  return out;
}

double evaluate_prepared(const BinaryMeasure& measure, const PreparedReports& prep,
                         std::span<const std::uint32_t> labels) {
  const auto n = labels.size();
  std::vector<double> values;
  values.reserve(prep.predictions.size());
  std::vector<std::uint8_t> y(n);
  for (std::size_t c = 0; c < prep.predictions.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == prep.target[c][i] ? 1 : 0;
    BinaryDataset ds(prep.predictions[c], y);
    values.push_back(measure_value(measure, ds, prep.views[c]));
  }
  return compensated_sum(values) / static_cast<double>(values.size());
}

}  // namespace

double exact_expected_measure(const MeasureSpec& spec, const GroundTruthModel& truth, const ReportProfile& reports,
                              std::uint64_t budget) {
  check_shapes(truth, reports);
  spec.measure.validate();
  const auto n = truth.size();
  const auto k = truth.classes();
  const auto total = outcome_count(k, n, budget);
  const auto prep = prepare(spec.aggregation, reports);

  std::vector<std::uint32_t> labels(n, 0);
  CompensatedSum acc;
  for (std::uint64_t step = 0; step < total; ++step) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n && prob != 0.0; ++i) prob *= truth[i][labels[i]];
    if (prob != 0.0) acc.add(prob * evaluate_prepared(spec.measure, prep, labels));
    // Odometer increment, last sample fastest.
    for (std::size_t i = n; i-- > 0;) {
      if (++labels[i] < k) break;
      labels[i] = 0;
    }
  }
  return acc.value();
}

double exact_expected_binary(const BinaryMeasure& measure, std::span<const double> truths,
                             std::span<const double> reports, std::uint64_t budget) {
  if (truths.size() != reports.size()) throw Error(ErrorCode::DimensionMismatch, "truth and report counts differ");
  measure.validate();
  const auto n = truths.size();
  const auto total = outcome_count(2, n, budget);
  std::vector<double> p(reports.begin(), reports.end());
  BinaryDataset probe(p, std::vector<std::uint8_t>(n, 0));
  const auto view = sort_by_prediction(probe);
  std::vector<std::uint8_t> y(n, 0);
  CompensatedSum acc;
  for (std::uint64_t step = 0; step < total; ++step) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n && prob != 0.0; ++i) prob *= y[i] ? truths[i] : 1.0 - truths[i];
    if (prob != 0.0) acc.add(prob * measure_value(measure, BinaryDataset(p, y), view));
    for (std::size_t i = n; i-- > 0;) {
      if (++y[i] < 2) break;
      y[i] = 0;
    }
  }
  return acc.value();
}

double closed_form_l2qece(std::span<const double> positive_probs) {
  if (positive_probs.empty()) throw Error(ErrorCode::EmptyDataset, "closed form needs n >= 1");
  CompensatedSum acc;
  for (double p : positive_probs) acc.add(p * (1.0 - p));
  const double n = static_cast<double>(positive_probs.size());
  return acc.value() / (n * n);
}

double expected_l2_binary(std::span<const double> reports, std::span<const double> truths, std::size_t m,
                          BinningScheme scheme) {
  if (reports.size() != truths.size()) throw Error(ErrorCode::DimensionMismatch, "report and truth counts differ");
  const auto n = reports.size();
  BinaryDataset probe(std::vector<double>(reports.begin(), reports.end()), std::vector<std::uint8_t>(n, 0));
  const auto view = sort_by_prediction(probe);
  const auto bins = scheme == BinningScheme::Quantile ? quantile_bins(view, m) : fixed_bins(probe, view, m);
  CompensatedSum total;
  for (const auto& bin : bins.bins) {
    CompensatedSum bias;
    for (auto i : bin) bias.add(reports[i] - truths[i]);
    const double b = bias.value();
    total.add(b * b);
  }
  for (std::size_t i = 0; i < n; ++i) total.add(truths[i] * (1.0 - truths[i]));
  const double dn = static_cast<double>(n);
  return total.value() / (dn * dn);
}

double expected_l2(Aggregation agg, const GroundTruthModel& truth, const ReportProfile& reports, std::size_t m,
                   BinningScheme scheme) {
  check_shapes(truth, reports);
  const auto n = truth.size();
  std::vector<double> q(n), p(n);
  if (agg == Aggregation::Confidence) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto top = argmax_smallest_index(reports[i].probs());
      q[i] = reports[i][top];
      p[i] = truth[i][top];
    }
    return expected_l2_binary(q, p, m, scheme);
  }
  std::vector<double> per_class;
  for (std::size_t r = 0; r < truth.classes(); ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = reports[i][r];
      p[i] = truth[i][r];
    }
    per_class.push_back(expected_l2_binary(q, p, m, scheme));
  }
  return compensated_sum(per_class) / static_cast<double>(per_class.size());
}

std::string_view to_string(DeviationStrategy s) noexcept {
  switch (s) {
    case DeviationStrategy::RandomMixture: return "random_mixture";
    case DeviationStrategy::ConstantUniform: return "constant_uniform";
    case DeviationStrategy::ArgmaxFlip: return "argmax_flip";
    case DeviationStrategy::CoordinateBias: return "coordinate_bias";
  }
  return "unknown";
}

namespace {

std::vector<double> mixture_toward(std::span<const double> p, std::span<const double> target, double lambda) {
  std::vector<double> q(p.size());
  for (std::size_t r = 0; r < p.size(); ++r) q[r] = (1.0 - lambda) * p[r] + lambda * target[r];
  return q;
}

std::vector<double> flip_argmax(std::span<const double> p, CounterRng& rng) {
  const auto k = p.size();
  const auto top = argmax_smallest_index(p);
  auto c = static_cast<std::size_t>(rng.below(k - 1));
  if (c >= top) ++c;
  std::vector<double> e(k, 0.0);
  e[c] = 1.0;
  if (rng.bernoulli(0.5)) {
    // Smallest move toward e_c that makes c the argmax by a margin eta.
    const double eta = 1e-6 + 0.2 * rng.uniform();
    double rival = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      if (r != c) rival = std::max(rival, p[r]);
    }
    double lambda = (rival - p[c] + eta) / (1.0 + rival - p[c]);
    lambda = std::clamp(lambda, 0.0, 1.0);
    return mixture_toward(p, e, lambda);
  }
  // Near-uniform report tilted toward c.
  const double eta = 1e-4 + 0.3 * rng.uniform();
  std::vector<double> u(k, 1.0 / static_cast<double>(k));
  return mixture_toward(u, e, eta);
}

std::vector<double> bias_coordinates(std::span<const double> p, CounterRng& rng) {
  const auto k = p.size();
  const auto a = static_cast<std::size_t>(rng.below(k));
  auto b = static_cast<std::size_t>(rng.below(k - 1));
  if (b >= a) ++b;
  const double eps = 0.2 * rng.uniform_open_zero();
  const double shift = std::min({eps, p[b], 1.0 - p[a]});
  std::vector<double> q(p.begin(), p.end());
  q[a] += shift;
  q[b] -= shift;
  return q;
}

}  // namespace

ReportProfile make_deviation(DeviationStrategy strategy, const GroundTruthModel& truth, CounterRng& rng) {
  const auto n = truth.size();
  const auto k = truth.classes();
  std::vector<bool> chosen(n);
  if (strategy == DeviationStrategy::ConstantUniform && rng.bernoulli(0.5)) {
    chosen.assign(n, true);
  } else {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any |= (chosen[i] = rng.bernoulli(0.5));
    if (!any) chosen[rng.below(n)] = true;
  }
  std::vector<SimplexVector> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = truth[i].probs();
    if (!chosen[i]) {
      rows.push_back(truth[i]);
      continue;
    }
    std::vector<double> q;
    switch (strategy) {
      case DeviationStrategy::RandomMixture: {
        const auto d = rng.dirichlet_flat(k);
        q = mixture_toward(p, d, rng.uniform_open_zero());
        break;
      }
      case DeviationStrategy::ConstantUniform:
        q.assign(k, 1.0 / static_cast<double>(k));
        break;
      case DeviationStrategy::ArgmaxFlip:
        q = flip_argmax(p, rng);
        break;
      case DeviationStrategy::CoordinateBias:
        q = bias_coordinates(p, rng);
        break;
    }
    rows.push_back(SimplexVector::validate(q));
  }
  return ReportProfile(std::move(rows));
}

GroundTruthModel random_model(CounterRng& rng, std::size_t n, std::size_t k) {
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "model needs n >= 1");
  std::vector<SimplexVector> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    if (u < 0.1) {
      rows.push_back(SimplexVector::one_hot(k, static_cast<std::size_t>(rng.below(k))));
    } else if (u < 0.2) {
      rows.push_back(SimplexVector::uniform(k));
    } else {
      rows.push_back(SimplexVector::validate(rng.dirichlet_flat(k)));
    }
  }
  return GroundTruthModel(std::move(rows));
}

TruthfulnessReport truthfulness_probe(const MeasureSpec& spec, const GroundTruthModel& truth,
                                      std::span<const ReportProfile> deviations, double tolerance,
                                      std::uint64_t budget) {
  TruthfulnessReport report;
  report.truth_value = exact_expected_measure(spec, truth, truth, budget);
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < deviations.size(); ++d) {
    const double value = exact_expected_measure(spec, truth, deviations[d], budget);
    const double slack = value - report.truth_value;
    ++report.deviations_tested;
    if (slack < report.min_slack) {
      report.min_slack = slack;
      report.worst_deviation = deviations[d];
      report.worst_index = d;
      report.worst_value = value;
    }
    if (slack < -tolerance) {
      ++report.violations;
    } else if (slack < 0.0) {
      ++report.within_tolerance;
    }
  }
  return report;
}

TruthfulnessReport truthfulness_probe(const MeasureSpec& spec, const GroundTruthModel& truth,
                                      const TruthfulnessConfig& config) {
  constexpr DeviationStrategy kStrategies[] = {DeviationStrategy::RandomMixture, DeviationStrategy::ConstantUniform,
                                               DeviationStrategy::ArgmaxFlip, DeviationStrategy::CoordinateBias};
  std::vector<ReportProfile> deviations;
  std::vector<DeviationStrategy> strategies;
  deviations.reserve(config.deviations);
  for (std::size_t d = 0; d < config.deviations; ++d) {
    CounterRng rng(config.seed, d);
    const auto strategy = kStrategies[d % 4];
    deviations.push_back(make_deviation(strategy, truth, rng));
    strategies.push_back(strategy);
  }
  auto report = truthfulness_probe(spec, truth, deviations, config.tolerance, config.budget);
  if (report.worst_index) report.worst_strategy = strategies[*report.worst_index];
  return report;
}

WitnessSearchResult nontruthfulness_witness(const MeasureSpec& spec, const WitnessSearchConfig& config) {
  constexpr DeviationStrategy kStrategies[] = {DeviationStrategy::RandomMixture, DeviationStrategy::ConstantUniform,
                                               DeviationStrategy::ArgmaxFlip, DeviationStrategy::CoordinateBias};
  WitnessSearchResult result;
  std::uint64_t stream = 0;
  for (std::size_t n = 1; n <= config.n_max; ++n) {
    std::vector<std::size_t> bins;
    for (auto m : config.bins) {
      const auto resolved = m == 0 ? n : m;
      if (std::find(bins.begin(), bins.end(), resolved) == bins.end()) bins.push_back(resolved);
    }
    for (std::size_t model = 0; model < config.models_per_size; ++model) {
      CounterRng model_rng(config.seed, stream++);
      const auto truth = random_model(model_rng, n, config.k);
      ++result.models_searched;
      for (auto m : bins) {
        MeasureSpec at_m = spec;
        at_m.measure.bins = m;
        const double truth_value = exact_expected_measure(at_m, truth, truth, config.budget);
        for (std::size_t d = 0; d < config.deviations_per_model; ++d) {
          const auto strategy = kStrategies[d % 4];
          const auto deviation = make_deviation(strategy, truth, model_rng);
          const double value = exact_expected_measure(at_m, truth, deviation, config.budget);
          ++result.deviations_evaluated;
          const double margin = truth_value - value;
          if (margin >= config.margin && (!result.witness || margin > result.witness->margin)) {
            result.witness = Witness{truth, deviation, strategy, m, truth_value, value, margin};
          }
        }
      }
    }
  }
  return result;
}

}  // namespace truecal
