#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "binning.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "oracle.hpp"
#include "parallel.hpp"

namespace truecal {

namespace {

// Terms of the type-count enumeration whose probability falls below this are
// dropped. Their total mass is bounded by (n + 1)^2 * e^kLogPrune.
constexpr double kLogPrune = -80.0;

std::size_t next_class(std::size_t x, std::size_t k) noexcept { return x + 1 == k ? 0 : x + 1; }

void require(bool ok, ErrorCode code, const char* message) {
  if (!ok) throw Error(code, message);
}

std::vector<double> prediction_row(const SyntheticPredictorSpec& spec, std::size_t x0) {
  const std::size_t k = spec.k;
  std::vector<double> row(k, 0.0);
  switch (spec.family) {
    case Family::F1:
      row[x0] = 1.0 - spec.eps1;
      row[next_class(x0, k)] += spec.eps1;
      break;
    case Family::F2:
      row[x0] = 1.0 - spec.eps1 - spec.eps2;
      row[next_class(x0, k)] += spec.eps1 + spec.eps2;
      break;
    case Family::F3:
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(k));
      break;
    case Family::F4: {
      const double base = 1.0 / static_cast<double>(k);
      std::fill(row.begin(), row.end(), base - spec.eps3);
      row[0] = base + static_cast<double>(k - 1) * spec.eps3;
      break;
    }
  }
  return row;
}

std::vector<std::vector<double>> prediction_table(const SyntheticPredictorSpec& spec) {
  std::vector<std::vector<double>> rows;
  rows.reserve(spec.k);
  for (std::size_t x = 0; x < spec.k; ++x) rows.push_back(prediction_row(spec, x));
  return rows;
}

void check_pair(const SyntheticWorld& world, const SyntheticPredictorSpec& spec) {
  world.validate();
  spec.validate();
  require(world.k == spec.k, ErrorCode::InvalidSpec, "world and predictor disagree on k");
}

MonteCarloResult summarize(std::span<const double> values, std::uint64_t seed) {
  const auto stats = mean_and_std_error(values);
  return MonteCarloResult{stats.mean, stats.std_error, values.size(), seed};
}

// Values of one binary reduction of a synthetic predictor, grouped by exact
// prediction value. Each group has a feature-mass and a mean truth.
struct ValueType {
  double value = 0.0;
  double prob = 0.0;
  double truth = 0.0;
};

std::vector<ValueType> reduction_types(const SyntheticWorld& world, const std::vector<std::vector<double>>& table,
                                       std::optional<std::size_t> cls) {
  const std::size_t k = world.k;
  std::map<double, std::pair<std::size_t, double>> groups;
  for (std::size_t x = 0; x < k; ++x) {
    const auto& row = table[x];
    const std::size_t target = cls ? *cls : argmax_smallest_index(row);
    const double v = row[target] == 0.0 ? 0.0 : row[target];
    auto& g = groups[v];
    g.first += 1;
    g.second += world.conditional(x, target);
  }
  std::vector<ValueType> types;
  for (const auto& [v, g] : groups) {
    types.push_back(ValueType{v, static_cast<double>(g.first) / static_cast<double>(k),
                              g.second / static_cast<double>(g.first)});
  }
  return types;
}

// sum_j (sum over bin j of per-sample bias)^2 when the sorted ranks are laid
// out as contiguous runs of the given type counts.
double bias_square_sum(std::span<const std::size_t> counts, std::span<const double> biases,
                       std::span<const std::size_t> bounds) {
  double total = 0.0;
  std::size_t t = 0;
  std::size_t run_start = 0;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const std::size_t lo = bounds[j];
    const std::size_t hi = bounds[j + 1];
    double s = 0.0;
    while (t < counts.size()) {
      const std::size_t run_end = run_start + counts[t];
      const std::size_t a = std::max(lo, run_start);
      const std::size_t b = std::min(hi, run_end);
      if (b > a) s += biases[t] * static_cast<double>(b - a);
      if (run_end > hi) break;
      run_start = run_end;
      ++t;
    }
    total += s * s;
  }
  return total;
}

double log_factorial(std::size_t c) { return std::lgamma(static_cast<double>(c) + 1.0); }

double expected_reduction_l2(const std::vector<ValueType>& types, std::size_t n, std::size_t m) {
  const double nd = static_cast<double>(n);
  const auto bounds = quantile_bounds(n, m);

  double variance = 0.0;
  std::vector<double> biases;
  std::vector<double> log_probs;
  for (const auto& t : types) {
    variance += t.prob * t.truth * (1.0 - t.truth);
    biases.push_back(t.value - t.truth);
    log_probs.push_back(std::log(t.prob));
  }
  variance *= nd;

  if (std::all_of(biases.begin(), biases.end(), [](double b) { return b == 0.0; })) {
    return variance / (nd * nd);
  }

  CompensatedSum bias;
  const double log_n_fact = log_factorial(n);
  std::vector<std::size_t> counts(types.size());
  switch (types.size()) {
    case 1: {
      counts[0] = n;
      bias.add(bias_square_sum(counts, biases, bounds));
      break;
    }
    case 2: {
      for (std::size_t c0 = 0; c0 <= n; ++c0) {
        const std::size_t c1 = n - c0;
        const double lp = log_n_fact - log_factorial(c0) - log_factorial(c1) + static_cast<double>(c0) * log_probs[0] +
                          static_cast<double>(c1) * log_probs[1];
        if (lp < kLogPrune) continue;
        counts[0] = c0;
        counts[1] = c1;
        bias.add(std::exp(lp) * bias_square_sum(counts, biases, bounds));
      }
      break;
    }
    case 3: {
      for (std::size_t c0 = 0; c0 <= n; ++c0) {
        // Marginal of c0 is Binomial(n, p0); skip whole slices early.
        const double log_rest = std::log1p(-types[0].prob);
        const double lp0 = log_n_fact - log_factorial(c0) - log_factorial(n - c0) +
                           static_cast<double>(c0) * log_probs[0] + static_cast<double>(n - c0) * log_rest;
        if (lp0 < kLogPrune) continue;
        for (std::size_t c1 = 0; c0 + c1 <= n; ++c1) {
          const std::size_t c2 = n - c0 - c1;
          const double lp = log_n_fact - log_factorial(c0) - log_factorial(c1) - log_factorial(c2) +
                            static_cast<double>(c0) * log_probs[0] + static_cast<double>(c1) * log_probs[1] +
                            static_cast<double>(c2) * log_probs[2];
          if (lp < kLogPrune) continue;
          counts[0] = c0;
          counts[1] = c1;
          counts[2] = c2;
          bias.add(std::exp(lp) * bias_square_sum(counts, biases, bounds));
        }
      }
      break;
    }
    default:
      throw Error(ErrorCode::InvalidSpec, "exact expectation supports at most three prediction values per reduction");
  }
  return (bias.value() + variance) / (nd * nd);
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void SyntheticWorld::validate() const {
  require(k >= 2, ErrorCode::InvalidSpec, "world needs k >= 2");
  require(std::isfinite(eps1) && eps1 >= 0.0 && eps1 <= 1.0, ErrorCode::InvalidSpec, "world eps1 must lie in [0, 1]");
}

double SyntheticWorld::conditional(std::size_t x, std::size_t y) const noexcept {
  double p = 0.0;
  if (y == x) p += 1.0 - eps1;
  if (y == next_class(x, k)) p += eps1;
  return p;
}

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::F1: return "f1";
    case Family::F2: return "f2";
    case Family::F3: return "f3";
    case Family::F4: return "f4";
  }
  return "f1";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  for (Family f : {Family::F1, Family::F2, Family::F3, Family::F4}) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

void SyntheticPredictorSpec::validate() const {
  require(k >= 2, ErrorCode::InvalidSpec, "predictor needs k >= 2");
  require(std::isfinite(eps1) && std::isfinite(eps2) && std::isfinite(eps3), ErrorCode::InvalidSpec,
          "eps values must be finite");
  switch (family) {
    case Family::F1:
      require(eps1 >= 0.0 && eps1 < 0.5, ErrorCode::InvalidSpec, "f1 needs 0 <= eps1 < 1/2");
      break;
    case Family::F2:
      require(eps1 >= 0.0 && eps1 < 0.5, ErrorCode::InvalidSpec, "f2 needs 0 <= eps1 < 1/2");
      require(eps2 >= 0.0 && eps1 + eps2 < 1.0, ErrorCode::InvalidSpec, "f2 needs eps2 >= 0 and eps1 + eps2 < 1");
      break;
    case Family::F3:
      break;
    case Family::F4:
      require(eps3 >= 0.0 && 1.0 / static_cast<double>(k) - eps3 >= 0.0, ErrorCode::InvalidSpec,
              "f4 needs 0 <= eps3 <= 1/k");
      break;
  }
}

SimplexVector predict(const SyntheticPredictorSpec& spec, std::size_t x) {
  spec.validate();
  if (x < 1 || x > spec.k) throw Error(ErrorCode::InvalidSpec, "feature must lie in 1..k");
  return SimplexVector::validate(prediction_row(spec, x - 1));
}

WorldSample draw_world(const SyntheticWorld& world, std::size_t n, CounterRng& rng) {
  WorldSample out;
  out.features.resize(n);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = static_cast<std::uint32_t>(rng.below(world.k));
    const bool flip = rng.bernoulli(world.eps1);
    out.features[i] = x;
    out.labels[i] = flip ? static_cast<std::uint32_t>(next_class(x, world.k)) : x;
  }
  return out;
}

namespace {

LabeledDataset dataset_from_table(const std::vector<std::vector<double>>& table, const WorldSample& sample) {
  const std::size_t n = sample.features.size();
  const std::size_t k = table.size();
  std::vector<double> flat;
  flat.reserve(n * k);
  std::vector<long long> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table[sample.features[i]];
    flat.insert(flat.end(), row.begin(), row.end());
    labels[i] = sample.labels[i];
  }
  return LabeledDataset::from_flat(flat, labels, k, LabelBase::Zero);
}

}  // namespace

LabeledDataset predict_dataset(const SyntheticPredictorSpec& spec, const WorldSample& sample) {
  spec.validate();
  return dataset_from_table(prediction_table(spec), sample);
}

LabeledDataset sample_dataset(const SyntheticWorld& world, const SyntheticPredictorSpec& spec, std::size_t n,
                              std::uint64_t seed) {
  check_pair(world, spec);
  require(n >= 1, ErrorCode::InvalidSpec, "n must be at least 1");
  CounterRng rng(seed, 0);
  return dataset_from_table(prediction_table(spec), draw_world(world, n, rng));
}

std::vector<MonteCarloResult> mc_sweep(MeasureKind kind, Aggregation agg, const SyntheticWorld& world,
                                       const SyntheticPredictorSpec& spec, std::size_t n,
                                       std::span<const std::size_t> bins, std::size_t trials, std::uint64_t seed) {
  check_pair(world, spec);
  require(n >= 1, ErrorCode::InvalidSpec, "n must be at least 1");
  if (trials < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least 2 trials");
  for (std::size_t m : bins) BinaryMeasure{kind, m}.validate();

  const auto table = prediction_table(spec);
  const std::size_t width = bins.size();
  std::vector<double> values(trials * width);
  parallel_for(trials, [&](std::size_t t) {
    CounterRng rng(seed, t);
    const auto ds = dataset_from_table(table, draw_world(world, n, rng));
    const auto row = sweep_values(kind, agg, ds, bins);
    std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(t * width));
  });

  std::vector<MonteCarloResult> out;
  std::vector<double> column(trials);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t t = 0; t < trials; ++t) column[t] = values[t * width + j];
    out.push_back(summarize(column, seed));
  }
  return out;
}

MonteCarloResult mc_expected_error(const MeasureSpec& measure, const SyntheticWorld& world,
                                   const SyntheticPredictorSpec& spec, std::size_t n, std::size_t trials,
                                   std::uint64_t seed) {
  const std::size_t bins[] = {measure.measure.bins};
  return mc_sweep(measure.measure.kind, measure.aggregation, world, spec, n, bins, trials, seed).front();
}

double exact_expected_l2(const SyntheticWorld& world, const SyntheticPredictorSpec& spec, Aggregation agg,
                         std::size_t n, std::size_t m) {
  check_pair(world, spec);
  require(n >= 1, ErrorCode::InvalidSpec, "n must be at least 1");
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "bin count must be at least 1");
  const auto table = prediction_table(spec);
  if (agg == Aggregation::Confidence) return expected_reduction_l2(reduction_types(world, table, std::nullopt), n, m);
  CompensatedSum total;
  for (std::size_t r = 0; r < world.k; ++r) total.add(expected_reduction_l2(reduction_types(world, table, r), n, m));
  return total.value() / static_cast<double>(world.k);
}

std::string_view to_string(Table1Column c) noexcept {
  switch (c) {
    case Table1Column::L1Confidence: return "l1_conf";
    case Table1Column::L1Classwise: return "l1_classwise";
    case Table1Column::L2Confidence: return "l2_conf";
    case Table1Column::L2Classwise: return "l2_classwise";
  }
  return "l2_classwise";
}

std::optional<Table1Column> parse_table1_column(std::string_view name) noexcept {
  for (auto c : {Table1Column::L1Confidence, Table1Column::L1Classwise, Table1Column::L2Confidence,
                 Table1Column::L2Classwise}) {
    if (name == to_string(c)) return c;
  }
  if (name == "l1_confidence") return Table1Column::L1Confidence;
  if (name == "l2_confidence") return Table1Column::L2Confidence;
  return std::nullopt;
}

Table1Entry table1_closed_form(const SyntheticPredictorSpec& spec, Table1Column column, std::size_t n,
                               std::size_t m) {
  spec.validate();
  require(n >= 1, ErrorCode::InvalidSpec, "n must be at least 1");
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "bin count must be at least 1");
  const double k = static_cast<double>(spec.k);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const bool informative = spec.family == Family::F1 || spec.family == Family::F2;
  // Outcome variance of the calibrated parent (f1 for f2, f3 for f4).
  const double var = informative ? (1.0 - spec.eps1) * spec.eps1 : (1.0 / k) * (1.0 - 1.0 / k);
  const std::string var_text = informative ? "(1-eps1)eps1" : "(1-1/k)(1/k)";

  Table1Entry e;
  switch (column) {
    case Table1Column::L2Confidence: {
      e.exact = true;
      e.value = var / nd;
      if (spec.family == Family::F2) e.value += spec.eps2 * spec.eps2 / md;
      if (spec.family == Family::F4) e.value += (k - 1.0) * (k - 1.0) * spec.eps3 * spec.eps3 / md;
      break;
    }
    case Table1Column::L2Classwise: {
      e.exact = true;
      e.value = informative ? 2.0 * var / (k * nd) : (1.0 - 1.0 / k) / (k * nd);
      if (spec.family == Family::F2) e.value += 2.0 * spec.eps2 * spec.eps2 / (k * md);
      if (spec.family == Family::F4) e.value += (k - 1.0) * spec.eps3 * spec.eps3 / md;
      break;
    }
    case Table1Column::L1Confidence: {
      e.sampling_scale = std::sqrt(var * md / nd);
      std::string lead;
      if (spec.family == Family::F2) {
        e.value = spec.eps2;
        lead = "eps2 + ";
      } else if (spec.family == Family::F4) {
        e.value = (k - 1.0) * spec.eps3;
        lead = "(k-1)eps3 + ";
      }
      e.descriptor = lead + "Theta(sqrt(" + var_text + " m/n))";
      break;
    }
    case Table1Column::L1Classwise: {
      e.sampling_scale = std::sqrt(var * md / nd) / k;
      std::string lead;
      if (spec.family == Family::F2) {
        e.value = 2.0 * spec.eps2 / k;
        lead = "2eps2/k + ";
      } else if (spec.family == Family::F4) {
        e.value = 2.0 * (k - 1.0) * spec.eps3 / k;
        lead = "2(k-1)eps3/k + ";
      }
      e.descriptor = lead + "Theta((1/k) sqrt(" + var_text + " m/n))";
      break;
    }
  }
  if (e.exact) e.descriptor = format_real(e.value);
  return e;
}

double table1_exact(const SyntheticPredictorSpec& spec, Table1Column column, std::size_t n, std::size_t m) {
  if (column == Table1Column::L1Confidence || column == Table1Column::L1Classwise) {
    throw Error(ErrorCode::UnsupportedColumn, "l1 columns are asymptotic only");
  }
  return table1_closed_form(spec, column, n, m).value;
}

double world_expected_loss(const SyntheticWorld& world, const SyntheticPredictorSpec& spec, const LossId& loss) {
  check_pair(world, spec);
  const auto table = prediction_table(spec);
  const auto fn = as_function(loss);
  CompensatedSum total;
  for (std::size_t x = 0; x < world.k; ++x) {
    for (std::size_t y = 0; y < world.k; ++y) {
      const double p = world.conditional(x, y);
      if (p == 0.0) continue;
      total.add(p * fn(table[x], y));
    }
  }
  return total.value() / static_cast<double>(world.k);
}

BrierIdentityReport brier_identity_check(const SyntheticWorld& world, const SyntheticPredictorSpec& spec,
                                         std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed) {
  if (spec.family == Family::F2 || spec.family == Family::F4) {
    throw Error(ErrorCode::InvalidSpec, "Brier identity needs a calibrated predictor (f1 or f3)");
  }
  check_pair(world, spec);
  BrierIdentityReport r;
  r.expected_brier = world_expected_loss(world, spec, LossId::named(LossKind::Brier));
  r.identity_value = r.expected_brier / (static_cast<double>(world.k) * static_cast<double>(n));
  r.mc = mc_expected_error(MeasureSpec{BinaryMeasure{MeasureKind::L2Qece, m}, Aggregation::Classwise}, world, spec, n,
                           trials, seed);
  const double diff = r.mc.estimate - r.identity_value;
  if (r.mc.std_error > 0.0) {
    r.z_score = diff / r.mc.std_error;
  } else {
    r.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  r.within_three_se = std::abs(diff) <= 3.0 * r.mc.std_error;
  return r;
}

DominanceReport dominance_check(const SyntheticWorld& world, const SyntheticPredictorSpec& a,
                                const SyntheticPredictorSpec& b, const DominanceConfig& config) {
  check_pair(world, a);
  check_pair(world, b);
  if (config.max_actions < 2) throw Error(ErrorCode::InvalidArgument, "induced losses need at least 2 actions");

  std::vector<LossId> losses;
  for (auto kind : {LossKind::Log, LossKind::Brier, LossKind::Spherical, LossKind::Classification}) {
    losses.push_back(LossId::named(kind));
  }
  for (std::size_t i = 0; i < config.random_losses; ++i) {
    CounterRng rng(config.seed, i);
    const std::size_t actions = 2 + static_cast<std::size_t>(rng.below(config.max_actions - 1));
    losses.push_back(LossId::induced(DecisionProblem::random(rng, actions, world.k)));
  }

  DominanceReport report;
  report.a_dominates_b = true;
  report.all_ties = true;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    DominanceEntry e;
    e.loss = i < 4 ? losses[i].name() : "induced[" + std::to_string(i - 4) + "]";
    e.loss_a = world_expected_loss(world, a, losses[i]);
    e.loss_b = world_expected_loss(world, b, losses[i]);
    // inf - inf: both predictors pay infinite loss, which is a tie.
    e.margin = (std::isinf(e.loss_a) && e.loss_a == e.loss_b) ? 0.0 : e.loss_b - e.loss_a;
    if (e.margin < -config.tolerance) report.a_dominates_b = false;
    if (e.margin > config.tolerance) report.strict_somewhere = true;
    if (std::abs(e.margin) > config.tolerance) report.all_ties = false;
    report.entries.push_back(std::move(e));
  }
  return report;
}

RankingFlipTable ranking_flip_experiment(MeasureKind kind, Aggregation agg, const SyntheticWorld& world,
                                         const SyntheticPredictorSpec& a, const SyntheticPredictorSpec& b,
                                         std::size_t n, std::span<const std::size_t> bins, std::size_t trials,
                                         std::uint64_t seed) {
  check_pair(world, a);
  check_pair(world, b);
  require(n >= 1, ErrorCode::InvalidSpec, "n must be at least 1");
  if (trials < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least 2 trials");
  for (std::size_t m : bins) BinaryMeasure{kind, m}.validate();

  const auto table_a = prediction_table(a);
  const auto table_b = prediction_table(b);
  const std::size_t width = bins.size();
  std::vector<double> va(trials * width);
  std::vector<double> vb(trials * width);
  parallel_for(trials, [&](std::size_t t) {
    CounterRng rng(seed, t);
    const auto sample = draw_world(world, n, rng);
    const auto ra = sweep_values(kind, agg, dataset_from_table(table_a, sample), bins);
    const auto rb = sweep_values(kind, agg, dataset_from_table(table_b, sample), bins);
    std::copy(ra.begin(), ra.end(), va.begin() + static_cast<std::ptrdiff_t>(t * width));
    std::copy(rb.begin(), rb.end(), vb.begin() + static_cast<std::ptrdiff_t>(t * width));
  });

  RankingFlipTable out;
  std::vector<double> ca(trials), cb(trials), cd(trials);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t t = 0; t < trials; ++t) {
      ca[t] = va[t * width + j];
      cb[t] = vb[t * width + j];
      cd[t] = ca[t] - cb[t];
    }
    RankingFlipRow row;
    row.m = bins[j];
    row.a = summarize(ca, seed);
    row.b = summarize(cb, seed);
    row.difference = summarize(cd, seed);
    row.order = (row.difference.estimate > 0.0) - (row.difference.estimate < 0.0);
    if (!out.rows.empty() && !out.crossover_m && row.order != out.rows.front().order) out.crossover_m = row.m;
    out.rows.push_back(row);
  }
  return out;
}

Example1Report example1_replication(std::size_t n, std::size_t trials, std::uint64_t seed,
                                    std::span<const std::size_t> bins) {
  require(n >= 1, ErrorCode::InvalidSpec, "n must be at least 1");
  if (trials < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least 2 trials");
  std::vector<double> truth(n);
  for (std::size_t i = 0; i < n; ++i) truth[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  const std::vector<double> constant(n, 0.5);

  std::vector<double> raw_truth(trials), raw_constant(trials);
  parallel_for(trials, [&](std::size_t t) {
    CounterRng rng(seed, t);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.bernoulli(truth[i]) ? 1 : 0;
    raw_truth[t] = raw_ece(BinaryDataset(truth, y)).value;
    raw_constant[t] = raw_ece(BinaryDataset(constant, y)).value;
  });

  Example1Report out;
  out.truth_raw_ece = summarize(raw_truth, seed);
  out.constant_raw_ece = summarize(raw_constant, seed);
  for (std::size_t m : bins) {
    out.bins.push_back(m);
    out.truth_l2.push_back(expected_l2_binary(truth, truth, m));
    out.constant_l2.push_back(expected_l2_binary(constant, truth, m));
  }
  return out;
}

CalibrationCheck classwise_calibration(const SyntheticWorld& world, const SyntheticPredictorSpec& spec,
                                       double tolerance) {
  check_pair(world, spec);
  const auto table = prediction_table(spec);
  CalibrationCheck out;
  for (std::size_t r = 0; r < world.k; ++r) {
    for (const auto& t : reduction_types(world, table, r)) {
      out.max_deviation = std::max(out.max_deviation, std::abs(t.truth - t.value));
    }
  }
  out.calibrated = out.max_deviation <= tolerance;
  return out;
}

}  // namespace truecal
