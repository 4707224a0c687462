#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "error.hpp"
#include "losses.hpp"
#include "multiclass.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

namespace truecal {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigInvalid, message); }

json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "NaN";
  return x > 0 ? "Infinity" : "-Infinity";
}

template <typename T>
T field(const json& cfg, const char* key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) config_error(std::string("\"") + key + "\" must be a non-negative integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) config_error(std::string("\"") + key + "\" must be a boolean");
    } else if constexpr (std::is_arithmetic_v<T>) {
      if (!v.is_number()) config_error(std::string("\"") + key + "\" must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) config_error(std::string("\"") + key + "\" must be a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("\"") + key + "\": " + e.what());
  }
}

std::vector<std::size_t> size_list(const json& cfg, const char* key, std::vector<std::size_t> fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_array() || v.empty()) config_error(std::string("\"") + key + "\" must be a non-empty array");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_unsigned()) config_error(std::string("\"") + key + "\" entries must be non-negative integers");
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

std::vector<std::string> string_list(const json& cfg, const char* key, std::vector<std::string> fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_array() || v.empty()) config_error(std::string("\"") + key + "\" must be a non-empty array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) config_error(std::string("\"") + key + "\" entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

MeasureKind measure_field(const json& cfg, MeasureKind fallback) {
  if (!cfg.contains("measure")) return fallback;
  const auto name = field<std::string>(cfg, "measure", "");
  const auto kind = parse_measure_kind(name);
  if (!kind) config_error("unknown measure \"" + name + "\"");
  return *kind;
}

Aggregation aggregation_field(const json& cfg, Aggregation fallback) {
  if (!cfg.contains("aggregation")) return fallback;
  const auto name = field<std::string>(cfg, "aggregation", "");
  const auto agg = parse_aggregation(name);
  if (!agg) config_error("unknown aggregation \"" + name + "\"");
  return *agg;
}

Family family_from(const std::string& name) {
  const auto f = parse_family(name);
  if (!f) config_error("unknown predictor family \"" + name + "\"");
  return *f;
}

struct WorldParams {
  std::size_t k;
  std::size_t n;
  double eps1;
  double eps2;
  double eps3;
};

WorldParams world_params(const json& cfg, std::size_t default_n) {
  WorldParams p;
  p.k = field<std::size_t>(cfg, "k", 10);
  p.n = field<std::size_t>(cfg, "n", default_n);
  if (p.n == 0) config_error("\"n\" must be at least 1");
  p.eps1 = field<double>(cfg, "eps1", 0.1);
  p.eps2 = field<double>(cfg, "eps2", 1.0 / std::sqrt(static_cast<double>(p.n)));
  p.eps3 = field<double>(cfg, "eps3", 0.05);
  return p;
}

SyntheticPredictorSpec predictor(const WorldParams& p, Family family) {
  return SyntheticPredictorSpec{family, p.k, p.eps1, p.eps2, p.eps3};
}

json world_json(const WorldParams& p) {
  return json{{"k", p.k}, {"n", p.n}, {"eps1", real(p.eps1)}, {"eps2", real(p.eps2)}, {"eps3", real(p.eps3)}};
}

json mc_json(const MonteCarloResult& r) {
  return json{{"estimate", real(r.estimate)}, {"std_error", real(r.std_error)}, {"trials", r.trials}};
}

json profile_json(const ProfileOfDistributions& profile) {
  json rows = json::array();
  for (const auto& row : profile.rows()) {
    json r = json::array();
    for (double v : row.probs()) r.push_back(real(v));
    rows.push_back(std::move(r));
  }
  return rows;
}

double z_score(double estimate, double target, double se) {
  const double diff = estimate - target;
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
}

json run_thm2_check(const json& cfg, std::uint64_t seed) {
  const auto models = field<std::size_t>(cfg, "models", 50);
  const auto n_max = field<std::size_t>(cfg, "n_max", 6);
  const auto tolerance = field<double>(cfg, "tolerance", 1e-12);
  if (n_max == 0) config_error("\"n_max\" must be at least 1");

  json rows = json::array();
  double worst = 0.0;
  for (std::size_t model = 0; model < models; ++model) {
    CounterRng rng(seed, model);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(n_max));
    const auto truth = random_model(rng, n, 2);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = truth[i][1];
    const double closed = closed_form_l2qece(q);
    for (std::size_t m = 1; m <= n; ++m) {
      const double exact = exact_expected_binary(BinaryMeasure{MeasureKind::L2Qece, m}, q, q);
      const double diff = std::abs(exact - closed);
      worst = std::max(worst, diff);
      rows.push_back(json{{"model", model}, {"n", n}, {"m", m}, {"exact", real(exact)},
                          {"closed_form", real(closed)}, {"abs_diff", real(diff)}});
    }
  }
  return json{{"cases", rows.size()},
              {"max_abs_diff", real(worst)},
              {"tolerance", real(tolerance)},
              {"passed", worst <= tolerance},
              {"rows", std::move(rows)}};
}

json run_truthfulness(const json& cfg, std::uint64_t seed) {
  const MeasureSpec base{BinaryMeasure{measure_field(cfg, MeasureKind::L2Qece), 1},
                         aggregation_field(cfg, Aggregation::Classwise)};
  const auto models = field<std::size_t>(cfg, "models", 20);
  const auto n_max = field<std::size_t>(cfg, "n_max", 4);
  const auto k_max = field<std::size_t>(cfg, "k_max", 3);
  const auto bins = size_list(cfg, "bins", {1, 2, 0});
  TruthfulnessConfig probe;
  probe.deviations = field<std::size_t>(cfg, "deviations", 200);
  probe.tolerance = field<double>(cfg, "tolerance", 1e-12);
  probe.budget = field<std::uint64_t>(cfg, "budget", kDefaultEnumerationBudget);
  if (n_max == 0 || k_max < 2) config_error("need n_max >= 1 and k_max >= 2");

  json rows = json::array();
  std::size_t violations = 0;
  std::size_t within = 0;
  double min_slack = INFINITY;
  for (std::size_t model = 0; model < models; ++model) {
    CounterRng rng(seed, model);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(n_max));
    const std::size_t k = 2 + static_cast<std::size_t>(rng.below(k_max - 1));
    const auto truth = random_model(rng, n, k);
    std::vector<std::size_t> ms;
    for (auto m : bins) {
      const auto resolved = m == 0 ? n : m;
      if (std::find(ms.begin(), ms.end(), resolved) == ms.end()) ms.push_back(resolved);
    }
    for (auto m : ms) {
      MeasureSpec spec = base;
      spec.measure.bins = m;
      probe.seed = splitmix64_mix(seed ^ (model + 1));
      const auto report = truthfulness_probe(spec, truth, probe);
      violations += report.violations;
      within += report.within_tolerance;
      min_slack = std::min(min_slack, report.min_slack);
      json row{{"model", model},
               {"n", n},
               {"k", k},
               {"m", m},
               {"truth_value", real(report.truth_value)},
               {"deviations", report.deviations_tested},
               {"violations", report.violations},
               {"within_tolerance", report.within_tolerance},
               {"min_slack", real(report.min_slack)}};
      if (report.worst_strategy) row["worst_strategy"] = std::string(to_string(*report.worst_strategy));
      rows.push_back(std::move(row));
    }
  }
  return json{{"measure", std::string(to_string(base.measure.kind))},
              {"aggregation", std::string(to_string(base.aggregation))},
              {"violations", violations},
              {"within_tolerance", within},
              {"min_slack", real(min_slack)},
              {"passed", violations == 0},
              {"rows", std::move(rows)}};
}

json run_witness(const json& cfg, std::uint64_t seed) {
  const MeasureSpec spec{BinaryMeasure{measure_field(cfg, MeasureKind::L2Qece), 1},
                         aggregation_field(cfg, Aggregation::Confidence)};
  WitnessSearchConfig search;
  search.n_max = field<std::size_t>(cfg, "n_max", search.n_max);
  search.k = field<std::size_t>(cfg, "k", search.k);
  search.bins = size_list(cfg, "bins", search.bins);
  search.models_per_size = field<std::size_t>(cfg, "models_per_size", search.models_per_size);
  search.deviations_per_model = field<std::size_t>(cfg, "deviations_per_model", search.deviations_per_model);
  search.margin = field<double>(cfg, "margin", search.margin);
  search.budget = field<std::uint64_t>(cfg, "budget", search.budget);
  search.seed = seed;
  if (search.k < 2) config_error("\"k\" must be at least 2");

  const auto result = nontruthfulness_witness(spec, search);
  json out{{"measure", std::string(to_string(spec.measure.kind))},
           {"aggregation", std::string(to_string(spec.aggregation))},
           {"models_searched", result.models_searched},
           {"deviations_evaluated", result.deviations_evaluated},
           {"found", result.witness.has_value()}};
  if (result.witness) {
    const auto& w = *result.witness;
    out["witness"] = json{{"source", "randomized search"},
                          {"n", w.truth.size()},
                          {"k", w.truth.classes()},
                          {"m", w.m},
                          {"strategy", std::string(to_string(w.strategy))},
                          {"truth", profile_json(w.truth)},
                          {"deviation", profile_json(w.deviation)},
                          {"truth_value", real(w.truth_value)},
                          {"deviation_value", real(w.deviation_value)},
                          {"margin", real(w.margin)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

// Linear score l(q, y) = 1 - q[y]; its expectation is minimized at a vertex,
// so it is not proper.
double linear_loss(std::span<const double> q, std::size_t y) { return 1.0 - q[y]; }

json run_properness(const json& cfg, std::uint64_t seed) {
  const auto names = string_list(cfg, "losses", {"log", "brier", "spherical"});
  const auto random_induced = field<std::size_t>(cfg, "random_induced", 25);
  const auto ks = size_list(cfg, "k_values", {2, 3, 4});
  const auto step = field<double>(cfg, "grid_step", 0.05);
  const auto tolerance = field<double>(cfg, "tolerance", 1e-12);
  const auto max_actions = field<std::size_t>(cfg, "max_actions", 8);
  const bool control = field<bool>(cfg, "control", true);
  if (max_actions < 2) config_error("\"max_actions\" must be at least 2");

  json rows = json::array();
  bool proper_all = true;
  auto probe = [&](const std::string& name, const LossFunction& fn, std::size_t k) {
    PropernessConfig pc;
    pc.k = k;
    pc.grid_step = step;
    pc.tolerance = tolerance;
    pc.seed = seed;
    const auto report = properness_probe(fn, pc);
    rows.push_back(json{{"loss", name},
                        {"k", k},
                        {"grid_points", report.grid_points},
                        {"pairs_checked", report.pairs_checked},
                        {"violations", report.violations},
                        {"within_tolerance", report.within_tolerance},
                        {"min_slack", real(report.min_slack)},
                        {"passed", report.passed()}});
    return report.passed();
  };
  for (auto k : ks) {
    if (k < 2) config_error("\"k_values\" entries must be at least 2");
    for (const auto& name : names) {
      const auto kind = parse_loss_kind(name);
      if (!kind || *kind == LossKind::Induced) config_error("unknown named loss \"" + name + "\"");
      proper_all = probe(name, as_function(LossId::named(*kind)), k) && proper_all;
    }
    for (std::size_t i = 0; i < random_induced; ++i) {
      CounterRng rng(seed, (k << 32) + i);
      const std::size_t actions = 2 + static_cast<std::size_t>(rng.below(max_actions - 1));
      const auto loss = LossId::induced(DecisionProblem::random(rng, actions, k));
      proper_all = probe("induced[" + std::to_string(i) + "]", as_function(loss), k) && proper_all;
    }
  }
  json out{{"all_proper_passed", proper_all}, {"rows", std::move(rows)}};
  if (control) {
    json control_rows = json::array();
    bool detected = true;
    for (auto k : ks) {
      PropernessConfig pc;
      pc.k = k;
      pc.grid_step = step;
      pc.tolerance = tolerance;
      const auto report = properness_probe(LossFunction(linear_loss), pc);
      detected = detected && !report.passed();
      control_rows.push_back(json{{"loss", "linear (improper control)"},
                                  {"k", k},
                                  {"violations", report.violations},
                                  {"min_slack", real(report.min_slack)}});
    }
    out["control"] = json{{"violation_detected", detected}, {"rows", std::move(control_rows)}};
  }
  return out;
}

struct ColumnInfo {
  Table1Column column;
  MeasureKind kind;
  Aggregation agg;
};

ColumnInfo column_info(const std::string& name) {
  const auto c = parse_table1_column(name);
  if (!c) config_error("unknown table column \"" + name + "\"");
  switch (*c) {
    case Table1Column::L1Confidence: return {*c, MeasureKind::L1Qece, Aggregation::Confidence};
    case Table1Column::L1Classwise: return {*c, MeasureKind::L1Qece, Aggregation::Classwise};
    case Table1Column::L2Confidence: return {*c, MeasureKind::L2Qece, Aggregation::Confidence};
    case Table1Column::L2Classwise: return {*c, MeasureKind::L2Qece, Aggregation::Classwise};
  }
  config_error("unknown table column");
}

json run_table1(const json& cfg, std::uint64_t seed) {
  const auto p = world_params(cfg, 1000);
  const auto families = string_list(cfg, "families", {"f1", "f2", "f3", "f4"});
  const auto columns = string_list(cfg, "columns", {"l1_conf", "l1_classwise", "l2_conf", "l2_classwise"});
  const auto bins = size_list(cfg, "bins", {1, 10, 20});
  const auto trials = field<std::size_t>(cfg, "trials", 200);
  const bool exact = field<bool>(cfg, "exact", true);
  const SyntheticWorld world{p.k, p.eps1};

  json rows = json::array();
  std::size_t row_seed = 0;
  for (const auto& fname : families) {
    const auto spec = predictor(p, family_from(fname));
    for (const auto& cname : columns) {
      const auto info = column_info(cname);
      const auto mc = mc_sweep(info.kind, info.agg, world, spec, p.n, bins, trials, seed + row_seed++);
      for (std::size_t j = 0; j < bins.size(); ++j) {
        const auto entry = table1_closed_form(spec, info.column, p.n, bins[j]);
        json row{{"family", fname}, {"column", cname}, {"m", bins[j]}, {"mc", mc_json(mc[j])}};
        if (entry.exact) {
          row["closed_form"] = real(entry.value);
          row["z_closed_form"] = real(z_score(mc[j].estimate, entry.value, mc[j].std_error));
          if (exact) {
            const double e = exact_expected_l2(world, spec, info.agg, p.n, bins[j]);
            row["exact"] = real(e);
            row["z_exact"] = real(z_score(mc[j].estimate, e, mc[j].std_error));
          }
        } else {
          row["leading_term"] = real(entry.value);
          row["sampling_scale"] = real(entry.sampling_scale);
          row["descriptor"] = entry.descriptor;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return json{{"world", world_json(p)}, {"trials", trials}, {"rows", std::move(rows)}};
}

json run_mc(const json& cfg, std::uint64_t seed) {
  const auto p = world_params(cfg, 1000);
  const auto family = family_from(field<std::string>(cfg, "family", "f1"));
  const auto kind = measure_field(cfg, MeasureKind::L2Qece);
  const auto agg = aggregation_field(cfg, Aggregation::Classwise);
  const auto bins = size_list(cfg, "bins", {1, 10});
  const auto trials = field<std::size_t>(cfg, "trials", 200);
  const auto results = mc_sweep(kind, agg, SyntheticWorld{p.k, p.eps1}, predictor(p, family), p.n, bins, trials, seed);
  json rows = json::array();
  for (std::size_t j = 0; j < bins.size(); ++j) {
    json row = mc_json(results[j]);
    row["m"] = bins[j];
    rows.push_back(std::move(row));
  }
  return json{{"world", world_json(p)},
              {"family", std::string(to_string(family))},
              {"measure", std::string(to_string(kind))},
              {"aggregation", std::string(to_string(agg))},
              {"rows", std::move(rows)}};
}

json run_ranking_flip(const json& cfg, std::uint64_t seed) {
  const auto p = world_params(cfg, 2000);
  const auto a = family_from(field<std::string>(cfg, "a", "f2"));
  const auto b = family_from(field<std::string>(cfg, "b", "f3"));
  const auto kind = measure_field(cfg, MeasureKind::L1Qece);
  const auto agg = aggregation_field(cfg, Aggregation::Confidence);
  const auto bins = size_list(cfg, "bins", {1, 2, 5, 10, 20, 50});
  const auto trials = field<std::size_t>(cfg, "trials", 200);
  const auto table = ranking_flip_experiment(kind, agg, SyntheticWorld{p.k, p.eps1}, predictor(p, a), predictor(p, b),
                                             p.n, bins, trials, seed);
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back(json{{"m", r.m},
                        {"a", mc_json(r.a)},
                        {"b", mc_json(r.b)},
                        {"difference", mc_json(r.difference)},
                        {"order", r.order}});
  }
  json out{{"world", world_json(p)},
           {"a", std::string(to_string(a))},
           {"b", std::string(to_string(b))},
           {"measure", std::string(to_string(kind))},
           {"aggregation", std::string(to_string(agg))},
           {"flips", table.flips()},
           {"rows", std::move(rows)}};
  out["crossover_m"] = table.crossover_m ? json(*table.crossover_m) : json(nullptr);
  return out;
}

json run_dominance(const json& cfg, std::uint64_t seed) {
  const auto p = world_params(cfg, 1000);
  const auto a = family_from(field<std::string>(cfg, "a", "f1"));
  const auto b = family_from(field<std::string>(cfg, "b", "f3"));
  DominanceConfig dc;
  dc.random_losses = field<std::size_t>(cfg, "random_losses", dc.random_losses);
  dc.max_actions = field<std::size_t>(cfg, "max_actions", dc.max_actions);
  dc.tolerance = field<double>(cfg, "tolerance", dc.tolerance);
  dc.seed = seed;
  const auto report = dominance_check(SyntheticWorld{p.k, p.eps1}, predictor(p, a), predictor(p, b), dc);
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back(
        json{{"loss", e.loss}, {"loss_a", real(e.loss_a)}, {"loss_b", real(e.loss_b)}, {"margin", real(e.margin)}});
  }
  return json{{"world", world_json(p)},
              {"a", std::string(to_string(a))},
              {"b", std::string(to_string(b))},
              {"a_dominates_b", report.a_dominates_b},
              {"strict_somewhere", report.strict_somewhere},
              {"all_ties", report.all_ties},
              {"entries", std::move(entries)}};
}

json run_brier_identity(const json& cfg, std::uint64_t seed) {
  const auto p = world_params(cfg, 1000);
  const auto family = family_from(field<std::string>(cfg, "family", "f1"));
  const auto m = field<std::size_t>(cfg, "m", 10);
  const auto trials = field<std::size_t>(cfg, "trials", 2000);
  const auto r = brier_identity_check(SyntheticWorld{p.k, p.eps1}, predictor(p, family), p.n, m, trials, seed);
  return json{{"world", world_json(p)},
              {"family", std::string(to_string(family))},
              {"m", m},
              {"expected_brier", real(r.expected_brier)},
              {"identity_value", real(r.identity_value)},
              {"mc", mc_json(r.mc)},
              {"z_score", real(r.z_score)},
              {"within_three_se", r.within_three_se}};
}

json run_example1(const json& cfg, std::uint64_t seed) {
  const auto n = field<std::size_t>(cfg, "n", 2000);
  const auto trials = field<std::size_t>(cfg, "trials", 500);
  const auto bins = size_list(cfg, "bins", {1, 20, n});
  const auto r = example1_replication(n, trials, seed, bins);
  json rows = json::array();
  for (std::size_t j = 0; j < r.bins.size(); ++j) {
    rows.push_back(json{{"m", r.bins[j]}, {"truth", real(r.truth_l2[j])}, {"constant", real(r.constant_l2[j])}});
  }
  const double ratio = r.constant_raw_ece.estimate > 0.0 ? r.truth_raw_ece.estimate / r.constant_raw_ece.estimate
                                                          : INFINITY;
  return json{{"n", n},
              {"raw_ece", json{{"truth", mc_json(r.truth_raw_ece)},
                               {"constant", mc_json(r.constant_raw_ece)},
                               {"ratio", real(ratio)}}},
              {"expected_l2_qece", std::move(rows)}};
}

using Runner = std::function<json(const json&, std::uint64_t)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> runners = {
      {"thm2_check", run_thm2_check},     {"truthfulness", run_truthfulness},
      {"witness", run_witness},           {"properness", run_properness},
      {"table1", run_table1},             {"mc", run_mc},
      {"ranking_flip", run_ranking_flip}, {"dominance", run_dominance},
      {"brier_identity", run_brier_identity}, {"example1", run_example1},
  };
  return runners;
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : registry()) out.push_back(name);
  return out;
}

std::string run_experiment(std::string_view config_json) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) config_error("config must be a JSON object");
  const auto name = field<std::string>(cfg, "experiment", "");
  const auto it = registry().find(name);
  if (it == registry().end()) config_error("unknown experiment \"" + name + "\"");
  const auto seed = field<std::uint64_t>(cfg, "seed", 0);

  json report{{"experiment", name}, {"seed", seed}};
  report["result"] = it->second(cfg, seed);
  report["config"] = cfg;
  report["meta"] = json{{"version", kVersion}};
  return report.dump(2) + "\n";
}

}  // namespace truecal
