#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csv_io.hpp"
#include "report.hpp"
#include "truecal.h"

namespace {

using truecal::cli::json;

enum ExitCode { kOk = 0, kValidation = 2, kBudget = 3, kInvariant = 4 };

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

std::vector<std::size_t> parse_bins_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const auto field = text.substr(start, comma - start);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size() || v == 0 || field.front() == '-') {
      throw CLI::ValidationError("--bins-list", "expected comma-separated positive integers, got \"" + text + "\"");
    }
    out.push_back(static_cast<std::size_t>(v));
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    if (comma > start) out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::vector<tc_aggregation> aggregations(const std::string& name) {
  if (name == "both") return {TC_AGG_CLASSWISE, TC_AGG_CONFIDENCE};
  return {truecal::cli::aggregation(name)};
}

tc_label_base label_base(int base) { return base == 0 ? TC_LABELS_ZERO_BASED : TC_LABELS_ONE_BASED; }

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  int label_base = 1;
};

int cmd_metrics(const std::string& path, const std::vector<std::string>& measures, const std::string& agg,
                std::size_t bins, const std::string& binning, const Common& common) {
  const auto bytes = truecal::cli::read_file(path);
  const auto table = truecal::cli::parse_score_csv(bytes, truecal::cli::HeaderStyle::Probabilities);
  const truecal::cli::Dataset ds(table, label_base(common.label_base));
  std::vector<truecal::cli::MeasureRequest> requests;
  const auto names = measures.empty() ? std::vector<std::string>{"l1_qece", "l2_qece"} : measures;
  for (const auto& name : names) {
    for (auto a : aggregations(agg)) {
      requests.push_back({truecal::cli::measure_kind(name, binning == "fixed"), a, bins});
    }
  }
  const auto report = truecal::cli::metrics_report(ds, requests, truecal::cli::digest(bytes), common.seed,
                                                   label_base(common.label_base));
  emit(report.dump(2) + "\n", common.out);
  return kOk;
}

int cmd_sweep(const std::string& path, const std::string& bins_list, const std::string& measures_list,
              const std::string& agg, const std::string& binning, const std::string& format, const Common& common) {
  const auto bytes = truecal::cli::read_file(path);
  const auto table = truecal::cli::parse_score_csv(bytes, truecal::cli::HeaderStyle::Probabilities);
  const truecal::cli::Dataset ds(table, label_base(common.label_base));
  const auto bins = parse_bins_list(bins_list);
  std::vector<truecal::cli::SweepColumn> columns;
  for (const auto& name : split_names(measures_list)) {
    for (auto a : aggregations(agg)) columns.push_back({truecal::cli::measure_kind(name, binning == "fixed"), a});
  }
  if (columns.empty()) throw CLI::ValidationError("--measures-list", "no measures given");
  const auto values = truecal::cli::sweep_table(ds, columns, bins);
  if (format == "csv") {
    emit(truecal::cli::sweep_csv(columns, bins, values), common.out);
    return kOk;
  }
  json rows = json::array();
  for (std::size_t j = 0; j < bins.size(); ++j) {
    json row{{"m", bins[j]}};
    for (std::size_t c = 0; c < columns.size(); ++c) {
      row[std::string(tc_measure_kind_name(columns[c].kind)) + ":" + tc_aggregation_name(columns[c].aggregation)] =
          truecal::cli::real(values[j][c]);
    }
    rows.push_back(std::move(row));
  }
  const json report{{"dataset", json{{"digest", truecal::cli::digest(bytes)}, {"n", ds.size()}, {"k", ds.classes()}}},
                    {"rows", std::move(rows)},
                    {"meta", json{{"version", tc_version()}, {"seed", common.seed}}}};
  emit(report.dump(2) + "\n", common.out);
  return kOk;
}

int cmd_temperature(const std::string& path, const std::string& mode_name, double tolerance,
                    const std::string& rescaled_path, const Common& common) {
  const auto bytes = truecal::cli::read_file(path);
  const auto table = truecal::cli::parse_score_csv(bytes, truecal::cli::HeaderStyle::AnyScores);
  const tc_score_mode mode = mode_name == "probs" ? TC_SCORES_PROBS : TC_SCORES_LOGITS;
  const auto base = label_base(common.label_base);
  tc_temperature_result fit;
  truecal::cli::check(tc_temperature_fit(table.scores.data(), table.labels.data(), table.rows(), table.k, base, mode,
                                         tolerance, &fit));
  if (!rescaled_path.empty()) {
    std::vector<double> probs(table.scores.size());
    truecal::cli::check(
        tc_temperature_apply(table.scores.data(), table.rows(), table.k, mode, fit.temperature, probs.data()));
    std::string csv;
    for (std::size_t r = 0; r < table.k; ++r) csv += "p_" + std::to_string(r + 1) + ",";
    csv += "label\n";
    for (std::size_t i = 0; i < table.rows(); ++i) {
      for (std::size_t r = 0; r < table.k; ++r) csv += truecal::cli::format_real(probs[i * table.k + r]) + ",";
      csv += std::to_string(table.labels[i]) + "\n";
    }
    emit(csv, rescaled_path);
  }
  const json report{{"dataset", json{{"digest", truecal::cli::digest(bytes)}, {"n", table.rows()}, {"k", table.k}}},
                    {"mode", mode_name},
                    {"temperature", truecal::cli::real(fit.temperature)},
                    {"log_loss", truecal::cli::real(fit.loss)},
                    {"log_loss_at_one", truecal::cli::real(fit.loss_at_one)},
                    {"iterations", fit.iterations},
                    {"tolerance", tolerance},
                    {"meta", json{{"version", tc_version()}}}};
  emit(report.dump(2) + "\n", common.out);
  return kOk;
}

int cmd_experiment(const std::string& path, const std::set<std::string>& allowed, const std::string& command,
                   std::optional<std::uint64_t> seed, std::optional<std::size_t> trials, const Common& common) {
  json cfg;
  try {
    cfg = json::parse(truecal::cli::read_file(path));
  } catch (const json::parse_error& e) {
    throw truecal::cli::ApiError(TC_ERR_CONFIG_INVALID, std::string("config is not valid JSON: ") + e.what(), -1);
  }
  if (!cfg.is_object() || !cfg.contains("experiment") || !cfg["experiment"].is_string()) {
    throw truecal::cli::ApiError(TC_ERR_CONFIG_INVALID, "config needs a string \"experiment\" field", -1);
  }
  const auto name = cfg["experiment"].get<std::string>();
  if (!allowed.count(name)) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw truecal::cli::ApiError(TC_ERR_CONFIG_INVALID,
                                 "\"" + name + "\" is not a " + command + " experiment (expected one of " + list + ")",
                                 -1);
  }
  if (seed) cfg["seed"] = *seed;
  if (trials) cfg["trials"] = *trials;
  char* out = nullptr;
  truecal::cli::check(tc_run_experiment(cfg.dump().c_str(), &out));
  std::string text(out);
  tc_string_free(out);
  emit(text, common.out);
  return kOk;
}

int exit_code_for(tc_status status) {
  switch (status) {
    case TC_ERR_BUDGET_EXCEEDED: return kBudget;
    case TC_ERR_INVARIANT_BREACH:
    case TC_ERR_INTERNAL:
    case TC_ERR_OUT_OF_MEMORY: return kInvariant;
    default: return kValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibration measures, proper losses and truthfulness experiments"};
  app.set_version_flag("--version", std::string(tc_version()));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--out", common.out, "Write the report here instead of stdout");
    sub->add_option("--label-base", common.label_base, "Label indexing of the CSV")
        ->check(CLI::IsMember({0, 1}))
        ->capture_default_str();
    if (with_seed) sub->add_option("--seed", common.seed, "Seed echoed in the report")->capture_default_str();
  };

  std::string csv_path;
  std::vector<std::string> measures;
  std::string agg = "both";
  std::size_t bins = 15;
  std::string binning = "quantile";
  const std::vector<std::string> aggregation_names = {"classwise", "confidence", "conf", "both"};

  auto* metrics = app.add_subcommand("metrics", "Calibration measures and losses of a prediction CSV");
  metrics->add_option("csv", csv_path, "CSV with header p_1,...,p_k,label")->required();
  metrics->add_option("--measure", measures, "raw_ece | l1_qece | l2_qece | l1_fixed | l2_fixed (repeatable)");
  metrics->add_option("--aggregation", agg)->check(CLI::IsMember(aggregation_names))->capture_default_str();
  metrics->add_option("--bins", bins)->check(CLI::PositiveNumber)->capture_default_str();
  metrics->add_option("--binning", binning)->check(CLI::IsMember({"quantile", "fixed"}))->capture_default_str();
  std::string metrics_format = "json";
  metrics->add_option("--format", metrics_format, "Report format")->check(CLI::IsMember({"json"}));
  add_common(metrics, true);

  std::string bins_list = "1,2,5,10,20,50";
  std::string measures_list = "l1_qece,l2_qece";
  std::string format = "csv";
  auto* sweep = app.add_subcommand("sweep", "Measures across a list of bin counts");
  sweep->add_option("csv", csv_path)->required();
  sweep->add_option("--bins-list", bins_list)->capture_default_str();
  sweep->add_option("--measures-list", measures_list)->capture_default_str();
  sweep->add_option("--aggregation", agg)->check(CLI::IsMember(aggregation_names))->capture_default_str();
  sweep->add_option("--binning", binning)->check(CLI::IsMember({"quantile", "fixed"}))->capture_default_str();
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_common(sweep, true);

  std::string mode = "logits";
  double tolerance = 1e-6;
  std::string rescaled;
  auto* temperature = app.add_subcommand("temperature", "Fit a softmax temperature by log loss");
  temperature->add_option("csv", csv_path, "CSV with k score columns and a label column")->required();
  temperature->add_option("--mode", mode)->check(CLI::IsMember({"logits", "probs"}))->capture_default_str();
  temperature->add_option("--tolerance", tolerance, "Bracket width on ln T")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  temperature->add_option("--rescaled", rescaled, "Write softmax(z / T) as a prediction CSV");
  add_common(temperature, false);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> trials_override;
  auto* truth = app.add_subcommand("truthfulness", "Exact-enumeration experiments (thm2_check, truthfulness, witness, properness)");
  truth->add_option("config", config_path, "JSON experiment config")->required();
  truth->add_option("--seed", seed_override, "Override the config seed");
  truth->add_option("--out", common.out);
  auto* synthetic = app.add_subcommand(
      "synthetic", "Synthetic-world experiments (table1, mc, ranking_flip, dominance, brier_identity, example1)");
  synthetic->add_option("config", config_path, "JSON experiment config")->required();
  synthetic->add_option("--seed", seed_override, "Override the config seed");
  synthetic->add_option("--trials", trials_override, "Override the config trial count");
  synthetic->add_option("--out", common.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*metrics) return cmd_metrics(csv_path, measures, agg, bins, binning, common);
    if (*sweep) return cmd_sweep(csv_path, bins_list, measures_list, agg, binning, format, common);
    if (*temperature) return cmd_temperature(csv_path, mode, tolerance, rescaled, common);
    if (*truth) {
      return cmd_experiment(config_path, {"thm2_check", "truthfulness", "witness", "properness"}, "truthfulness",
                            seed_override, std::nullopt, common);
    }
    if (*synthetic) {
      return cmd_experiment(config_path,
                            {"table1", "mc", "ranking_flip", "dominance", "brier_identity", "example1"}, "synthetic",
                            seed_override, trials_override, common);
    }
  } catch (const truecal::cli::CsvError& e) {
    std::fprintf(stderr, "error: CsvParse at line %zu, column %zu: %s\n", e.line(), e.column(), e.what());
    return kValidation;
  } catch (const truecal::cli::ApiError& e) {
    if (e.row() >= 0) {
      // CSV line = data row + 2 (1-based, after the header).
      std::fprintf(stderr, "error: %s at row %lld (line %lld): %s\n", tc_status_name(e.status()),
                   static_cast<long long>(e.row()), static_cast<long long>(e.row() + 2), e.what());
    } else {
      std::fprintf(stderr, "error: %s: %s\n", tc_status_name(e.status()), e.what());
    }
    return exit_code_for(e.status());
  } catch (const truecal::cli::InvariantError& e) {
    std::fprintf(stderr, "error: InvariantBreach: %s\n", e.what());
    return kInvariant;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  }
  return kValidation;
}
