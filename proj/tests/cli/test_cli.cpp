#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv_io.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::string kCli = TRUECAL_CLI_PATH;
const fs::path kFixtures = TRUECAL_FIXTURES_DIR;
const fs::path kConfigs = TRUECAL_CONFIGS_DIR;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / ("truecal_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

Run run(const std::string& args) {
  const auto dir = scratch();
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = "'" + kCli + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string fixture(const char* name) { return "'" + (kFixtures / name).string() + "'"; }

const json* find_measure(const json& report, const std::string& id, const std::string& agg) {
  for (const auto& m : report["measures"]) {
    if (m["id"] == id && m["aggregation"] == agg) return &m;
  }
  return nullptr;
}

// Random rows with all-distinct probabilities, written with 17 digits.
std::string distinct_csv(std::size_t n, std::size_t k, unsigned seed, bool shuffled) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p(k);
    double total = 0;
    for (auto& x : p) total += (x = expo(gen));
    std::string line;
    double partial = 0;
    for (std::size_t r = 0; r < k; ++r) {
      double v = p[r] / total;
      if (r + 1 == k) v = 1.0 - partial;
      partial += v;
      line += truecal::cli::format_real(v) + ",";
    }
    line += std::to_string(1 + gen() % k);
    rows.push_back(line);
  }
  if (shuffled) std::shuffle(rows.begin(), rows.end(), std::mt19937_64(seed + 1));
  std::string text;
  for (std::size_t r = 1; r <= k; ++r) text += "p_" + std::to_string(r) + (r < k ? "," : ",label\n");
  for (const auto& row : rows) text += row + "\n";
  return text;
}

TEST(Cli, OneHotFixtureIsPerfect) {
  const auto r = run("metrics " + fixture("one_hot_perfect.csv") + " --measure raw_ece --measure l1_qece "
                     "--measure l2_qece --bins 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  for (const auto& m : report["measures"]) EXPECT_EQ(m["value"].get<double>(), 0.0);
  EXPECT_EQ(report["losses"]["classification"].get<double>(), 0.0);
  EXPECT_EQ(report["dataset"]["n"], 2);
  EXPECT_EQ(report["dataset"]["k"], 2);
}

TEST(Cli, UniformFixtureGivesFourNinths) {
  const auto r = run("metrics " + fixture("uniform_k3_label1.csv") +
                     " --measure l1_qece --bins 1 --aggregation classwise");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  ASSERT_EQ(report["measures"].size(), 1u);
  EXPECT_NEAR(report["measures"][0]["value"].get<double>(), 4.0 / 9.0, 1e-15);
  EXPECT_EQ(report["measures"][0]["per_class"].size(), 3u);
}

TEST(Cli, ValidationFailuresExitTwo) {
  const auto malformed = run("metrics " + fixture("malformed_row.csv"));
  EXPECT_EQ(malformed.code, 2);
  EXPECT_NE(malformed.err.find("SumOutOfTolerance"), std::string::npos) << malformed.err;
  EXPECT_NE(malformed.err.find("row 1"), std::string::npos) << malformed.err;

  const auto bad = run("metrics " + fixture("bad_number.csv"));
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 3, column 2"), std::string::npos) << bad.err;

  const auto label = run("metrics " + fixture("label_out_of_range.csv"));
  EXPECT_EQ(label.code, 2);
  EXPECT_NE(label.err.find("LabelOutOfRange"), std::string::npos) << label.err;

  EXPECT_EQ(run("metrics '" + (scratch() / "missing.csv").string() + "'").code, 2);
  EXPECT_EQ(run("metrics " + fixture("fixture_a.csv") + " --measure l4_qece").code, 2);
}

TEST(Cli, LabelBaseFlag) {
  const auto zero = run("metrics " + fixture("one_hot_perfect.csv") + " --label-base 0");
  EXPECT_EQ(zero.code, 2);
  const auto dir = scratch();
  write(dir / "zero_based.csv", "p_1,p_2,label\n1,0,0\n0,1,1\n");
  const auto ok = run("metrics '" + (dir / "zero_based.csv").string() + "' --label-base 0");
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(json::parse(ok.out)["losses"]["brier"].get<double>(), 0.0);
}

TEST(Cli, BudgetExceededExitsThree) {
  const auto dir = scratch();
  write(dir / "tiny_budget.json",
        R"({"experiment": "truthfulness", "seed": 1, "models": 2, "n_max": 4, "k_max": 3, "budget": 2})");
  const auto r = run("truthfulness '" + (dir / "tiny_budget.json").string() + "'");
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dir = scratch();
  write(dir / "bad.json", R"({"experiment": "thm2_check", "models": "many"})");
  EXPECT_EQ(run("truthfulness '" + (dir / "bad.json").string() + "'").code, 2);
  write(dir / "wrong_driver.json", R"({"experiment": "table1"})");
  EXPECT_EQ(run("truthfulness '" + (dir / "wrong_driver.json").string() + "'").code, 2);
}

TEST(Cli, SweepShapeAndFullBinIdentity) {
  const auto dir = scratch();
  const std::size_t n = 25, k = 3;
  write(dir / "distinct.csv", distinct_csv(n, k, 3, false));
  const auto two = run("sweep '" + (dir / "distinct.csv").string() + "' --bins-list 20,2000");
  ASSERT_EQ(two.code, 0) << two.err;
  std::istringstream lines(two.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].substr(0, 3), "20,");
  EXPECT_EQ(rows[2].substr(0, 5), "2000,");

  const auto full = run("sweep '" + (dir / "distinct.csv").string() + "' --bins-list " + std::to_string(n) +
                        " --measures-list l2_qece --aggregation classwise --format json");
  ASSERT_EQ(full.code, 0) << full.err;
  const auto table = truecal::cli::parse_score_csv(slurp(dir / "distinct.csv"),
                                                   truecal::cli::HeaderStyle::Probabilities);
  double expected = 0;
  for (std::size_t r = 0; r < k; ++r) {
    double sq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = table.labels[i] == static_cast<std::int64_t>(r + 1) ? 1.0 : 0.0;
      sq += (table.scores[i * k + r] - y) * (table.scores[i * k + r] - y);
    }
    expected += sq / (n * n) / k;
  }
  const auto report = json::parse(full.out);
  EXPECT_NEAR(report["rows"][0]["l2_qece:classwise"].get<double>(), expected, 1e-15) << full.out;
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
  const std::string args = "metrics " + fixture("fixture_a.csv") +
                           " --measure raw_ece --measure l1_qece --measure l2_qece --bins 7 --seed 9";
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto c1 = run("synthetic '" + (kConfigs / "dominance.json").string() + "'");
  const auto c2 = run("synthetic '" + (kConfigs / "dominance.json").string() + "'");
  ASSERT_EQ(c1.code, 0) << c1.err;
  EXPECT_EQ(c1.out, c2.out);
}

TEST(Cli, ReportRoundTripIsValueIdentical) {
  const auto r = run("metrics " + fixture("fixture_a.csv") + " --measure l1_qece --measure l2_qece --bins 5");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto first = json::parse(r.out);
  const auto second = json::parse(first.dump(2));
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.dump(2) + "\n", r.out);
  for (std::size_t i = 0; i < first["measures"].size(); ++i) {
    EXPECT_EQ(first["measures"][i]["value"].get<double>(), second["measures"][i]["value"].get<double>());
  }
}

TEST(Cli, ReportValuesRecomputeFromBins) {
  const auto r = run("metrics " + fixture("fixture_a.csv") + " --measure l1_qece --measure l2_qece --bins 4");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  const std::size_t n = report["dataset"]["n"];
  const auto* l2 = find_measure(report, "l2_qece", "confidence");
  ASSERT_NE(l2, nullptr);
  double sq = 0;
  for (const auto& bin : (*l2)["per_bin"]) sq += std::pow(bin["residual_sum"].get<double>(), 2);
  EXPECT_NEAR((*l2)["value"].get<double>(), sq / (n * n), 1e-15);
  const auto* l1 = find_measure(report, "l1_qece", "classwise");
  ASSERT_NE(l1, nullptr);
  double mean = 0;
  for (const auto& cls : (*l1)["per_class"]) {
    double s = 0;
    for (const auto& bin : cls["per_bin"]) s += std::fabs(bin["residual_sum"].get<double>());
    EXPECT_NEAR(cls["value"].get<double>(), s / n, 1e-15);
    mean += cls["value"].get<double>();
  }
  EXPECT_NEAR((*l1)["value"].get<double>(), mean / 3, 1e-15);
}

TEST(Cli, ShuffledRowsGiveEqualMeasures) {
  const auto dir = scratch();
  write(dir / "ordered.csv", distinct_csv(60, 4, 11, false));
  write(dir / "shuffled.csv", distinct_csv(60, 4, 11, true));
  const std::string flags = " --measure raw_ece --measure l1_qece --measure l2_qece --bins 6";
  const auto a = run("metrics '" + (dir / "ordered.csv").string() + "'" + flags);
  const auto b = run("metrics '" + (dir / "shuffled.csv").string() + "'" + flags);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ra = json::parse(a.out);
  const auto rb = json::parse(b.out);
  ASSERT_EQ(ra["measures"].size(), rb["measures"].size());
  for (std::size_t i = 0; i < ra["measures"].size(); ++i) {
    EXPECT_EQ(ra["measures"][i]["value"].get<double>(), rb["measures"][i]["value"].get<double>());
  }
  EXPECT_NE(ra["dataset"]["digest"], rb["dataset"]["digest"]);
}

TEST(Cli, FixedBinningSwitchesKinds) {
  const auto r = run("metrics " + fixture("fixture_a.csv") + " --measure l1_qece --binning fixed --bins 10");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  EXPECT_EQ(report["measures"][0]["binning"], "fixed");
}

TEST(Cli, TemperatureFixtures) {
  const auto calibrated = run("temperature " + fixture("calibrated_logits.csv"));
  ASSERT_EQ(calibrated.code, 0) << calibrated.err;
  EXPECT_NEAR(json::parse(calibrated.out)["temperature"].get<double>(), 1.0, 1e-5);

  const auto dir = scratch();
  const auto rescaled = dir / "rescaled.csv";
  const auto hot = run("temperature " + fixture("overconfident_logits.csv") + " --rescaled '" + rescaled.string() + "'");
  ASSERT_EQ(hot.code, 0) << hot.err;
  EXPECT_NEAR(json::parse(hot.out)["temperature"].get<double>(), 5.0, 5e-5);
  const auto table = truecal::cli::parse_score_csv(slurp(rescaled), truecal::cli::HeaderStyle::Probabilities);
  EXPECT_NEAR(table.scores[0], 0.7, 1e-4);
  // The rescaled file is itself a valid metrics input.
  EXPECT_EQ(run("metrics '" + rescaled.string() + "'").code, 0);

  const auto probs = run("temperature " + fixture("calibrated_probs.csv") + " --mode probs");
  ASSERT_EQ(probs.code, 0) << probs.err;
  EXPECT_NEAR(json::parse(probs.out)["temperature"].get<double>(), 1.0, 1e-5);

  const auto flat = run("temperature " + fixture("equal_logits.csv"));
  ASSERT_EQ(flat.code, 0) << flat.err;
  EXPECT_EQ(json::parse(flat.out)["temperature"].get<double>(), 1.0);
}

TEST(Cli, ShippedConfigsRun) {
  for (const char* name : {"thm2_check.json", "obs1_witness.json", "truthfulness.json", "properness.json"}) {
    const auto r = run("truthfulness '" + (kConfigs / name).string() + "'");
    ASSERT_EQ(r.code, 0) << name << ": " << r.err;
    const auto report = json::parse(r.out);
    EXPECT_TRUE(report.contains("seed")) << name;
  }
  const auto witness = json::parse(run("truthfulness '" + (kConfigs / "obs1_witness.json").string() + "'").out);
  EXPECT_TRUE(witness["result"]["found"].get<bool>());
  const auto thm2 = json::parse(run("truthfulness '" + (kConfigs / "thm2_check.json").string() + "'").out);
  EXPECT_TRUE(thm2["result"]["passed"].get<bool>());
  const auto table1 = run("synthetic '" + (kConfigs / "table1.json").string() + "' --trials 50");
  ASSERT_EQ(table1.code, 0) << table1.err;
  EXPECT_EQ(json::parse(table1.out)["config"]["trials"], 50);
}

TEST(Cli, SeedOverrideIsEchoed) {
  const auto r = run("synthetic '" + (kConfigs / "dominance.json").string() + "' --seed 77");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["seed"], 77);
}

}  // namespace
