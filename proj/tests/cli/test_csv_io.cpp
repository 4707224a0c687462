#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "csv_io.hpp"

namespace truecal::cli {
namespace {

template <typename Fn>
std::pair<std::size_t, std::size_t> csv_error_at(Fn&& fn) {
  try {
    fn();
  } catch (const CsvError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

TEST(CsvIo, ParsesRowsAndLabels) {
  const auto t = parse_score_csv("p_1,p_2,label\r\n0.25, 0.75 ,2\r\n\r\n+1,0,1\n", HeaderStyle::Probabilities);
  EXPECT_EQ(t.k, 2u);
  ASSERT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.scores, (std::vector<double>{0.25, 0.75, 1.0, 0.0}));
  EXPECT_EQ(t.labels, (std::vector<std::int64_t>{2, 1}));
}

TEST(CsvIo, ErrorsAreLocated) {
  EXPECT_EQ(csv_error_at([] { parse_score_csv("p_1,p_2,label\n0.4,0.6,1\n0.5,abc,1\n", HeaderStyle::Probabilities); }),
            (std::pair<std::size_t, std::size_t>{3, 2}));
  EXPECT_EQ(csv_error_at([] { parse_score_csv("p_1,p_2,label\n0.4,0.6,1.5\n", HeaderStyle::Probabilities); }),
            (std::pair<std::size_t, std::size_t>{2, 3}));
  EXPECT_EQ(csv_error_at([] { parse_score_csv("p_1,q,label\n0.4,0.6,1\n", HeaderStyle::Probabilities); }).first, 1u);
  EXPECT_EQ(csv_error_at([] { parse_score_csv("p_1,p_2,label\n0.4,0.6\n", HeaderStyle::Probabilities); }).first, 2u);
  EXPECT_EQ(csv_error_at([] { parse_score_csv("p_1,p_2,label\n", HeaderStyle::Probabilities); }).first, 2u);
  EXPECT_EQ(csv_error_at([] { parse_score_csv("", HeaderStyle::Probabilities); }).first, 1u);
  EXPECT_EQ(csv_error_at([] { parse_score_csv("p_1,p_2,label\n,0.6,1\n", HeaderStyle::Probabilities); }),
            (std::pair<std::size_t, std::size_t>{2, 1}));
}

TEST(CsvIo, AnyScoresHeader) {
  const auto t = parse_score_csv("z_a,z_b,z_c,label\n-1.5,2e3,0,3\n", HeaderStyle::AnyScores);
  EXPECT_EQ(t.k, 3u);
  EXPECT_EQ(t.scores[1], 2000.0);
}

TEST(CsvIo, FormatRealRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 4.0 / 9.0, 1e-300, 0.0, 123456789.125}) {
    EXPECT_EQ(std::strtod(format_real(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "Infinity");
  EXPECT_EQ(format_real(-std::numeric_limits<double>::infinity()), "-Infinity");
  EXPECT_EQ(format_real(std::numeric_limits<double>::quiet_NaN()), "NaN");
}

TEST(CsvIo, DigestIsFnv1a) {
  // Published FNV-1a 64-bit test vectors.
  EXPECT_EQ(digest(""), "fnv1a64:cbf29ce484222325");
  EXPECT_EQ(digest("a"), "fnv1a64:af63dc4c8601ec8c");
}

}  // namespace
}  // namespace truecal::cli
