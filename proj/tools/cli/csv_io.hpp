#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace truecal::cli {

// Malformed CSV text. Line is 1-based over the file (the header is line 1);
// column is 1-based, 0 when the whole line is at fault.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// k score columns followed by an integer label column.
struct ScoreTable {
  std::vector<std::string> header;  // k + 1 names, the last one "label"
  std::size_t k = 0;
  std::vector<double> scores;       // row-major n x k
  std::vector<std::int64_t> labels;

  std::size_t rows() const noexcept { return labels.size(); }
};

enum class HeaderStyle {
  Probabilities,  // columns must be named p_1..p_k
  AnyScores,      // any column names (logits, probabilities)
};

/// Parses the text of a score CSV. Blank lines are skipped, CRLF is
/// accepted, surrounding spaces around fields are ignored. Values are only
/// parsed here; simplex and label-range checks happen at dataset creation.
ScoreTable parse_score_csv(std::string_view text, HeaderStyle style);

std::string read_file(const std::string& path);

/// 64-bit FNV-1a of the bytes, as "fnv1a64:<16 hex digits>".
std::string digest(std::string_view bytes);

/// printf("%.17g"), with inf/nan spelled Infinity/-Infinity/NaN.
std::string format_real(double x);

}  // namespace truecal::cli
