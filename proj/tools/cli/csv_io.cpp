#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace truecal::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line, std::size_t column) {
  if (field.empty()) throw CsvError("empty numeric field", line, column);
  // from_chars rejects a leading '+'; accept it as text writers emit it.
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec == std::errc::result_out_of_range) throw CsvError("number out of range", line, column);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw CsvError("not a number: \"" + std::string(field) + "\"", line, column);
  }
  return value;
}

std::int64_t parse_label(std::string_view field, std::size_t line, std::size_t column) {
  if (field.empty()) throw CsvError("empty label", line, column);
  if (field.front() == '+') field.remove_prefix(1);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw CsvError("label is not an integer: \"" + std::string(field) + "\"", line, column);
  }
  return value;
}

}  // namespace

ScoreTable parse_score_csv(std::string_view text, HeaderStyle style) {
  ScoreTable table;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = split(line);
    if (!have_header) {
      if (fields.size() < 3) throw CsvError("header needs at least two score columns and a label", line_no, 0);
      if (fields.back() != "label") throw CsvError("last header column must be \"label\"", line_no, fields.size());
      table.k = fields.size() - 1;
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (style == HeaderStyle::Probabilities && c < table.k && fields[c] != "p_" + std::to_string(c + 1)) {
          throw CsvError("expected column \"p_" + std::to_string(c + 1) + "\"", line_no, c + 1);
        }
        table.header.emplace_back(fields[c]);
      }
      have_header = true;
    } else {
      if (fields.size() != table.k + 1) {
        throw CsvError("expected " + std::to_string(table.k + 1) + " fields, found " + std::to_string(fields.size()),
                       line_no, 0);
      }
      for (std::size_t c = 0; c < table.k; ++c) table.scores.push_back(parse_double(fields[c], line_no, c + 1));
      table.labels.push_back(parse_label(fields.back(), line_no, fields.size()));
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw CsvError("missing header", 1, 0);
  if (table.labels.empty()) throw CsvError("no data rows", line_no, 0);
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace truecal::cli
