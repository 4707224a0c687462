#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace truecal {

enum class ErrorCode {
  NegativeEntry,
  SumOutOfTolerance,
  DimensionTooSmall,
  NonFiniteEntry,
  ClassIndexOutOfRange,
  LabelOutOfRange,
  DimensionMismatch,
  EmptyDataset,
  InvalidArgument,
  InvalidSpec,
  UnsupportedColumn,
  BudgetExceeded,
  ConfigInvalid,
  InvariantBreach,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported with this exception. `index` carries the
// offending row/sample when the failure is tied to one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace truecal
