#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polexp {

enum class ErrorKind {
  IndexOutOfRange,
  SpecMismatch,
  LengthBudgetExceeded,
  ExponentMismatch,
  InvalidAutomorphism,
  NotUnimodular,
  DimensionMismatch,
  TooShort,
  NonPositiveTail,
  InconsistentPath,
  StrataInvalid,
  PeriodNotFound,
  NotCompletelySplit,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// that the CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace polexp
