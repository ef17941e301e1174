#include "polexp/error.hpp"

namespace polexp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::LengthBudgetExceeded: return "LengthBudgetExceeded";
    case ErrorKind::ExponentMismatch: return "ExponentMismatch";
    case ErrorKind::InvalidAutomorphism: return "InvalidAutomorphism";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::NonPositiveTail: return "NonPositiveTail";
    case ErrorKind::InconsistentPath: return "InconsistentPath";
    case ErrorKind::StrataInvalid: return "StrataInvalid";
    case ErrorKind::PeriodNotFound: return "PeriodNotFound";
    case ErrorKind::NotCompletelySplit: return "NotCompletelySplit";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace polexp
