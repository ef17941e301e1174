#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "polexp/automorphism.hpp"

namespace polexp {

enum class OutputFormat { Text, Csv, Json };

struct JobConfig {
  /// element, class, palangre, abelian, ct, spectrum or sum.
  std::string command;
  std::string aut_path;
  std::string ct_path;
  std::string word;
  /// Second palangre element.
  std::string h;
  unsigned k = 1;
  int n_max = 25;
  std::size_t budget = kDefaultBudget;
  OutputFormat format = OutputFormat::Text;
  /// Relative lambda tolerance for clustering and oracle comparisons.
  double tol_lambda = 0.02;
  bool oracle = false;
  std::string matrix;
  std::string vector;
  int d = 0;
  double l1 = 1;
  double l2 = 1;
  int max_length = 4;
  unsigned threads = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitBudget = 2;

/// Runs one job, writing the report to `out` and diagnostics to `err`.
/// Returns the process exit code.
int run(const JobConfig& config, std::ostream& out, std::ostream& err);

}  // namespace polexp
