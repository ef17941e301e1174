#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "polexp/growth_type.hpp"
#include "polexp/integer.hpp"

namespace polexp {

struct FitOptions {
  /// lambda-hat below 1 + epsilon_lambda is snapped to 1.
  double epsilon_lambda = 0.02;
  int max_degree = 8;
  /// Residuals above this mark the fit as low confidence.
  double confidence_residual = 0.5;
};

enum class GrowthClass { Bounded, Polynomial, Exponential };

std::string to_string(GrowthClass c);

struct FittedGrowth {
  int d_hat = 0;
  double lambda_hat = 1.0;
  /// max |a_n / (C n^d lambda^n) - 1| over the tail window.
  double residual = 0.0;
  GrowthClass classification = GrowthClass::Bounded;
  /// Ratio between the largest and smallest value of a_n / (n^d lambda^n)
  /// over the tail: the width of the constant band.
  double band = 1.0;
  int window_begin = 0;
  int window_end = 0;
  bool low_confidence = false;
  /// Exponential fit on a tail that is not monotone.
  bool non_monotone = false;
  /// All-zero tail.
  bool degenerate = false;

  GrowthType growth_type() const { return {d_hat, lambda_hat, std::nullopt}; }
};

/// Estimate (d, lambda) with a_n ~ n^d lambda^n from an exact length
/// sequence a_0..a_{n_max}.
///
/// Sequences that are eventually quasi-polynomial (a finite difference with
/// some step m <= 6 vanishes identically on the last two thirds) are
/// recognised exactly. Otherwise ln a_n - d ln n = c + n ln(lambda) is
/// fitted by least squares on the tail window for every candidate d, the
/// best candidate wins, and lambda-hat snaps to 1 below 1 + epsilon.
FittedGrowth fit_growth(const std::vector<Integer>& sequence, const FitOptions& options = {});

/// Same degree and lambda(phi^k) = lambda(phi)^k within 3%.
bool check_power_consistency(const std::vector<Integer>& sequence_phi, const std::vector<Integer>& sequence_phik,
                             unsigned k, const FitOptions& options = {});

/// "n,length" CSV, one row per n starting from 0.
std::string write_length_csv(const std::vector<Integer>& sequence);
std::vector<Integer> read_length_csv(std::string_view text);

}  // namespace polexp
