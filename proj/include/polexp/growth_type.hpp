#pragma once

#include <optional>
#include <string>

#include "polexp/polynomial.hpp"

namespace polexp {

/// Relative tolerance for deciding that two growth rates coincide when no
/// exact information is available.
inline constexpr double kLambdaTolerance = 1e-9;

/// The pair (d, lambda) of a growth n^d lambda^n.
struct GrowthType {
  int d = 0;
  double lambda = 1.0;
  /// Integer polynomial with lambda as a root, when lambda is known exactly.
  std::optional<IntPolynomial> poly;

  static GrowthType bounded() { return {0, 1.0, IntPolynomial::linear(Integer(1))}; }
  static GrowthType polynomial(int d) { return {d, 1.0, IntPolynomial::linear(Integer(1))}; }
};

/// lambda equality: two rates carrying defining polynomials with no common
/// factor are distinct; otherwise compare within rel_tol.
bool lambda_equal(const GrowthType& a, const GrowthType& b, double rel_tol = kLambdaTolerance);
bool lambda_equal(double a, double b, double rel_tol = kLambdaTolerance);

/// Total order: lambda first (with the equality rule above), then d.
/// Returns -1, 0 or 1.
int compare(const GrowthType& a, const GrowthType& b, double rel_tol = kLambdaTolerance);

inline bool operator<(const GrowthType& a, const GrowthType& b) { return compare(a, b) < 0; }

const GrowthType& max_of(const GrowthType& a, const GrowthType& b);

/// (d, lambda^(1/k)) with the defining polynomial substituted accordingly.
GrowthType root_rescale(const GrowthType& g, unsigned k);
/// (d, lambda^k); the defining polynomial is dropped unless lambda is 1.
GrowthType power_rescale(const GrowthType& g, unsigned k);

/// "(d, lambda)" with lambda printed to the given significant digits.
std::string to_string(const GrowthType& g, int digits = 12);

}  // namespace polexp
