#pragma once

#include <complex>
#include <string>
#include <vector>

#include "polexp/integer.hpp"
#include "polexp/matrix.hpp"

namespace polexp {

/// Integer polynomial, coefficients stored from the constant term upward.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<Integer> coeffs);

  static IntPolynomial one() { return IntPolynomial({Integer(1)}); }
  /// x - c
  static IntPolynomial linear(const Integer& root);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Integer>& coeffs() const { return coeffs_; }
  const Integer& leading() const { return coeffs_.back(); }
  bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }

  Integer evaluate(const Integer& x) const;
  std::complex<long double> evaluate(std::complex<long double> x) const;

  /// p(-x), normalised to a positive leading coefficient.
  IntPolynomial reflected() const;
  /// p(x^k)
  IntPolynomial substitute_power(unsigned k) const;
  /// Multiplicity of r as an exact integer root.
  int root_multiplicity(const Integer& r) const;

  bool operator==(const IntPolynomial&) const = default;

 private:
  std::vector<Integer> coeffs_;
};

std::string to_string(const IntPolynomial& p);

struct PolynomialRoot {
  std::complex<double> value;
  int multiplicity = 1;
  /// Squarefree factor (primitive, positive leading coefficient) whose simple
  /// root this is.
  IntPolynomial factor;
};

/// Exact primitive gcd over Q, normalised to a positive leading coefficient.
IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b);

/// Squarefree decomposition p = c * prod q_i^i (exact, Yun's algorithm);
/// entry i-1 holds q_i, possibly constant.
std::vector<IntPolynomial> squarefree_decomposition(const IntPolynomial& p);

/// All complex roots with multiplicity. Each squarefree factor is solved by
/// companion-matrix eigenvalues in double precision followed by Newton
/// polishing in long double.
std::vector<PolynomialRoot> roots(const IntPolynomial& p);

/// Characteristic polynomial det(xI - A), exact.
IntPolynomial characteristic_polynomial(const IntMatrix& a);

}  // namespace polexp
