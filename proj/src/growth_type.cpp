#include "polexp/growth_type.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace polexp {

bool lambda_equal(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1.0});
}

bool lambda_equal(const GrowthType& a, const GrowthType& b, double rel_tol) {
  if (a.poly && b.poly && gcd(*a.poly, *b.poly).degree() <= 0) return false;
  return lambda_equal(a.lambda, b.lambda, rel_tol);
}

int compare(const GrowthType& a, const GrowthType& b, double rel_tol) {
  if (!lambda_equal(a, b, rel_tol)) return a.lambda < b.lambda ? -1 : 1;
  if (a.d != b.d) return a.d < b.d ? -1 : 1;
  return 0;
}

const GrowthType& max_of(const GrowthType& a, const GrowthType& b) { return compare(a, b) < 0 ? b : a; }

GrowthType root_rescale(const GrowthType& g, unsigned k) {
  if (k <= 1) return g;
  GrowthType out = g;
  if (lambda_equal(g.lambda, 1.0)) {
    out.lambda = 1.0;
    out.poly = IntPolynomial::linear(Integer(1));
    return out;
  }
  out.lambda = std::pow(g.lambda, 1.0 / k);
  if (g.poly) out.poly = g.poly->substitute_power(k);
  return out;
}

GrowthType power_rescale(const GrowthType& g, unsigned k) {
  if (k <= 1) return g;
  GrowthType out = g;
  if (lambda_equal(g.lambda, 1.0)) {
    out.lambda = 1.0;
    out.poly = IntPolynomial::linear(Integer(1));
    return out;
  }
  out.lambda = std::pow(g.lambda, static_cast<double>(k));
  out.poly.reset();
  return out;
}

std::string to_string(const GrowthType& g, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, g.lambda);
  return "(" + std::to_string(g.d) + ", " + buf + ")";
}

}  // namespace polexp
