#include "polexp/integer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polexp {

bool is_zero(const IntVector& v) {
  for (const auto& x : v) {
    if (x != 0) return false;
  }
  return true;
}

Integer l1_norm(const IntVector& v) {
  Integer s = 0;
  for (const auto& x : v) s += abs(x);
  return s;
}

IntVector operator+(const IntVector& a, const IntVector& b) {
  IntVector r = a;
  r += b;
  return r;
}

IntVector operator-(const IntVector& v) {
  IntVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = -v[i];
  return r;
}

IntVector& operator+=(IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

double log_of(const Integer& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

double to_double(const Integer& x) {
  if (mpz_sizeinbase(x.get_mpz_t(), 2) > 1000) {
    return sgn(x) > 0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  }
  return x.get_d();
}

std::string to_string(const IntVector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].get_str();
  }
  return s + "]";
}

}  // namespace polexp
