#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace polexp {

using Integer = mpz_class;
using Rational = mpq_class;

/// Element of Z^k, additive notation.
using IntVector = std::vector<Integer>;

bool is_zero(const IntVector& v);
Integer l1_norm(const IntVector& v);
IntVector operator+(const IntVector& a, const IntVector& b);
IntVector operator-(const IntVector& v);
IntVector& operator+=(IntVector& a, const IntVector& b);

/// Natural logarithm of a positive integer of any size.
double log_of(const Integer& x);
/// Nearest double, saturating at +inf for astronomically large values.
double to_double(const Integer& x);

std::string to_string(const IntVector& v);

}  // namespace polexp
