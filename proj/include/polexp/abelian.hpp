#pragma once

#include <vector>

#include "polexp/growth_type.hpp"
#include "polexp/matrix.hpp"
#include "polexp/polynomial.hpp"

namespace polexp {

/// Monic generator of {p : p(A) v = 0} with its roots.
struct VectorMinimalPoly {
  IntPolynomial poly;
  std::vector<PolynomialRoot> roots;
};

/// Krylov elimination over Q on v, Av, A^2 v, ...; the result is verified
/// to annihilate v exactly.
VectorMinimalPoly minimal_poly_of_vector(const IntMatrix& a, const IntVector& v);

/// Growth type of ||A^n v||. Requires |det A| = 1.
GrowthType orbit_growth(const IntMatrix& a, const IntVector& v);

/// Growth type of ||(I + A + ... + A^{n-1}) v||. Computed both from the
/// augmented affine matrix and from the root data of v, which must agree.
GrowthType palangre_growth(const IntMatrix& a, const IntVector& v);

/// Growth type of the affine orbit x_{n+1} = B x_n + t, x_0 = x.
GrowthType affine_orbit_growth(const IntMatrix& b, const IntVector& t, const IntVector& x);

/// l1 norms of A^n v for n = 0..n_max, exact.
std::vector<Integer> orbit_oracle(const IntMatrix& a, const IntVector& v, int n_max);
/// l1 norms of (I + ... + A^{n-1}) v for n = 0..n_max, exact.
std::vector<Integer> palangre_oracle(const IntMatrix& a, const IntVector& v, int n_max);

/// Every growth type ||A^n v|| can have, over all v (including (0,1)).
std::vector<GrowthType> abelian_spectrum(const IntMatrix& a);
/// Same for the palangres of A.
std::vector<GrowthType> abelian_palangre_spectrum(const IntMatrix& a);
/// Palangres of A^k, rates brought back to the scale of A (lambda^(1/k)).
/// Eigenvalues that are k-th roots of unity contribute the extra degree.
std::vector<GrowthType> abelian_palangre_spectrum(const IntMatrix& a, unsigned k);

}  // namespace polexp
