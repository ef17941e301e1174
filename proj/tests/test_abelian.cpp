#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "polexp/abelian.hpp"
#include "polexp/error.hpp"

using namespace polexp;

namespace {

IntPolynomial poly(std::initializer_list<long> low_to_high) {
  std::vector<Integer> c;
  for (long x : low_to_high) c.emplace_back(x);
  return IntPolynomial(c);
}

IntMatrix jordan_unipotent(std::size_t k) {
  IntMatrix a = IntMatrix::identity(k);
  for (std::size_t i = 0; i + 1 < k; ++i) a(i, i + 1) = 1;
  return a;
}

IntMatrix random_unimodular(std::mt19937& rng, std::size_t k, int steps) {
  IntMatrix a = IntMatrix::identity(k);
  std::uniform_int_distribution<std::size_t> idx(0, k - 1);
  for (int s = 0; s < steps; ++s) {
    std::size_t i = idx(rng), j = idx(rng);
    if (i == j) continue;
    IntMatrix e = IntMatrix::identity(k);
    e(i, j) = (rng() % 2) ? 1 : -1;
    a = a * e;
  }
  return a;
}

// Krylov rank in floating point, independent of the exact elimination.
int krylov_rank(const IntMatrix& a, const IntVector& v) {
  const auto k = static_cast<int>(v.size());
  Eigen::MatrixXd m(k, k);
  IntVector cur = v;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) m(i, j) = cur[static_cast<std::size_t>(i)].get_d();
    cur = a * cur;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  return static_cast<int>(lu.rank());
}

}  // namespace

TEST_CASE("matrix basics") {
  auto a = parse_matrix("[[2,1],[1,1]]");
  CHECK(a.determinant() == 1);
  CHECK(a.pow(3) == a * a * a);
  CHECK(parse_matrix("[[1,2,3],[4,5,6],[7,8,10]]").determinant() == -3);
  CHECK(parse_vector("[1, -2]") == IntVector{1, -2});
  CHECK(characteristic_polynomial(a) == poly({1, -3, 1}));
  CHECK_THROWS_AS(parse_matrix("[[1,2],[3]]"), Error);
}

TEST_CASE("polynomial helpers") {
  const auto p = poly({-1, 3, -3, 1});  // (x-1)^3
  auto parts = squarefree_decomposition(p);
  REQUIRE(parts.size() == 3);
  CHECK(parts[2] == poly({-1, 1}));
  CHECK(p.root_multiplicity(Integer(1)) == 3);
  auto r = roots(poly({1, -3, 1}));
  REQUIRE(r.size() == 2);
  double top = std::max(std::abs(r[0].value), std::abs(r[1].value));
  CHECK(top == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK(gcd(poly({-1, 0, 1}), poly({1, 2, 1})) == poly({1, 1}));
  CHECK(to_string(poly({1, -3, 1})) == "x^2 - 3x + 1");
}

TEST_CASE("minimal polynomial of a vector") {
  CHECK(minimal_poly_of_vector(parse_matrix("[[2,1],[1,1]]"), {0, 0}).poly == IntPolynomial::one());
  CHECK(minimal_poly_of_vector(IntMatrix::identity(2), {1, 0}).poly == poly({-1, 1}));
  CHECK(minimal_poly_of_vector(parse_matrix("[[2,1],[1,1]]"), {1, 0}).poly == poly({1, -3, 1}));
  CHECK(minimal_poly_of_vector(jordan_unipotent(3), {0, 0, 1}).poly == poly({-1, 3, -3, 1}));
  CHECK(minimal_poly_of_vector(parse_matrix("[[0,1,0],[0,0,1],[1,1,0]]"), {1, 0, 0}).poly == poly({-1, -1, 0, 1}));
  CHECK(minimal_poly_of_vector(parse_matrix("[[-1,1],[0,-1]]"), {0, 1}).poly == poly({1, 2, 1}));
  CHECK(minimal_poly_of_vector(parse_matrix("[[1,1,0,0],[0,1,0,0],[0,0,2,1],[0,0,1,1]]"), {0, 1, 1, 0}).poly ==
        poly({1, -5, 8, -5, 1}));
  CHECK_THROWS_AS(minimal_poly_of_vector(IntMatrix::identity(2), {1, 0, 0}), Error);
}

TEST_CASE("orbit growth") {
  const double phi2 = (3 + std::sqrt(5.0)) / 2;
  auto g = orbit_growth(parse_matrix("[[2,1],[1,1]]"), {1, 0});
  CHECK(g.d == 0);
  CHECK(g.lambda == doctest::Approx(phi2).epsilon(1e-12));
  REQUIRE(g.poly);
  CHECK(*g.poly == poly({1, -3, 1}));
  CHECK(orbit_growth(jordan_unipotent(2), {0, 1}).d == 1);
  CHECK(orbit_growth(jordan_unipotent(2), {1, 0}).d == 0);
  CHECK(orbit_growth(jordan_unipotent(3), {0, 0, 1}).d == 2);
  CHECK(orbit_growth(jordan_unipotent(3), {0, 0, 1}).lambda == 1.0);
  CHECK(orbit_growth(IntMatrix::identity(2), {0, 0}).d == 0);
  // Plastic number: dominant real root of x^3 - x - 1.
  auto p = orbit_growth(parse_matrix("[[0,1,0],[0,0,1],[1,1,0]]"), {1, 0, 0});
  CHECK(p.lambda == doctest::Approx(1.32471795724475).epsilon(1e-12));
  // Negative dominant root: the defining polynomial is reflected.
  auto n = orbit_growth(parse_matrix("[[-2,1],[1,-1]]"), {1, 0});
  CHECK(n.lambda == doctest::Approx(phi2).epsilon(1e-12));
  CHECK(*n.poly == poly({1, -3, 1}));
  CHECK_THROWS_AS(orbit_growth(parse_matrix("[[2,0],[0,1]]"), {1, 0}), Error);
}

TEST_CASE("palangre growth") {
  CHECK(palangre_growth(IntMatrix::identity(2), {1, 3}).d == 1);
  auto g = palangre_growth(parse_matrix("[[2,1],[1,1]]"), {1, 0});
  CHECK(g.d == 0);
  CHECK(g.lambda == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK(palangre_growth(jordan_unipotent(2), {0, 1}).d == 2);
  for (std::size_t k = 2; k <= 4; ++k) {
    IntVector e(k);
    e[k - 1] = 1;
    CHECK(palangre_growth(jordan_unipotent(k), e).d == orbit_growth(jordan_unipotent(k), e).d + 1);
  }
  // -1 has no bump: the sums alternate between 0 and v.
  CHECK(palangre_growth(parse_matrix("[[-1]]"), {1}).d == 0);
}

TEST_CASE("oracles") {
  auto s = orbit_oracle(parse_matrix("[[2,1],[1,1]]"), {1, 0}, 30);
  CHECK(s[0] == 1);
  CHECK(s[1] == 3);
  CHECK(s[2] == 8);
  CHECK(s[3] == 21);
  CHECK((Rational(s[30], s[29]).get_d()) == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-6));
  auto c = orbit_oracle(IntMatrix::identity(1), {2}, 10);
  for (const auto& x : c) CHECK(x == 2);
  auto p = palangre_oracle(jordan_unipotent(2), {0, 1}, 6);
  CHECK(p[0] == 0);
  CHECK(p[4] == 6 + 4);
}

TEST_CASE("random unimodular matrices") {
  std::mt19937 rng(2024);
  for (int t = 0; t < 60; ++t) {
    const std::size_t k = 1 + rng() % 5;
    const IntMatrix a = random_unimodular(rng, k, 12);
    IntVector v(k);
    for (auto& x : v) x = static_cast<long>(rng() % 11) - 5;
    const auto mp = minimal_poly_of_vector(a, v);
    CHECK(mp.poly.is_monic());
    if (!is_zero(v)) CHECK(mp.poly.degree() == krylov_rank(a, v));
    // Product of root moduli equals |p(0)|.
    double prod = 1.0;
    for (const auto& r : mp.roots) prod *= std::pow(std::abs(r.value), r.multiplicity);
    CHECK(prod == doctest::Approx(std::abs(mp.poly.coeffs()[0].get_d())).epsilon(1e-9));
    const auto g = orbit_growth(a, v);
    if (g.poly) CHECK(g.poly->degree() <= static_cast<int>(k));
    CHECK_NOTHROW(palangre_growth(a, v));
    const auto g2 = orbit_growth(a.pow(2), v);
    CHECK(g2.d == g.d);
    CHECK(g2.lambda == doctest::Approx(g.lambda * g.lambda).epsilon(1e-9));
  }
}

TEST_CASE("abelian spectra") {
  auto s = abelian_spectrum(jordan_unipotent(3));
  REQUIRE(s.size() == 3);
  CHECK(s.back().d == 2);
  auto p = abelian_palangre_spectrum(jordan_unipotent(3));
  CHECK(p.back().d == 3);
  auto f = abelian_palangre_spectrum(parse_matrix("[[2,1],[1,1]]"));
  CHECK(f.size() == 2);
}
