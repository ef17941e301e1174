#include "doctest.h"

#include <cmath>

#include "polexp/error.hpp"
#include "polexp/fit.hpp"

using namespace polexp;

namespace {

std::vector<Integer> fibonacci_lengths(int n_max) {
  std::vector<Integer> s;
  Integer x = 1, y = 2;  // F(2), F(3)
  for (int n = 0; n <= n_max; ++n) {
    s.push_back(x);
    Integer z = x + y;
    x = y;
    y = z;
  }
  return s;
}

// floor(C n^d lambda^n), computed in long double then truncated.
std::vector<Integer> synthetic(int d, double lambda, double c, int n_max) {
  std::vector<Integer> s;
  for (int n = 0; n <= n_max; ++n) {
    const long double v = c * std::pow(static_cast<long double>(n), d) * std::pow(static_cast<long double>(lambda), n);
    mpz_class z;
    mpz_set_d(z.get_mpz_t(), std::floor(static_cast<double>(v)));
    s.push_back(z);
  }
  return s;
}

}  // namespace

TEST_CASE("constant sequences are bounded") {
  const auto f = fit_growth(std::vector<Integer>(20, Integer(7)));
  CHECK(f.classification == GrowthClass::Bounded);
  CHECK(f.d_hat == 0);
  CHECK(f.lambda_hat == 1.0);
  CHECK(f.residual == 0.0);
}

TEST_CASE("Fibonacci lengths") {
  const auto f = fit_growth(fibonacci_lengths(30));
  CHECK(f.d_hat == 0);
  CHECK(f.lambda_hat == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(0.01));
  CHECK(f.classification == GrowthClass::Exponential);
}

TEST_CASE("triangular numbers") {
  std::vector<Integer> s;
  for (long n = 0; n <= 40; ++n) s.emplace_back(n * (n - 1) / 2);
  const auto f = fit_growth(s);
  CHECK(f.d_hat == 2);
  CHECK(f.lambda_hat == 1.0);
  CHECK(f.classification == GrowthClass::Polynomial);
}

TEST_CASE("synthetic sweep") {
  for (int d = 0; d <= 4; ++d) {
    for (double lambda : {1.0, 1.3, 1.618, 2.618}) {
      for (double c : {1.0, 5.0}) {
        const auto f = fit_growth(synthetic(d, lambda, c, 35));
        INFO("d=", d, " lambda=", lambda, " C=", c);
        CHECK(f.d_hat == d);
        CHECK(f.lambda_hat == doctest::Approx(lambda).epsilon(0.01));
      }
    }
  }
}

TEST_CASE("scale invariance") {
  const auto base = fibonacci_lengths(30);
  const auto f0 = fit_growth(base);
  for (long c = 1; c <= 100; c += 9) {
    std::vector<Integer> scaled;
    for (const auto& x : base) scaled.push_back(x * c);
    const auto f = fit_growth(scaled);
    CHECK(f.d_hat == f0.d_hat);
    CHECK(f.lambda_hat == doctest::Approx(f0.lambda_hat).epsilon(0.001));
  }
}

TEST_CASE("errors and degenerate tails") {
  CHECK_THROWS_AS(fit_growth(std::vector<Integer>(11, Integer(1))), Error);
  std::vector<Integer> zeros(20, Integer(0));
  CHECK(fit_growth(zeros).degenerate);
  std::vector<Integer> holes(20, Integer(3));
  holes[18] = 0;
  CHECK_THROWS_AS(fit_growth(holes), Error);
}

TEST_CASE("power consistency") {
  const auto fib = fibonacci_lengths(40);
  std::vector<Integer> every_second;
  for (std::size_t n = 0; n < fib.size(); n += 2) every_second.push_back(fib[n]);
  CHECK(check_power_consistency(fib, every_second, 2));
  CHECK(check_power_consistency(std::vector<Integer>(20, Integer(3)), std::vector<Integer>(20, Integer(3)), 3));
  std::vector<Integer> linear, quadratic;
  for (long n = 0; n <= 30; ++n) {
    linear.emplace_back(n + 1);
    quadratic.emplace_back(n * n + 1);
  }
  CHECK_FALSE(check_power_consistency(linear, quadratic, 2));
}

TEST_CASE("csv round trip") {
  const auto s = fibonacci_lengths(5);
  const auto text = write_length_csv(s);
  CHECK(text.rfind("n,length\n0,1\n1,2\n", 0) == 0);
  CHECK(read_length_csv(text) == s);
  CHECK_THROWS_AS(read_length_csv("n,length\n1,5\n"), Error);
}
