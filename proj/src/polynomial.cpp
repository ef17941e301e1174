#include "polexp/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "polexp/error.hpp"

namespace polexp {

namespace {

using RatPoly = std::vector<Rational>;

void trim(std::vector<Integer>& c) {
  while (c.size() > 1 && c.back() == 0) c.pop_back();
  if (c.empty()) c.push_back(0);
}

void trim(RatPoly& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

RatPoly to_rational(const IntPolynomial& p) {
  RatPoly r;
  r.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) r.emplace_back(c);
  trim(r);
  return r;
}

/// Clears denominators, divides by the content and makes the leading
/// coefficient positive.
IntPolynomial primitive(const RatPoly& r) {
  if (r.empty()) return IntPolynomial({Integer(0)});
  Integer den = 1;
  for (const auto& c : r) den = lcm(den, Integer(c.get_den()));
  std::vector<Integer> out;
  out.reserve(r.size());
  for (const auto& c : r) out.push_back(Integer(c * den));
  Integer content = 0;
  for (const auto& c : out) content = gcd(content, c);
  if (content != 0) {
    for (auto& c : out) c /= content;
  }
  if (out.back() < 0) {
    for (auto& c : out) c = -c;
  }
  return IntPolynomial(std::move(out));
}

/// Polynomial division over Q; returns quotient, leaves remainder in a.
RatPoly divide(RatPoly& a, const RatPoly& b) {
  trim(a);
  if (b.empty()) throw std::domain_error("polynomial division by zero");
  if (a.size() < b.size()) return {};
  RatPoly q(a.size() - b.size() + 1);
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const Rational f = a.back() / b.back();
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    trim(a);
  }
  return q;
}

RatPoly rat_gcd(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    divide(a, b);
    std::swap(a, b);
  }
  if (!a.empty()) {
    const Rational lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

RatPoly derivative(const RatPoly& a) {
  RatPoly d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * static_cast<long>(i));
  trim(d);
  return d;
}

RatPoly exact_quotient(RatPoly a, const RatPoly& b) {
  RatPoly q = divide(a, b);
  if (!a.empty()) throw std::logic_error("inexact polynomial quotient");
  return q;
}

std::vector<std::complex<double>> simple_roots(const IntPolynomial& q) {
  const int n = q.degree();
  std::vector<std::complex<double>> out;
  if (n <= 0) return out;
  const auto& c = q.coeffs();
  if (n == 1) {
    out.emplace_back(-Rational(c[0], c[1]).get_d(), 0.0);
    return out;
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = to_double(c[static_cast<std::size_t>(n)]);
  for (int i = 0; i < n; ++i) companion(0, i) = -to_double(c[static_cast<std::size_t>(n - 1 - i)]) / lead;
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto eig = solver.eigenvalues();

  std::vector<Integer> dc;
  for (std::size_t i = 1; i < c.size(); ++i) dc.push_back(c[i] * static_cast<long>(i));
  const IntPolynomial dq(dc);
  for (int i = 0; i < n; ++i) {
    std::complex<long double> z(eig(i).real(), eig(i).imag());
    for (int iter = 0; iter < 60; ++iter) {
      const auto fz = q.evaluate(z);
      const auto dfz = dq.evaluate(z);
      if (std::abs(dfz) == 0.0L) break;
      const auto step = fz / dfz;
      z -= step;
      if (std::abs(step) <= 1e-18L * std::max(1.0L, std::abs(z))) break;
    }
    out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

}  // namespace

IntPolynomial::IntPolynomial(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) { trim(coeffs_); }

IntPolynomial IntPolynomial::linear(const Integer& root) { return IntPolynomial({Integer(-root), Integer(1)}); }

Integer IntPolynomial::evaluate(const Integer& x) const {
  Integer acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<long double> IntPolynomial::evaluate(std::complex<long double> x) const {
  std::complex<long double> acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * x + static_cast<long double>(to_double(*it));
  }
  return acc;
}

IntPolynomial IntPolynomial::reflected() const {
  std::vector<Integer> c = coeffs_;
  for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
  if (c.back() < 0) {
    for (auto& x : c) x = -x;
  }
  return IntPolynomial(std::move(c));
}

IntPolynomial IntPolynomial::substitute_power(unsigned k) const {
  if (k <= 1) return *this;
  std::vector<Integer> c(static_cast<std::size_t>(degree()) * k + 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i * k] = coeffs_[i];
  return IntPolynomial(std::move(c));
}

int IntPolynomial::root_multiplicity(const Integer& r) const {
  RatPoly p = to_rational(*this);
  if (p.empty()) return 0;
  const RatPoly lin = {Rational(-r), Rational(1)};
  int m = 0;
  while (p.size() > 1) {
    RatPoly rem = p;
    RatPoly q = divide(rem, lin);
    if (!rem.empty()) break;
    p = std::move(q);
    ++m;
  }
  return m;
}

std::string to_string(const IntPolynomial& p) {
  std::ostringstream os;
  bool first = true;
  const auto& c = p.coeffs();
  for (int i = p.degree(); i >= 0; --i) {
    const Integer& a = c[static_cast<std::size_t>(i)];
    if (a == 0 && !(i == 0 && first)) continue;
    Integer mag = abs(a);
    if (first) {
      if (a < 0) os << "-";
    } else {
      os << (a < 0 ? " - " : " + ");
    }
    if (i == 0 || mag != 1) os << mag.get_str();
    if (i >= 1) os << "x";
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b) {
  RatPoly g = rat_gcd(to_rational(a), to_rational(b));
  if (g.empty()) return IntPolynomial({Integer(0)});
  return primitive(g);
}

std::vector<IntPolynomial> squarefree_decomposition(const IntPolynomial& p) {
  std::vector<IntPolynomial> out;
  RatPoly f = to_rational(p);
  if (f.size() <= 1) return out;
  // Yun: a0 = gcd(f, f'), b1 = f / a0, c1 = f'/a0, d1 = c1 - b1'.
  RatPoly df = derivative(f);
  RatPoly a = rat_gcd(f, df);
  RatPoly b = exact_quotient(f, a);
  RatPoly c = exact_quotient(df, a);
  RatPoly d = c;
  {
    RatPoly db = derivative(b);
    d.resize(std::max(d.size(), db.size()));
    for (std::size_t i = 0; i < db.size(); ++i) d[i] -= db[i];
    trim(d);
  }
  while (b.size() > 1) {
    RatPoly factor = rat_gcd(b, d);
    out.push_back(primitive(factor));
    b = exact_quotient(b, factor);
    c = exact_quotient(d, factor);
    RatPoly db = derivative(b);
    d = c;
    d.resize(std::max(d.size(), db.size()));
    for (std::size_t i = 0; i < db.size(); ++i) d[i] -= db[i];
    trim(d);
  }
  return out;
}

std::vector<PolynomialRoot> roots(const IntPolynomial& p) {
  std::vector<PolynomialRoot> out;
  const auto parts = squarefree_decomposition(p);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].degree() <= 0) continue;
    for (const auto& z : simple_roots(parts[i])) {
      out.push_back({z, static_cast<int>(i + 1), parts[i]});
    }
  }
  return out;
}

IntPolynomial characteristic_polynomial(const IntMatrix& a) {
  if (!a.square()) throw Error(ErrorKind::DimensionMismatch, "characteristic polynomial of non-square matrix");
  const std::size_t n = a.rows();
  // Faddeev-LeVerrier over Q: M_0 = 0, c_n = 1,
  // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  std::vector<Rational> m(n * n, Rational(0));
  std::vector<Rational> am(n * n);
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A * M_{k-1} + c_{n-k+1} I
    std::vector<Rational> next(n * n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        if (a(i, l) == 0) continue;
        const Rational ail(a(i, l));
        for (std::size_t j = 0; j < n; ++j) next[i * n + j] += ail * m[l * n + j];
      }
      next[i * n + i] += c[n - k + 1];
    }
    m = std::move(next);
    Rational trace = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) trace += Rational(a(i, l)) * m[l * n + i];
    }
    c[n - k] = -trace / static_cast<long>(k);
  }
  std::vector<Integer> ic;
  for (const auto& x : c) {
    if (x.get_den() != 1) throw std::logic_error("non-integral characteristic polynomial");
    ic.emplace_back(x.get_num());
  }
  return IntPolynomial(std::move(ic));
}

}  // namespace polexp
