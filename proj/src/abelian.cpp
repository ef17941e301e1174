#include "polexp/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polexp/error.hpp"

namespace polexp {

namespace {

constexpr double kClusterTolerance = 1e-9;

void require_unimodular(const IntMatrix& a) {
  if (!a.square()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
  if (!a.is_unimodular()) {
    throw Error(ErrorKind::NotUnimodular, "determinant " + a.determinant().get_str() + " is not +-1");
  }
}

void require_dimension(const IntMatrix& a, const IntVector& v) {
  if (!a.square() || a.cols() != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                                  " matrix against vector of length " + std::to_string(v.size()));
  }
}

bool is_one(std::complex<double> z) { return std::abs(z - 1.0) <= kClusterTolerance; }

struct DominantData {
  double modulus = 1.0;
  std::vector<const PolynomialRoot*> roots;  // those attaining the modulus
};

DominantData dominant(const std::vector<PolynomialRoot>& roots) {
  DominantData out;
  double top = 0.0;
  for (const auto& r : roots) top = std::max(top, std::abs(r.value));
  out.modulus = top;
  for (const auto& r : roots) {
    if (std::abs(r.value) >= top * (1.0 - kClusterTolerance)) out.roots.push_back(&r);
  }
  return out;
}

/// Defining polynomial of |eta| when the dominant cluster contains a real root.
std::optional<IntPolynomial> defining_poly(const DominantData& dom) {
  for (const auto* r : dom.roots) {
    if (std::abs(r->value.imag()) > kClusterTolerance * dom.modulus) continue;
    return r->value.real() > 0 ? r->factor : r->factor.reflected();
  }
  return std::nullopt;
}

GrowthType growth_from_roots(const std::vector<PolynomialRoot>& roots, bool palangre) {
  if (roots.empty()) return GrowthType::bounded();
  const DominantData dom = dominant(roots);
  int d = 0;
  for (const auto* r : dom.roots) {
    d = std::max(d, r->multiplicity - 1 + (palangre && is_one(r->value) ? 1 : 0));
  }
  if (lambda_equal(dom.modulus, 1.0, kClusterTolerance) || dom.modulus < 1.0) {
    // Unimodular roots of modulus 1 are roots of unity.
    return GrowthType::polynomial(d);
  }
  return {d, dom.modulus, defining_poly(dom)};
}

}  // namespace

VectorMinimalPoly minimal_poly_of_vector(const IntMatrix& a, const IntVector& v) {
  require_dimension(a, v);
  const std::size_t k = v.size();
  if (is_zero(v)) return {IntPolynomial::one(), {}};

  // Echelon rows of the Krylov vectors, each with its expression in terms of
  // v, Av, ..., A^m v.
  struct Row {
    std::vector<Rational> vec;
    std::vector<Rational> combo;
    std::size_t pivot;
  };
  std::vector<Row> rows;
  IntVector current = v;
  for (std::size_t m = 0; m <= k; ++m) {
    std::vector<Rational> w(current.begin(), current.end());
    std::vector<Rational> combo(m + 1, Rational(0));
    combo[m] = 1;
    for (const auto& row : rows) {
      if (w[row.pivot] == 0) continue;
      const Rational f = w[row.pivot] / row.vec[row.pivot];
      for (std::size_t i = 0; i < k; ++i) w[i] -= f * row.vec[i];
      for (std::size_t i = 0; i < row.combo.size(); ++i) combo[i] -= f * row.combo[i];
    }
    auto pivot = std::find_if(w.begin(), w.end(), [](const Rational& x) { return x != 0; });
    if (pivot == w.end()) {
      std::vector<Integer> coeffs;
      for (const auto& c : combo) {
        if (c.get_den() != 1) throw std::logic_error("minimal polynomial with non-integral coefficient");
        coeffs.emplace_back(c.get_num());
      }
      IntPolynomial p(std::move(coeffs));
      // p(A) v = 0, checked by Horner on vectors.
      IntVector acc(k);
      for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
        acc = a * acc;
        for (std::size_t i = 0; i < k; ++i) acc[i] += *it * v[i];
      }
      if (!is_zero(acc)) throw std::logic_error("Krylov minimal polynomial does not annihilate v");
      auto rts = roots(p);
      return {std::move(p), std::move(rts)};
    }
    const auto pivot_index = static_cast<std::size_t>(pivot - w.begin());
    rows.push_back({std::move(w), std::move(combo), pivot_index});
    current = a * current;
  }
  throw std::logic_error("Krylov sequence did not become dependent");
}

GrowthType orbit_growth(const IntMatrix& a, const IntVector& v) {
  require_dimension(a, v);
  require_unimodular(a);
  return growth_from_roots(minimal_poly_of_vector(a, v).roots, false);
}

GrowthType palangre_growth(const IntMatrix& a, const IntVector& v) {
  require_dimension(a, v);
  require_unimodular(a);
  const GrowthType by_roots = growth_from_roots(minimal_poly_of_vector(a, v).roots, true);
  const GrowthType by_affine = affine_orbit_growth(a, v, IntVector(v.size()));
  if (compare(by_roots, by_affine) != 0) {
    throw std::logic_error("palangre growth routes disagree: " + to_string(by_roots) + " vs " + to_string(by_affine));
  }
  return by_affine;
}

GrowthType affine_orbit_growth(const IntMatrix& b, const IntVector& t, const IntVector& x) {
  require_dimension(b, t);
  require_dimension(b, x);
  require_unimodular(b);
  const std::size_t k = t.size();
  IntMatrix aug(k + 1, k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) aug(i, j) = b(i, j);
    aug(i, k) = t[i];
  }
  aug(k, k) = 1;
  IntVector start = x;
  start.push_back(1);
  // The extra coordinate is the constant 1; its root x = 1 of multiplicity
  // one only contributes (0,1), which every growth type dominates.
  return growth_from_roots(minimal_poly_of_vector(aug, start).roots, false);
}

std::vector<Integer> orbit_oracle(const IntMatrix& a, const IntVector& v, int n_max) {
  require_dimension(a, v);
  std::vector<Integer> out;
  IntVector cur = v;
  for (int n = 0; n <= n_max; ++n) {
    out.push_back(l1_norm(cur));
    if (n < n_max) cur = a * cur;
  }
  return out;
}

std::vector<Integer> palangre_oracle(const IntMatrix& a, const IntVector& v, int n_max) {
  require_dimension(a, v);
  std::vector<Integer> out;
  IntVector sum(v.size());
  IntVector power = v;
  for (int n = 0; n <= n_max; ++n) {
    out.push_back(l1_norm(sum));
    sum += power;
    power = a * power;
  }
  return out;
}

namespace {

/// Roots of the minimal polynomial of A (largest Jordan block per eigenvalue),
/// assembled from the Krylov polynomials of the basis vectors.
std::vector<PolynomialRoot> matrix_minimal_roots(const IntMatrix& a) {
  std::vector<PolynomialRoot> merged;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    IntVector e(a.rows());
    e[i] = 1;
    for (const auto& r : minimal_poly_of_vector(a, e).roots) {
      auto same = std::find_if(merged.begin(), merged.end(), [&](const PolynomialRoot& m) {
        return std::abs(m.value - r.value) <= kClusterTolerance * std::max(1.0, std::abs(r.value));
      });
      if (same == merged.end()) {
        merged.push_back(r);
      } else if (same->multiplicity < r.multiplicity) {
        *same = r;
      }
    }
  }
  return merged;
}

std::vector<GrowthType> spectrum_from_roots(const std::vector<PolynomialRoot>& rts, bool palangre) {
  std::vector<GrowthType> out = {GrowthType::bounded()};
  for (const auto& r : rts) {
    const int top = r.multiplicity - 1 + (palangre && is_one(r.value) ? 1 : 0);
    const std::vector<PolynomialRoot> single = {r};
    const GrowthType base = growth_from_roots(single, false);
    for (int d = 0; d <= top; ++d) {
      GrowthType g = base;
      g.d = d;
      out.push_back(g);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](const GrowthType& x, const GrowthType& y) { return compare(x, y) == 0; }),
            out.end());
  return out;
}

}  // namespace

std::vector<GrowthType> abelian_spectrum(const IntMatrix& a) {
  require_unimodular(a);
  return spectrum_from_roots(matrix_minimal_roots(a), false);
}

std::vector<GrowthType> abelian_palangre_spectrum(const IntMatrix& a) {
  require_unimodular(a);
  return spectrum_from_roots(matrix_minimal_roots(a), true);
}

std::vector<GrowthType> abelian_palangre_spectrum(const IntMatrix& a, unsigned k) {
  if (k <= 1) return abelian_palangre_spectrum(a);
  std::vector<GrowthType> out;
  for (const auto& g : abelian_palangre_spectrum(a.pow(k))) out.push_back(root_rescale(g, k));
  return out;
}

}  // namespace polexp
