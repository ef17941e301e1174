#include "polexp/matrix.hpp"

#include <cctype>

#include "polexp/error.hpp"

namespace polexp {

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<Integer>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.front().size() : 0;
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw Error(ErrorKind::DimensionMismatch, "ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntVector IntMatrix::operator*(const IntVector& v) const {
  if (v.size() != cols_) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix has " + std::to_string(cols_) + " columns, vector has " + std::to_string(v.size()) + " entries");
  }
  IntVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Integer s = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if ((*this)(i, j) != 0 && v[j] != 0) s += (*this)(i, j) * v[j];
    }
    out[i] = s;
  }
  return out;
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
  IntMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Integer& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

IntMatrix IntMatrix::pow(unsigned long k) const {
  if (!square()) throw Error(ErrorKind::DimensionMismatch, "power of a non-square matrix");
  IntMatrix result = identity(rows_);
  IntMatrix base = *this;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return result;
}

Integer IntMatrix::determinant() const {
  if (!square()) throw Error(ErrorKind::DimensionMismatch, "determinant of a non-square matrix");
  const std::size_t n = rows_;
  if (n == 0) return 1;
  std::vector<Integer> m = data_;
  auto at = [&](std::size_t i, std::size_t j) -> Integer& { return m[i * n + j]; };
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && at(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(swap, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
      }
    }
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

bool IntMatrix::is_unimodular() const { return square() && abs(determinant()) == 1; }

IntMatrix IntMatrix::unimodular_inverse() const {
  if (!is_unimodular()) throw Error(ErrorKind::NotUnimodular, "matrix " + to_string(*this) + " is not invertible over Z");
  const std::size_t n = rows_;
  // Gauss-Jordan over Q on [A | I]; the result is integral since det = +-1.
  std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(2 * n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug[r][c] = (*this)(r, c);
    aug[r][n + r] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (aug[piv][c] == 0) ++piv;
    std::swap(aug[piv], aug[c]);
    const Rational d = aug[c][c];
    for (auto& x : aug[c]) x /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || aug[r][c] == 0) continue;
      const Rational f = aug[r][c];
      for (std::size_t t = c; t < 2 * n; ++t) aug[r][t] -= f * aug[c][t];
    }
  }
  IntMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = Integer(aug[r][n + c]);
  }
  return inv;
}

std::string to_string(const IntMatrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) s += ",";
    s += "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) s += ",";
      s += m(i, j).get_str();
    }
    s += "]";
  }
  return s + "]";
}

namespace {

struct BracketParser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError, "column " + std::to_string(pos + 1) + ": " + msg + " in '" + std::string(text) + "'");
  }
  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  void expect(char c) {
    skip();
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  bool peek(char c) {
    skip();
    return pos < text.size() && text[pos] == c;
  }
  Integer integer() {
    skip();
    const std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    const std::size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (digits == pos) fail("expected integer");
    std::string s(text.substr(start, pos - start));
    if (s[0] == '+') s.erase(0, 1);
    return Integer(s);
  }
  IntVector vector() {
    IntVector v;
    expect('[');
    if (peek(']')) {
      ++pos;
      return v;
    }
    while (true) {
      v.push_back(integer());
      if (peek(',')) {
        ++pos;
        continue;
      }
      expect(']');
      return v;
    }
  }
  void finish() {
    skip();
    if (pos != text.size()) fail("trailing characters");
  }
};

}  // namespace

IntMatrix parse_matrix(std::string_view text) {
  BracketParser p{text};
  std::vector<std::vector<Integer>> rows;
  p.expect('[');
  while (true) {
    rows.push_back(p.vector());
    if (p.peek(',')) {
      ++p.pos;
      continue;
    }
    p.expect(']');
    break;
  }
  p.finish();
  return IntMatrix::from_rows(rows);
}

IntVector parse_vector(std::string_view text) {
  BracketParser p{text};
  IntVector v = p.vector();
  p.finish();
  return v;
}

}  // namespace polexp
