#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "polexp/integer.hpp"

namespace polexp {

/// Dense matrix of arbitrary-precision integers, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<Integer>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntVector operator*(const IntVector& v) const;
  IntMatrix operator*(const IntMatrix& other) const;
  IntMatrix pow(unsigned long k) const;

  /// Exact determinant by fraction-free (Bareiss) elimination.
  Integer determinant() const;
  bool is_unimodular() const;
  /// Exact inverse; throws NotUnimodular unless |det| = 1.
  IntMatrix unimodular_inverse() const;

  bool operator==(const IntMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

std::string to_string(const IntMatrix& m);

/// "[[1,2],[3,4]]"
IntMatrix parse_matrix(std::string_view text);
/// "[1,-2,3]"
IntVector parse_vector(std::string_view text);

}  // namespace polexp
