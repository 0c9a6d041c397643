/* Copyright 2026 The qrcert Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qrcert {

/// Dense row-major binary64 matrix.
///
/// The plain constructors accept any value, including infinities, because the
/// same storage backs bound matrices. Use `FloatMatrix::input` for data that
/// must be finite (an input matrix A or a caller-supplied R factor).
class FloatMatrix {
 public:
  FloatMatrix() = default;
  FloatMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  FloatMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  FloatMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static FloatMatrix identity(std::size_t n);
  // Throws InputError on NaN or infinite entries.
  static FloatMatrix input(std::size_t rows, std::size_t cols,
                           std::vector<double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> entries() const noexcept { return data_; }
  std::span<double> entries() noexcept { return data_; }

  bool all_finite() const noexcept;
  FloatMatrix transposed() const;

  friend bool operator==(const FloatMatrix&, const FloatMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square matrix whose strictly lower part is identically (bit-exact) zero.
class UpperTriangularMatrix {
 public:
  UpperTriangularMatrix() = default;
  explicit UpperTriangularMatrix(std::size_t n) : m_(n, n) {}

  // Validating conversion: square, finite, zero below the diagonal.
  static UpperTriangularMatrix from_matrix(const FloatMatrix& m);
  // Keeps the upper triangle of m and zeroes the rest.
  static UpperTriangularMatrix triu(FloatMatrix m);

  std::size_t order() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return m_(i, j);
  }
  // Write access to the upper triangle (i <= j).
  double& at(std::size_t i, std::size_t j);

  const FloatMatrix& matrix() const noexcept { return m_; }
  bool has_positive_diagonal() const noexcept;

  friend bool operator==(const UpperTriangularMatrix&,
                         const UpperTriangularMatrix&) = default;

 private:
  FloatMatrix m_;
};

/// Modified Gram-Schmidt R factor of a square finite matrix, computed in
/// round-to-nearest. Diagonal entries are norms and hence nonnegative.
///
/// This is the approximate step of the certificate: nothing downstream
/// relies on its accuracy. Throws ZeroColumnError when a pivot norm is zero or
/// not finite, and std::logic_error when a RoundingGuard is active.
UpperTriangularMatrix mgs_qr(const FloatMatrix& a);

/// Approximate inverse of an upper triangular matrix by column-wise back
/// substitution in round-to-nearest. Throws DivisionByZeroError on a zero
/// diagonal entry.
UpperTriangularMatrix tri_inverse_approx(const UpperTriangularMatrix& r);

/// Flips the sign of every row whose diagonal entry is negative, so that a
/// caller-supplied R factor follows the positive-diagonal convention. Throws
/// InputError on a zero diagonal entry.
UpperTriangularMatrix normalize_diagonal_sign(const UpperTriangularMatrix& r);

}  // namespace qrcert
