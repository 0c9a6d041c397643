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

#include "qrcert/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qrcert/errors.hpp"
#include "qrcert/flops.hpp"
#include "qrcert/rounding.hpp"

namespace qrcert {

namespace flops {
namespace {
thread_local std::uint64_t counter = 0;
}
std::uint64_t count() noexcept { return counter; }
void reset() noexcept { counter = 0; }
void add(std::uint64_t n) noexcept { counter += n; }
}  // namespace flops

FloatMatrix::FloatMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

FloatMatrix::FloatMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("FloatMatrix: entry count " +
                     std::to_string(data_.size()) + " != " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

FloatMatrix::FloatMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("FloatMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

FloatMatrix FloatMatrix::identity(std::size_t n) {
  FloatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

FloatMatrix FloatMatrix::input(std::size_t rows, std::size_t cols,
                               std::vector<double> entries) {
  if (rows == 0 || cols == 0) throw ShapeError("FloatMatrix: empty matrix");
  FloatMatrix m(rows, cols, std::move(entries));
  if (!m.all_finite()) throw InputError("FloatMatrix: NaN or infinite entry");
  return m;
}

bool FloatMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

FloatMatrix FloatMatrix::transposed() const {
  FloatMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

UpperTriangularMatrix UpperTriangularMatrix::from_matrix(const FloatMatrix& m) {
  if (!m.is_square() || m.empty())
    throw ShapeError("UpperTriangularMatrix: matrix must be square and nonempty");
  if (!m.all_finite())
    throw InputError("UpperTriangularMatrix: NaN or infinite entry");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (m(i, j) != 0.0)
        throw InputError("UpperTriangularMatrix: nonzero entry below diagonal at (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
  UpperTriangularMatrix u;
  u.m_ = triu(m).m_;
  return u;
}

UpperTriangularMatrix UpperTriangularMatrix::triu(FloatMatrix m) {
  if (!m.is_square()) throw ShapeError("triu: matrix must be square");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = 0.0;  // also clears -0.0
  UpperTriangularMatrix u;
  u.m_ = std::move(m);
  return u;
}

double& UpperTriangularMatrix::at(std::size_t i, std::size_t j) {
  if (i > j) throw std::out_of_range("UpperTriangularMatrix::at below diagonal");
  return m_(i, j);
}

bool UpperTriangularMatrix::has_positive_diagonal() const noexcept {
  for (std::size_t i = 0; i < order(); ++i)
    if (!(m_(i, i) > 0.0)) return false;
  return true;
}

namespace {

double column_norm(std::span<const double> c) {
  double s = 0.0;
  for (double x : c) s += x * x;
  if (std::isfinite(s)) return std::sqrt(s);
  // Rescale when the plain sum of squares overflows.
  double scale = 0.0;
  for (double x : c) scale = std::max(scale, std::abs(x));
  if (!std::isfinite(scale) || scale == 0.0) return s;
  double t = 0.0;
  for (double x : c) t += (x / scale) * (x / scale);
  return scale * std::sqrt(t);
}

}  // namespace

UpperTriangularMatrix mgs_qr(const FloatMatrix& a) {
  if (!a.is_square() || a.empty()) throw ShapeError("mgs_qr: matrix must be square");
  if (!a.all_finite()) throw InputError("mgs_qr: NaN or infinite entry");
  if (RoundingGuard::active())
    throw std::logic_error("mgs_qr: called while a directed-rounding guard is active");

  const std::size_t n = a.rows();
  // Column-major working copy so that every column is contiguous.
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[j * n + i] = a(i, j);

  UpperTriangularMatrix r(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::span<double> qk(q.data() + k * n, n);
    const double norm = column_norm(qk);
    flops::add(2 * n);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ZeroColumnError(k, "mgs_qr: pivot norm of column " + std::to_string(k) +
                                   (norm == 0.0 ? " is zero" : " is not finite"));
    }
    r.at(k, k) = norm;
    for (double& x : qk) x /= norm;

    for (std::size_t j = k + 1; j < n; ++j) {
      double* qj = q.data() + j * n;
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += qk[i] * qj[i];
      r.at(k, j) = dot;
      for (std::size_t i = 0; i < n; ++i) qj[i] -= dot * qk[i];
    }
    flops::add(4 * n * (n - k - 1));
  }
  return r;
}

UpperTriangularMatrix tri_inverse_approx(const UpperTriangularMatrix& r) {
  const std::size_t n = r.order();
  for (std::size_t i = 0; i < n; ++i)
    if (r(i, i) == 0.0)
      throw DivisionByZeroError("tri_inverse_approx: zero diagonal entry at " +
                                std::to_string(i));

  UpperTriangularMatrix v(n);
  for (std::size_t j = 0; j < n; ++j) {
    v.at(j, j) = 1.0 / r(j, j);
    for (std::size_t ii = j; ii-- > 0;) {
      double s = 0.0;
      for (std::size_t k = ii + 1; k <= j; ++k) s += r(ii, k) * v(k, j);
      v.at(ii, j) = -s / r(ii, ii);
    }
    flops::add(j * (j + 1));
  }
  return v;
}

UpperTriangularMatrix normalize_diagonal_sign(const UpperTriangularMatrix& r) {
  FloatMatrix m = r.matrix();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m(i, i) == 0.0)
      throw InputError("normalize_diagonal_sign: zero diagonal entry at " +
                       std::to_string(i));
    if (m(i, i) < 0.0)
      for (std::size_t j = i; j < m.cols(); ++j) m(i, j) = -m(i, j);
  }
  return UpperTriangularMatrix::triu(std::move(m));
}

}  // namespace qrcert
