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

#include "qrcert/matrix.hpp"

namespace qrcert {

/// Componentwise enclosure [lo, hi] of a set of real matrices.
class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  // Throws ShapeError on mismatched shapes, InputError on NaN or lo > hi.
  IntervalMatrix(FloatMatrix lo, FloatMatrix hi);
  static IntervalMatrix point(FloatMatrix m);

  std::size_t rows() const noexcept { return lo_.rows(); }
  std::size_t cols() const noexcept { return lo_.cols(); }
  const FloatMatrix& lo() const noexcept { return lo_; }
  const FloatMatrix& hi() const noexcept { return hi_; }
  bool is_point() const noexcept { return lo_ == hi_; }
  bool contains(const FloatMatrix& m) const noexcept;

 private:
  FloatMatrix lo_;
  FloatMatrix hi_;
};

/// Entrywise nonnegative matrix of certified absolute bounds. +inf means "no
/// finite bound"; it is never turned back into a finite value by the kernels
/// below.
class BoundMatrix {
 public:
  BoundMatrix() = default;
  BoundMatrix(std::size_t rows, std::size_t cols) : m_(rows, cols) {}
  // Throws InputError on a negative or NaN entry.
  explicit BoundMatrix(FloatMatrix values);
  // Kernel output: NaN (from inf - inf or 0 * inf) becomes +inf.
  static BoundMatrix saturating(FloatMatrix values);
  // |m|, an exact operation.
  static BoundMatrix abs_of(const FloatMatrix& m);
  static BoundMatrix filled(std::size_t rows, std::size_t cols, double value);

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  const FloatMatrix& values() const noexcept { return m_; }
  bool all_finite() const noexcept { return m_.all_finite(); }
  double max_entry() const noexcept;

 private:
  FloatMatrix m_;
};

// Sparsity pattern of an operand of a certified product. Structural zeros are
// skipped; adding an exact zero never changes a directed-rounded sum.
enum class Structure { Dense, Upper };

enum class ScalarOp { Add, Sub, Mul, Div };

struct ScalarBound {
  double lo;
  double hi;
  double absbound;
};

/// lo <= a op b <= hi with lo, hi the downward and upward rounded results,
/// and absbound = max(|lo|, |hi|). Overflow yields infinite endpoints.
/// Throws InputError for non-finite operands, DivisionByZeroError for b = 0.
ScalarBound scalar_bound(double a, double b, ScalarOp op);

struct ProductResidual {
  IntervalMatrix enc;  // encloses the exact A*B - C
  BoundMatrix bound;   // >= |A*B - C| componentwise
};

/// Encloses the exact residual A*B - C by evaluating it once rounding
/// downward and once rounding upward, accumulating each inner product left to
/// right in both passes.
ProductResidual product_residual_bound(const FloatMatrix& a, const FloatMatrix& b,
                                       const FloatMatrix& c,
                                       Structure sa = Structure::Dense,
                                       Structure sb = Structure::Dense);

/// Enclosure of A*B with C = 0.
IntervalMatrix product_enclosure(const FloatMatrix& a, const FloatMatrix& b,
                                 Structure sa = Structure::Dense,
                                 Structure sb = Structure::Dense);

/// Enclosure of {A*B : A in a} for a point matrix B, choosing per term the
/// endpoint of A that minimises (maximises) the product. Two products.
IntervalMatrix interval_product(const IntervalMatrix& a, const FloatMatrix& b,
                                Structure sb = Structure::Dense);

/// R >= |M*N - I| for every real M in m and N in n, by midpoint-radius
/// evaluation: four matrix products.
BoundMatrix midrad_residual_bound(const IntervalMatrix& m, const IntervalMatrix& n);

/// R >= |N^T*N - I| for every N in n. The exact residual is symmetric, so only
/// the upper triangle is evaluated and then mirrored; with Structure::Upper
/// the triangular shape of N is exploited too.
BoundMatrix gram_residual_bound(const IntervalMatrix& n, Structure sn = Structure::Dense);

/// max(|lo|, |hi|) componentwise.
BoundMatrix abs_bound(const IntervalMatrix& m);

/// u >= max row sum, summed rounding upward.
double inf_norm_upper(const BoundMatrix& b);
double inf_norm_upper(const FloatMatrix& m);  // of |m|

// Upward-rounded arithmetic on nonnegative data; every result is an upper
// bound of the exact value.
BoundMatrix nonneg_add(const BoundMatrix& a, const BoundMatrix& b);
BoundMatrix nonneg_product(const BoundMatrix& a, const BoundMatrix& b,
                           Structure sa = Structure::Dense,
                           Structure sb = Structure::Dense);
// Upper bound of X^T * Y for nonnegative X, Y whose exact product is known to
// be symmetric: the upper triangle is evaluated and mirrored. With
// Structure::Upper, X is upper triangular.
BoundMatrix nonneg_symmetric_transpose_product(const BoundMatrix& x, const BoundMatrix& y,
                                               Structure sx = Structure::Dense);
// Upper bound of x / (1 - g) for 0 <= g < 1, rounding upward only: the
// denominator is bounded from below by negating an upward-rounded g - 1.
// Throws DomainError unless g < 1.
double upper_div_by_one_minus(double x, double g);
// Upper bound of x^2 / (1 - g).
double upper_square_over_one_minus(double x, double g);

// Mirrors the upper triangle onto the lower one.
void symmetrize_from_upper(FloatMatrix& m);

}  // namespace qrcert
