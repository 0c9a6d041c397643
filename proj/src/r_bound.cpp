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

#include "qrcert/r_bound.hpp"

#include <cmath>
#include <limits>

#include "qrcert/errors.hpp"
#include "qrcert/rounding.hpp"

namespace qrcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundMatrix infinite_triu(std::size_t n) {
  FloatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = kInf;
  return BoundMatrix(std::move(m));
}

RBoundReport failed(std::size_t n, double g_norm, double w_norm, RBoundStatus status) {
  return {infinite_triu(n), infinite_triu(n), g_norm, w_norm, status};
}

}  // namespace

std::string_view to_string(RBoundStatus status) noexcept {
  switch (status) {
    case RBoundStatus::Finite:
      return "Finite";
    case RBoundStatus::InvertibilityCheckFailed:
      return "InvertibilityCheckFailed";
    case RBoundStatus::SpectralRadiusCheckFailed:
      return "SpectralRadiusCheckFailed";
    case RBoundStatus::Overflow:
      return "Overflow";
  }
  return "Unknown";
}

InvertibilityCheck check_invertibility(const UpperTriangularMatrix& r,
                                       const UpperTriangularMatrix& v) {
  if (r.order() != v.order()) throw ShapeError("check_invertibility: order mismatch");
  IntervalMatrix w = product_enclosure(r.matrix(), v.matrix(), Structure::Upper, Structure::Upper);

  // |W - I| from the endpoints; only the diagonal needs a directed subtraction.
  const std::size_t n = r.order();
  FloatMatrix lo = w.lo(), hi = w.hi();
  with_rounding<Direction::Downward>([&](auto ar) {
    for (std::size_t i = 0; i < n; ++i) lo(i, i) = ar.sub(lo(i, i), 1.0);
    return 0;
  });
  with_rounding<Direction::Upward>([&](auto ar) {
    for (std::size_t i = 0; i < n; ++i) hi(i, i) = ar.sub(hi(i, i), 1.0);
    return 0;
  });
  const double norm = inf_norm_upper(abs_bound(IntervalMatrix(std::move(lo), std::move(hi))));
  return {std::move(w), norm, norm < 1.0};
}

BoundMatrix bound_w_inverse(const IntervalMatrix& w_enc, double w_res_norm) {
  if (!(w_res_norm < 1.0)) throw DomainError("bound_w_inverse: requires ||I - W|| < 1");
  const std::size_t n = w_enc.rows();
  const double tail = upper_square_over_one_minus(w_res_norm, w_res_norm);

  FloatMatrix out(n, n);
  with_rounding<Direction::Upward>([&](auto ar) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double lo = w_enc.lo()(i, j), hi = w_enc.hi()(i, j);
        double a;
        if (i == j) {
          // 2 - W_ii lies in [2 - hi, 2 - lo]; the lower end rounds downward,
          // which is the negation of an upward hi - 2.
          const double top = ar.sub(2.0, lo);
          const double bottom = -ar.sub(hi, 2.0);
          a = std::max(std::abs(top), std::abs(bottom));
        } else {
          a = std::max(std::abs(lo), std::abs(hi));
        }
        out(i, j) = ar.add(a, tail);
      }
    }
    return 0;
  });
  return BoundMatrix::saturating(std::move(out));
}

GBound bound_g(const IntervalMatrix& a_enc, const UpperTriangularMatrix& v,
               const IntervalMatrix& w_enc, const BoundMatrix& w_inv_bound) {
  const std::size_t n = v.order();
  if (a_enc.rows() != n || a_enc.cols() != n || w_enc.rows() != n || w_inv_bound.rows() != n)
    throw ShapeError("bound_g: order mismatch");

  const BoundMatrix w_gram = gram_residual_bound(w_enc, Structure::Upper);
  const IntervalMatrix av = interval_product(a_enc, v.matrix(), Structure::Upper);
  const BoundMatrix a_gram = gram_residual_bound(av, Structure::Dense);
  const BoundMatrix middle = nonneg_add(a_gram, w_gram);
  const BoundMatrix right = nonneg_product(middle, w_inv_bound, Structure::Dense, Structure::Upper);
  BoundMatrix g = nonneg_symmetric_transpose_product(w_inv_bound, right, Structure::Upper);
  const double g_norm = inf_norm_upper(g);
  return {std::move(g), g_norm};
}

BoundMatrix bound_h(const BoundMatrix& g, double g_norm) {
  if (!(g_norm < 1.0))
    throw SpectralRadiusCheckError("bound_h: ||G||_inf bound is not below 1");
  const std::size_t n = g.rows();
  const double tail = upper_square_over_one_minus(g_norm, g_norm);
  FloatMatrix out(n, n);
  with_rounding<Direction::Upward>([&](auto ar) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) out(i, j) = ar.add(g(i, j), tail);
    return 0;
  });
  return BoundMatrix::saturating(std::move(out));
}

RBoundReport bound_r_error(const IntervalMatrix& a_enc, const UpperTriangularMatrix& r) {
  const std::size_t n = r.order();
  if (n == 0 || a_enc.rows() != n || a_enc.cols() != n)
    throw ShapeError("bound_r_error: A and R~ must be square of the same order");
  if (!r.has_positive_diagonal())
    throw InputError("bound_r_error: R~ must have a positive diagonal");
  if (!r.matrix().all_finite()) throw InputError("bound_r_error: R~ must be finite");

  const UpperTriangularMatrix v = tri_inverse_approx(r);

  InvertibilityCheck inv = check_invertibility(r, v);
  if (!inv.ok) {
    const auto status = std::isfinite(inv.w_res_norm) ? RBoundStatus::InvertibilityCheckFailed
                                                      : RBoundStatus::Overflow;
    return failed(n, kInf, inv.w_res_norm, status);
  }

  const BoundMatrix w_inv = bound_w_inverse(inv.w_enc, inv.w_res_norm);
  GBound gb = bound_g(a_enc, v, inv.w_enc, w_inv);
  if (!(gb.g_norm < 1.0)) {
    const auto status = std::isfinite(gb.g_norm) ? RBoundStatus::SpectralRadiusCheckFailed
                                                 : RBoundStatus::Overflow;
    return failed(n, gb.g_norm, inv.w_res_norm, status);
  }

  BoundMatrix h = bound_h(gb.g, gb.g_norm);
  BoundMatrix f = nonneg_product(h, BoundMatrix::abs_of(r.matrix()), Structure::Upper,
                                 Structure::Upper);
  if (!f.all_finite()) return failed(n, gb.g_norm, inv.w_res_norm, RBoundStatus::Overflow);
  return {std::move(h), std::move(f), gb.g_norm, inv.w_res_norm, RBoundStatus::Finite};
}

}  // namespace qrcert
