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

#include "qrcert/certified.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qrcert/errors.hpp"
#include "qrcert/flops.hpp"
#include "qrcert/rounding.hpp"

namespace qrcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr Direction kDown = Direction::Downward;
constexpr Direction kUp = Direction::Upward;

// max that never hides a NaN: a missing bound is an infinite bound.
inline double bound_max(double a, double b) noexcept {
  if (std::isnan(a) || std::isnan(b)) return kInf;
  return a > b ? a : b;
}

void require_same_shape(const FloatMatrix& a, const FloatMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(what) + ": shape mismatch");
}

void sanitize_interval(FloatMatrix& lo, FloatMatrix& hi) {
  for (double& x : lo.entries())
    if (std::isnan(x)) x = -kInf;
  for (double& x : hi.entries())
    if (std::isnan(x)) x = kInf;
}

// Cache blocking of the product kernels. Blocks are visited with k ascending
// for every output entry, so each inner product is still accumulated left to
// right and the results do not depend on the block sizes.
constexpr std::size_t kBlockK = 96;
constexpr std::size_t kBlockJ = 384;

// out += A*B accumulated per entry over ascending k, skipping structural
// zeros of A (k < i) and B (j < k).
template <class Arith>
void gemm_acc(const FloatMatrix& a, const FloatMatrix& b, FloatMatrix& out,
              Structure sa, Structure sb, Arith ar) {
  const std::size_t m = a.rows(), p = a.cols(), q = b.cols();
  std::uint64_t work = 0;
  for (std::size_t jb = 0; jb < q; jb += kBlockJ) {
    const std::size_t je = std::min(q, jb + kBlockJ);
    for (std::size_t kb = 0; kb < p; kb += kBlockK) {
      const std::size_t ke = std::min(p, kb + kBlockK);
      for (std::size_t i = 0; i < m; ++i) {
        double* orow = out.row(i).data();
        const double* arow = a.row(i).data();
        for (std::size_t k = (sa == Structure::Upper ? std::max(kb, i) : kb); k < ke; ++k) {
          const double aik = arow[k];
          const double* brow = b.row(k).data();
          const std::size_t j0 = (sb == Structure::Upper ? std::max(jb, k) : jb);
          for (std::size_t j = j0; j < je; ++j) orow[j] = ar.add(orow[j], ar.mul(aik, brow[j]));
          if (je > j0) work += je - j0;
        }
      }
    }
  }
  flops::add(2 * work);
}

// Product of an interval matrix [alo, ahi] by a point matrix B. For the
// lower bound each term takes the endpoint minimising a*b, for the upper
// bound the one maximising it.
template <bool Upper, class Arith>
void interval_gemm(const FloatMatrix& alo, const FloatMatrix& ahi, const FloatMatrix& b,
                   FloatMatrix& out, Structure sb, Arith ar) {
  const std::size_t m = alo.rows(), p = alo.cols(), q = b.cols();
  std::uint64_t work = 0;
  for (std::size_t jb = 0; jb < q; jb += kBlockJ) {
    const std::size_t je = std::min(q, jb + kBlockJ);
    for (std::size_t kb = 0; kb < p; kb += kBlockK) {
      const std::size_t ke = std::min(p, kb + kBlockK);
      for (std::size_t i = 0; i < m; ++i) {
        double* orow = out.row(i).data();
        for (std::size_t k = kb; k < ke; ++k) {
          const double lo = alo(i, k), hi = ahi(i, k);
          const double* brow = b.row(k).data();
          const std::size_t j0 = (sb == Structure::Upper ? std::max(jb, k) : jb);
          if (lo == hi) {
            for (std::size_t j = j0; j < je; ++j) orow[j] = ar.add(orow[j], ar.mul(lo, brow[j]));
          } else {
            for (std::size_t j = j0; j < je; ++j) {
              const double bv = brow[j];
              const double av = ((bv >= 0.0) == Upper) ? hi : lo;
              orow[j] = ar.add(orow[j], ar.mul(av, bv));
            }
          }
          if (je > j0) work += je - j0;
        }
      }
    }
  }
  flops::add(2 * work);
}

// out(i, j) += sum_k X(k, i) * Y(k, j) for i <= j, i.e. the upper triangle of
// X^T * Y, ascending k. With Structure::Upper, X(k, i) = 0 for k > i.
template <class Arith>
void gram_acc(const FloatMatrix& x, const FloatMatrix& y, FloatMatrix& out, Structure sx,
              Arith ar) {
  const std::size_t n = x.cols(), p = x.rows();
  std::uint64_t work = 0;
  for (std::size_t jb = 0; jb < n; jb += kBlockJ) {
    const std::size_t je = std::min(n, jb + kBlockJ);
    for (std::size_t kb = 0; kb < p; kb += kBlockK) {
      const std::size_t ke = std::min(p, kb + kBlockK);
      for (std::size_t i = 0; i < je; ++i) {
        double* orow = out.row(i).data();
        const std::size_t kend = (sx == Structure::Upper) ? std::min(ke, i + 1) : ke;
        const std::size_t j0 = std::max(jb, i);
        for (std::size_t k = kb; k < kend; ++k) {
          const double xv = x(k, i);
          const double* yrow = y.row(k).data();
          for (std::size_t j = j0; j < je; ++j) orow[j] = ar.add(orow[j], ar.mul(xv, yrow[j]));
        }
        if (kend > kb) work += (kend - kb) * (je - j0);
      }
    }
  }
  flops::add(2 * work);
}

template <class Arith>
void subtract_identity(FloatMatrix& m, Arith ar) {
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) m(i, i) = ar.sub(m(i, i), 1.0);
}

struct MidRad {
  FloatMatrix mid;
  FloatMatrix rad;
};

// Upward-rounded midpoint and radius: [mid - rad, mid + rad] contains [lo, hi].
MidRad midrad_of(const IntervalMatrix& x) {
  if (x.is_point()) return {x.lo(), FloatMatrix(x.rows(), x.cols())};
  return with_rounding<kUp>([&](auto ar) {
    MidRad out{FloatMatrix(x.rows(), x.cols()), FloatMatrix(x.rows(), x.cols())};
    auto lo = x.lo().entries(), hi = x.hi().entries();
    auto mid = out.mid.entries(), rad = out.rad.entries();
    for (std::size_t e = 0; e < lo.size(); ++e) {
      mid[e] = ar.mul(ar.add(lo[e], hi[e]), 0.5);
      rad[e] = ar.sub(mid[e], lo[e]);
    }
    return out;
  });
}

FloatMatrix abs_matrix(const FloatMatrix& m) {
  FloatMatrix out(m.rows(), m.cols());
  auto src = m.entries();
  auto dst = out.entries();
  for (std::size_t e = 0; e < src.size(); ++e) dst[e] = std::abs(src[e]);
  return out;
}

bool is_zero(const FloatMatrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(),
                     [](double x) { return x == 0.0; });
}

// Common tail of the midpoint-radius program: max(|lo|, |hi|) + t1 + t2,
// all upward, NaN saturating.
BoundMatrix combine_midrad(const FloatMatrix& rlo, const FloatMatrix& rhi,
                           const FloatMatrix& t1, const FloatMatrix& t2) {
  FloatMatrix out(rlo.rows(), rlo.cols());
  with_rounding<kUp>([&](auto ar) {
    auto lo = rlo.entries(), hi = rhi.entries(), a = t1.entries(), b = t2.entries();
    auto dst = out.entries();
    for (std::size_t e = 0; e < dst.size(); ++e)
      dst[e] = ar.add(ar.add(bound_max(std::abs(lo[e]), std::abs(hi[e])), a[e]), b[e]);
    return 0;
  });
  return BoundMatrix::saturating(std::move(out));
}

}  // namespace

// ---------------------------------------------------------------------------

IntervalMatrix::IntervalMatrix(FloatMatrix lo, FloatMatrix hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  require_same_shape(lo_, hi_, "IntervalMatrix");
  auto l = lo_.entries(), h = hi_.entries();
  for (std::size_t e = 0; e < l.size(); ++e)
    if (!(l[e] <= h[e])) throw InputError("IntervalMatrix: lo > hi or NaN endpoint");
}

IntervalMatrix IntervalMatrix::point(FloatMatrix m) {
  FloatMatrix copy = m;
  return IntervalMatrix(std::move(m), std::move(copy));
}

bool IntervalMatrix::contains(const FloatMatrix& m) const noexcept {
  if (m.rows() != rows() || m.cols() != cols()) return false;
  auto l = lo_.entries(), h = hi_.entries(), x = m.entries();
  for (std::size_t e = 0; e < x.size(); ++e)
    if (!(l[e] <= x[e] && x[e] <= h[e])) return false;
  return true;
}

BoundMatrix::BoundMatrix(FloatMatrix values) : m_(std::move(values)) {
  for (double x : m_.entries())
    if (!(x >= 0.0)) throw InputError("BoundMatrix: negative or NaN entry");
}

BoundMatrix BoundMatrix::saturating(FloatMatrix values) {
  for (double& x : values.entries())
    if (std::isnan(x)) x = kInf;
  return BoundMatrix(std::move(values));
}

BoundMatrix BoundMatrix::abs_of(const FloatMatrix& m) {
  return BoundMatrix::saturating(abs_matrix(m));
}

BoundMatrix BoundMatrix::filled(std::size_t rows, std::size_t cols, double value) {
  return BoundMatrix(FloatMatrix(rows, cols, value));
}

double BoundMatrix::max_entry() const noexcept {
  double mx = 0.0;
  for (double x : m_.entries()) mx = bound_max(mx, x);
  return mx;
}

// ---------------------------------------------------------------------------

ScalarBound scalar_bound(double a, double b, ScalarOp op) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw InputError("scalar_bound: operands must be finite");
  if (op == ScalarOp::Div && b == 0.0) throw DivisionByZeroError("scalar_bound: division by zero");
  auto eval = [op](auto ar, double x, double y) {
    switch (op) {
      case ScalarOp::Add:
        return ar.add(x, y);
      case ScalarOp::Sub:
        return ar.sub(x, y);
      case ScalarOp::Mul:
        return ar.mul(x, y);
      case ScalarOp::Div:
        break;
    }
    return ar.div(x, y);
  };
  const double lo = with_rounding<kDown>(
      [&](auto ar) { return opaque(eval(ar, opaque(a), opaque(b))); });
  const double hi = with_rounding<kUp>(
      [&](auto ar) { return opaque(eval(ar, opaque(a), opaque(b))); });
  return {lo, hi, std::max(std::abs(lo), std::abs(hi))};
}

ProductResidual product_residual_bound(const FloatMatrix& a, const FloatMatrix& b,
                                       const FloatMatrix& c, Structure sa, Structure sb) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
    throw ShapeError("product_residual_bound: shape mismatch");
  if ((sa == Structure::Upper && !a.is_square()) || (sb == Structure::Upper && !b.is_square()))
    throw ShapeError("product_residual_bound: triangular operand must be square");

  auto pass = [&](auto ar) {
    FloatMatrix r(a.rows(), b.cols());
    gemm_acc(a, b, r, sa, sb, ar);
    auto dst = r.entries();
    auto src = c.entries();
    for (std::size_t e = 0; e < dst.size(); ++e) dst[e] = ar.sub(dst[e], src[e]);
    return r;
  };
  FloatMatrix lo = with_rounding<kDown>(pass);
  FloatMatrix hi = with_rounding<kUp>(pass);
  sanitize_interval(lo, hi);
  IntervalMatrix enc(std::move(lo), std::move(hi));
  BoundMatrix bound = abs_bound(enc);
  return {std::move(enc), std::move(bound)};
}

IntervalMatrix product_enclosure(const FloatMatrix& a, const FloatMatrix& b, Structure sa,
                                 Structure sb) {
  return product_residual_bound(a, b, FloatMatrix(a.rows(), b.cols()), sa, sb).enc;
}

IntervalMatrix interval_product(const IntervalMatrix& a, const FloatMatrix& b, Structure sb) {
  if (a.cols() != b.rows()) throw ShapeError("interval_product: shape mismatch");
  if (sb == Structure::Upper && !b.is_square())
    throw ShapeError("interval_product: triangular operand must be square");
  FloatMatrix lo = with_rounding<kDown>([&](auto ar) {
    FloatMatrix r(a.rows(), b.cols());
    interval_gemm<false>(a.lo(), a.hi(), b, r, sb, ar);
    return r;
  });
  FloatMatrix hi = with_rounding<kUp>([&](auto ar) {
    FloatMatrix r(a.rows(), b.cols());
    interval_gemm<true>(a.lo(), a.hi(), b, r, sb, ar);
    return r;
  });
  sanitize_interval(lo, hi);
  return IntervalMatrix(std::move(lo), std::move(hi));
}

BoundMatrix midrad_residual_bound(const IntervalMatrix& m, const IntervalMatrix& n) {
  if (m.cols() != n.rows() || m.rows() != n.cols())
    throw ShapeError("midrad_residual_bound: product must be square");
  const MidRad mm = midrad_of(m);
  const MidRad mn = midrad_of(n);

  FloatMatrix rlo = with_rounding<kDown>([&](auto ar) {
    FloatMatrix r(m.rows(), n.cols());
    gemm_acc(mm.mid, mn.mid, r, Structure::Dense, Structure::Dense, ar);
    subtract_identity(r, ar);
    return r;
  });
  FloatMatrix rhi(m.rows(), n.cols()), t1(m.rows(), n.cols()), t2(m.rows(), n.cols());
  with_rounding<kUp>([&](auto ar) {
    gemm_acc(mm.mid, mn.mid, rhi, Structure::Dense, Structure::Dense, ar);
    subtract_identity(rhi, ar);
    const bool n_point = is_zero(mn.rad), m_point = is_zero(mm.rad);
    if (!n_point) gemm_acc(abs_matrix(mm.mid), mn.rad, t1, Structure::Dense, Structure::Dense, ar);
    if (!m_point) {
      FloatMatrix s = abs_matrix(mn.mid);
      auto sv = s.entries();
      auto rv = mn.rad.entries();
      for (std::size_t e = 0; e < sv.size(); ++e) sv[e] = ar.add(sv[e], rv[e]);
      gemm_acc(mm.rad, s, t2, Structure::Dense, Structure::Dense, ar);
    }
    return 0;
  });
  return combine_midrad(rlo, rhi, t1, t2);
}

BoundMatrix gram_residual_bound(const IntervalMatrix& n, Structure sn) {
  if (sn == Structure::Upper && n.rows() != n.cols())
    throw ShapeError("gram_residual_bound: triangular operand must be square");
  const std::size_t d = n.cols();
  const MidRad mr = midrad_of(n);

  FloatMatrix rlo = with_rounding<kDown>([&](auto ar) {
    FloatMatrix r(d, d);
    gram_acc(mr.mid, mr.mid, r, sn, ar);
    subtract_identity(r, ar);
    return r;
  });
  FloatMatrix rhi(d, d), t1(d, d), t2(d, d);
  with_rounding<kUp>([&](auto ar) {
    gram_acc(mr.mid, mr.mid, rhi, sn, ar);
    subtract_identity(rhi, ar);
    if (!is_zero(mr.rad)) {
      // |m_M| r_N + r_M (|m_N| + r_N) with M = N^T.
      const FloatMatrix am = abs_matrix(mr.mid);
      FloatMatrix s = am;
      auto sv = s.entries();
      auto rv = mr.rad.entries();
      for (std::size_t e = 0; e < sv.size(); ++e) sv[e] = ar.add(sv[e], rv[e]);
      gram_acc(am, mr.rad, t1, sn, ar);
      gram_acc(mr.rad, s, t2, sn, ar);
    }
    return 0;
  });
  // Only the upper triangles were evaluated.
  symmetrize_from_upper(rlo);
  symmetrize_from_upper(rhi);
  symmetrize_from_upper(t1);
  symmetrize_from_upper(t2);
  return combine_midrad(rlo, rhi, t1, t2);
}

BoundMatrix abs_bound(const IntervalMatrix& m) {
  FloatMatrix out(m.rows(), m.cols());
  auto lo = m.lo().entries(), hi = m.hi().entries();
  auto dst = out.entries();
  for (std::size_t e = 0; e < dst.size(); ++e)
    dst[e] = bound_max(std::abs(lo[e]), std::abs(hi[e]));
  return BoundMatrix::saturating(std::move(out));
}

double inf_norm_upper(const BoundMatrix& b) {
  return with_rounding<kUp>([&](auto ar) {
    double best = 0.0;
    for (std::size_t i = 0; i < b.rows(); ++i) {
      double s = 0.0;
      for (double x : b.values().row(i)) s = ar.add(s, x);
      best = bound_max(best, s);
    }
    return opaque(best);
  });
}

double inf_norm_upper(const FloatMatrix& m) { return inf_norm_upper(BoundMatrix::abs_of(m)); }

BoundMatrix nonneg_add(const BoundMatrix& a, const BoundMatrix& b) {
  require_same_shape(a.values(), b.values(), "nonneg_add");
  FloatMatrix out(a.rows(), a.cols());
  with_rounding<kUp>([&](auto ar) {
    auto x = a.values().entries(), y = b.values().entries();
    auto dst = out.entries();
    for (std::size_t e = 0; e < dst.size(); ++e) dst[e] = ar.add(x[e], y[e]);
    return 0;
  });
  return BoundMatrix::saturating(std::move(out));
}

BoundMatrix nonneg_product(const BoundMatrix& a, const BoundMatrix& b, Structure sa,
                           Structure sb) {
  if (a.cols() != b.rows()) throw ShapeError("nonneg_product: shape mismatch");
  if ((sa == Structure::Upper && a.rows() != a.cols()) ||
      (sb == Structure::Upper && b.rows() != b.cols()))
    throw ShapeError("nonneg_product: triangular operand must be square");
  FloatMatrix out(a.rows(), b.cols());
  with_rounding<kUp>([&](auto ar) {
    gemm_acc(a.values(), b.values(), out, sa, sb, ar);
    return 0;
  });
  return BoundMatrix::saturating(std::move(out));
}

BoundMatrix nonneg_symmetric_transpose_product(const BoundMatrix& x, const BoundMatrix& y,
                                               Structure sx) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.cols() != x.rows())
    throw ShapeError("nonneg_symmetric_transpose_product: shape mismatch");
  FloatMatrix out(x.cols(), y.cols());
  with_rounding<kUp>([&](auto ar) {
    gram_acc(x.values(), y.values(), out, sx, ar);
    return 0;
  });
  symmetrize_from_upper(out);
  return BoundMatrix::saturating(std::move(out));
}

double upper_div_by_one_minus(double x, double g) {
  if (!(g < 1.0)) throw DomainError("upper_div_by_one_minus: requires g < 1");
  if (std::isnan(x)) return kInf;
  return with_rounding<kUp>([&](auto ar) {
    // Upward g - 1 is >= the exact value, so its negation is <= 1 - g.
    const double denom = -opaque(ar.sub(opaque(g), 1.0));
    return opaque(ar.div(opaque(x), denom));
  });
}

double upper_square_over_one_minus(double x, double g) {
  return upper_div_by_one_minus(mul_up(x, x), g);
}

void symmetrize_from_upper(FloatMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
}

}  // namespace qrcert
