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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "qrcert/certified.hpp"
#include "qrcert/errors.hpp"
#include "qrcert/flops.hpp"
#include "qrcert/oracle.hpp"
#include "support.hpp"

namespace qrcert {
namespace {

using oracle::RationalMatrix;
using testing::exact;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class CertifiedKernels : public ::testing::TestWithParam<RoundingBackend> {
 protected:
  void SetUp() override { scope_.emplace(GetParam()); }
  void TearDown() override {
    scope_.reset();
    EXPECT_TRUE(rounding_is_nearest());
  }

 private:
  std::optional<testing::BackendScope> scope_;
};

std::string Name(const ::testing::TestParamInfo<RoundingBackend>& info) {
  return testing::backend_name(info.param);
}

RationalMatrix Q(const FloatMatrix& m) { return RationalMatrix::from_floats(m); }

FloatMatrix upper_part(FloatMatrix m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < std::min(i, m.cols()); ++j) m(i, j) = 0.0;
  return m;
}

void expect_bounds(const BoundMatrix& b, const RationalMatrix& exact_abs, const char* what) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      if (std::isinf(b(i, j))) continue;
      ASSERT_GE(exact(b(i, j)), exact_abs(i, j)) << what << " (" << i << "," << j << ")";
    }
}

TEST_P(CertifiedKernels, ScalarBoundEnclosure) {
  std::mt19937_64 rng(1);
  const ScalarOp ops[] = {ScalarOp::Add, ScalarOp::Sub, ScalarOp::Mul, ScalarOp::Div};
  for (int trial = 0; trial < 10000; ++trial) {
    const double a = testing::random_double(rng, -80, 80), b = testing::random_double(rng, -80, 80);
    const ScalarOp op = ops[trial % 4];
    const ScalarBound s = scalar_bound(a, b, op);
    mpq_class e;
    switch (op) {
      case ScalarOp::Add: e = exact(a) + exact(b); break;
      case ScalarOp::Sub: e = exact(a) - exact(b); break;
      case ScalarOp::Mul: e = exact(a) * exact(b); break;
      case ScalarOp::Div: e = exact(a) / exact(b); break;
    }
    ASSERT_LE(exact(s.lo), e);
    ASSERT_GE(exact(s.hi), e);
    ASSERT_GE(exact(s.absbound), abs(e));
    ASSERT_EQ(s.absbound, std::max(std::abs(s.lo), std::abs(s.hi)));
  }
}

TEST_P(CertifiedKernels, ScalarBoundErrors) {
  EXPECT_THROW(scalar_bound(1.0, 0.0, ScalarOp::Div), DivisionByZeroError);
  EXPECT_THROW(scalar_bound(kInf, 1.0, ScalarOp::Add), InputError);
  EXPECT_THROW(scalar_bound(kNaN, 1.0, ScalarOp::Mul), InputError);
  EXPECT_TRUE(rounding_is_nearest());
}

TEST_P(CertifiedKernels, ProductResidualEnclosesExactResidual) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const Structure sa = trial % 3 == 0 ? Structure::Upper : Structure::Dense;
    const Structure sb = trial % 5 == 0 ? Structure::Upper : Structure::Dense;
    FloatMatrix a = testing::random_matrix(6, 6, rng, -30, 30);
    FloatMatrix b = testing::random_matrix(6, 6, rng, -30, 30);
    if (sa == Structure::Upper) a = upper_part(a);
    if (sb == Structure::Upper) b = upper_part(b);
    const FloatMatrix c = testing::random_matrix(6, 6, rng, -30, 30);
    const ProductResidual pr = product_residual_bound(a, b, c, sa, sb);
    const RationalMatrix ab = oracle::multiply(Q(a), Q(b));
    RationalMatrix absres(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        const mpq_class r = ab(i, j) - exact(c(i, j));
        ASSERT_LE(exact(pr.enc.lo()(i, j)), r);
        ASSERT_GE(exact(pr.enc.hi()(i, j)), r);
        absres(i, j) = abs(r);
      }
    expect_bounds(pr.bound, absres, "product residual");
  }
}

TEST_P(CertifiedKernels, ProductEnclosureIsTightForExactProducts) {
  const FloatMatrix a{{1, 2}, {3, 4}}, b{{0.5, 0.25}, {1, 2}};
  const IntervalMatrix p = product_enclosure(a, b);
  EXPECT_TRUE(p.is_point());
  EXPECT_EQ(p.lo(), (FloatMatrix{{2.5, 4.25}, {5.5, 8.75}}));
}

TEST_P(CertifiedKernels, IntervalProductEnclosesEveryMember) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const FloatMatrix mid = testing::random_matrix(n, n, rng, -5, 5);
    FloatMatrix lo = mid, hi = mid;
    for (std::size_t e = 0; e < mid.entries().size(); ++e) {
      const double w = std::ldexp(std::abs(mid.entries()[e]), -int(rng() % 20) - 1);
      lo.entries()[e] -= w;
      hi.entries()[e] += w;
    }
    const IntervalMatrix a(lo, hi);
    FloatMatrix b = testing::random_matrix(n, n, rng, -5, 5);
    const bool upper = trial % 2 == 0;
    if (upper) b = upper_part(b);
    const IntervalMatrix p = interval_product(a, b, upper ? Structure::Upper : Structure::Dense);
    // Exact extremes: each term independently at its minimising/maximising endpoint.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        mpq_class emin = 0, emax = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const mpq_class x = exact(lo(i, k)) * exact(b(k, j)), y = exact(hi(i, k)) * exact(b(k, j));
          emin += std::min(x, y);
          emax += std::max(x, y);
        }
        ASSERT_LE(exact(p.lo()(i, j)), emin);
        ASSERT_GE(exact(p.hi()(i, j)), emax);
      }
  }
}

// Sign-constant intervals: every entry of M N - I is bilinear in the
// entries, so its extremes are attained at corner matrices.
TEST_P(CertifiedKernels, MidradResidualDominatesAllCorners) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 2;
    auto make = [&]() {
      FloatMatrix lo(n, n), hi(n, n);
      for (std::size_t e = 0; e < n * n; ++e) {
        const double x = std::uniform_real_distribution<double>(0.25, 1.5)(rng);
        const double w = std::uniform_real_distribution<double>(0.0, 0.1)(rng);
        const double s = (rng() & 1) ? 1.0 : -1.0;
        lo.entries()[e] = s > 0 ? x : -x - w;
        hi.entries()[e] = s > 0 ? x + w : -x;
      }
      return IntervalMatrix(lo, hi);
    };
    const IntervalMatrix m = make(), nn = make();
    const BoundMatrix r = midrad_residual_bound(m, nn);
    const std::size_t count = n * n;
    for (unsigned cm = 0; cm < (1u << count); ++cm) {
      for (unsigned cn = 0; cn < (1u << count); ++cn) {
        FloatMatrix mc(n, n), nc(n, n);
        for (std::size_t e = 0; e < count; ++e) {
          mc.entries()[e] = (cm >> e & 1) ? m.hi().entries()[e] : m.lo().entries()[e];
          nc.entries()[e] = (cn >> e & 1) ? nn.hi().entries()[e] : nn.lo().entries()[e];
        }
        const RationalMatrix p = oracle::multiply(Q(mc), Q(nc));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            ASSERT_GE(exact(r(i, j)), abs(p(i, j) - (i == j ? 1 : 0)));
      }
      if (n == 3 && cm >= 8) break;  // 2^18 corner pairs would be slow; sample the rest below
    }
    if (n == 3) {
      for (int s = 0; s < 2000; ++s) {
        FloatMatrix mc(n, n), nc(n, n);
        for (std::size_t e = 0; e < count; ++e) {
          mc.entries()[e] = (rng() & 1) ? m.hi().entries()[e] : m.lo().entries()[e];
          nc.entries()[e] = (rng() & 1) ? nn.hi().entries()[e] : nn.lo().entries()[e];
        }
        const RationalMatrix p = oracle::multiply(Q(mc), Q(nc));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            ASSERT_GE(exact(r(i, j)), abs(p(i, j) - (i == j ? 1 : 0)));
      }
    }
  }
}

TEST_P(CertifiedKernels, MidradResidualOfPointNearInverse) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const FloatMatrix m = testing::random_matrix(6, 6, rng, -3, 3);
    FloatMatrix n = testing::random_matrix(6, 6, rng, -3, 3);
    const BoundMatrix r = midrad_residual_bound(IntervalMatrix::point(m), IntervalMatrix::point(n));
    const RationalMatrix p = oracle::multiply(Q(m), Q(n));
    RationalMatrix e(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) e(i, j) = abs(p(i, j) - (i == j ? 1 : 0));
    expect_bounds(r, e, "midrad point");
  }
}

TEST_P(CertifiedKernels, GramResidualIsSymmetricAndSound) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const bool upper = trial % 2 == 1;
    FloatMatrix mid = testing::random_matrix(n, n, rng, -2, 1);
    if (upper) mid = upper_part(mid);
    FloatMatrix lo = mid, hi = mid;
    if (trial % 3 != 0) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = upper ? i : 0; j < n; ++j) {
          const double w = std::ldexp(1.0, -20 - int(rng() % 20));
          lo(i, j) -= w;
          hi(i, j) += w;
        }
    }
    const IntervalMatrix nenc(lo, hi);
    const BoundMatrix g = gram_residual_bound(nenc, upper ? Structure::Upper : Structure::Dense);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ASSERT_EQ(g(i, j), g(j, i));
    for (int member = 0; member < 8; ++member) {
      FloatMatrix x(n, n);
      for (std::size_t e = 0; e < n * n; ++e) {
        const double l = lo.entries()[e], h = hi.entries()[e];
        x.entries()[e] = member == 0 ? l : member == 1 ? h : ((rng() & 1) ? l : h);
      }
      const RationalMatrix xq = Q(x);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          mpq_class s = 0;
          for (std::size_t k = 0; k < n; ++k) s += xq(k, i) * xq(k, j);
          ASSERT_GE(exact(g(i, j)), abs(s - (i == j ? 1 : 0)));
        }
    }
  }
}

TEST_P(CertifiedKernels, NonnegativeProductsBoundExactProducts) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7;
    auto pos = [&]() {
      FloatMatrix m = testing::random_matrix(n, n, rng, -20, 20);
      for (double& x : m.entries()) x = std::abs(x);
      return m;
    };
    const FloatMatrix a = pos(), b = upper_part(pos());
    const BoundMatrix p = nonneg_product(BoundMatrix(a), BoundMatrix(b), Structure::Dense,
                                         Structure::Upper);
    expect_bounds(p, oracle::multiply(Q(a), Q(b)), "nonneg product");

    // X^T Y with X^T Y symmetric: X = Y.
    const FloatMatrix x = upper_part(pos());
    const BoundMatrix s =
        nonneg_symmetric_transpose_product(BoundMatrix(x), BoundMatrix(x), Structure::Upper);
    expect_bounds(s, oracle::multiply(Q(x.transposed()), Q(x)), "symmetric product");
    const BoundMatrix sum = nonneg_add(BoundMatrix(a), BoundMatrix(x));
    for (std::size_t e = 0; e < n * n; ++e)
      ASSERT_GE(exact(sum.values().entries()[e]), exact(a.entries()[e]) + exact(x.entries()[e]));
  }
}

TEST_P(CertifiedKernels, InfinityReachesEveryDependentEntry) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 6;
    FloatMatrix a = testing::random_matrix(n, n, rng);
    FloatMatrix b = testing::random_matrix(n, n, rng);
    for (double& x : a.entries()) x = std::abs(x);
    for (double& x : b.entries()) x = std::abs(x);
    const std::size_t r = rng() % n, c = rng() % n;
    a(r, c) = kInf;
    const BoundMatrix p = nonneg_product(BoundMatrix(a), BoundMatrix(b));
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(p(r, j), kInf);  // row r depends on a(r, c)
    EXPECT_EQ(inf_norm_upper(p), kInf);

    // A zero multiplying the infinity produces NaN internally; it must come
    // out as +inf, never as a finite number.
    FloatMatrix z = b;
    for (std::size_t j = 0; j < n; ++j) z(c, j) = 0.0;
    const BoundMatrix pz = nonneg_product(BoundMatrix(a), BoundMatrix(z));
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(pz(r, j), kInf);

    const BoundMatrix sum = nonneg_add(BoundMatrix(a), BoundMatrix(b));
    EXPECT_EQ(sum(r, c), kInf);
    const BoundMatrix st = nonneg_symmetric_transpose_product(BoundMatrix(a), BoundMatrix(b));
    // Only the evaluated upper triangle depends on a(r, c) here; the lower one
    // is mirrored.
    for (std::size_t j = c; j < n; ++j) EXPECT_EQ(st(c, j), kInf);
  }
  EXPECT_EQ(upper_square_over_one_minus(kInf, 0.5), kInf);
}

TEST_P(CertifiedKernels, InfiniteIntervalEndpointsSaturate) {
  const IntervalMatrix a(FloatMatrix{{1, -kInf}, {0, 1}}, FloatMatrix{{1, 2}, {0, 1}});
  const IntervalMatrix p = interval_product(a, FloatMatrix{{1, 1}, {1, 1}});
  EXPECT_EQ(p.lo()(0, 0), -kInf);
  EXPECT_EQ(p.lo()(0, 1), -kInf);
  const BoundMatrix g = gram_residual_bound(a);
  EXPECT_EQ(g(1, 1), kInf);
  EXPECT_EQ(g(0, 1), kInf);
  EXPECT_EQ(g(1, 0), kInf);
}

TEST_P(CertifiedKernels, DivisionByOneMinus) {
  EXPECT_EQ(upper_div_by_one_minus(1.0, 0.0), 1.0);
  const double q = upper_div_by_one_minus(1.0, 0.5);
  EXPECT_GE(q, 2.0);
  EXPECT_LE(q, std::nextafter(2.0, 3.0));
  const double g = 0.1;
  const double u = upper_div_by_one_minus(1.0, g);
  EXPECT_GE(exact(u) * (1 - exact(g)), 1);
  EXPECT_THROW(upper_div_by_one_minus(1.0, 1.0), DomainError);
  EXPECT_THROW(upper_div_by_one_minus(1.0, kNaN), DomainError);
  EXPECT_TRUE(rounding_is_nearest());
  const double sq = upper_square_over_one_minus(0.3, 0.3);
  EXPECT_GE(exact(sq) * (1 - exact(0.3)), exact(0.3) * exact(0.3));
}

TEST_P(CertifiedKernels, InfNormIsAnUpperBound) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const FloatMatrix m = testing::random_matrix(7, 7, rng, -40, 40);
    const double u = inf_norm_upper(m);
    mpq_class best = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      mpq_class s = 0;
      for (double x : m.row(i)) s += abs(exact(x));
      best = std::max(best, s);
    }
    ASSERT_GE(exact(u), best);
  }
}

TEST_P(CertifiedKernels, ShapeErrorsLeaveNearestMode) {
  EXPECT_THROW(product_residual_bound(FloatMatrix(2, 3), FloatMatrix(2, 2), FloatMatrix(2, 2)),
               ShapeError);
  EXPECT_THROW(interval_product(IntervalMatrix::point(FloatMatrix(2, 2)), FloatMatrix(3, 3)),
               ShapeError);
  EXPECT_THROW(midrad_residual_bound(IntervalMatrix::point(FloatMatrix(2, 3)),
                                     IntervalMatrix::point(FloatMatrix(2, 3))),
               ShapeError);
  EXPECT_THROW(nonneg_add(BoundMatrix(2, 2), BoundMatrix(3, 3)), ShapeError);
  EXPECT_TRUE(rounding_is_nearest());
}

INSTANTIATE_TEST_SUITE_P(Kernels, CertifiedKernels,
                         ::testing::ValuesIn(testing::available_backends()), Name);

TEST(IntervalMatrix, Validation) {
  EXPECT_THROW(IntervalMatrix(FloatMatrix{{2}}, FloatMatrix{{1}}), InputError);
  EXPECT_THROW(IntervalMatrix(FloatMatrix{{kNaN}}, FloatMatrix{{1}}), InputError);
  EXPECT_THROW(IntervalMatrix(FloatMatrix(1, 2), FloatMatrix(2, 1)), ShapeError);
  const IntervalMatrix a(FloatMatrix{{1, 2}}, FloatMatrix{{1, 3}});
  EXPECT_TRUE(a.contains(FloatMatrix{{1, 2.5}}));
  EXPECT_FALSE(a.contains(FloatMatrix{{1, 3.5}}));
  EXPECT_FALSE(a.is_point());
}

TEST(BoundMatrix, Validation) {
  EXPECT_THROW(BoundMatrix(FloatMatrix{{-1.0}}), InputError);
  EXPECT_THROW(BoundMatrix(FloatMatrix{{kNaN}}), InputError);
  EXPECT_EQ(BoundMatrix::saturating(FloatMatrix{{kNaN}})(0, 0), kInf);
  EXPECT_EQ(BoundMatrix::abs_of(FloatMatrix{{-2.0}})(0, 0), 2.0);
  EXPECT_EQ(BoundMatrix::filled(2, 2, 3.0).max_entry(), 3.0);
}

TEST(FlopCounter, ProductKernels) {
  const std::size_t n = 24;
  std::mt19937_64 rng(10);
  const FloatMatrix a = testing::random_matrix(n, n, rng), b = testing::random_matrix(n, n, rng);
  {
    flops::Scope s;
    product_enclosure(a, b);
    EXPECT_EQ(s.elapsed(), 2 * 2 * n * n * n);  // two directions
  }
  {
    flops::Scope s;
    nonneg_product(BoundMatrix::abs_of(a), BoundMatrix::abs_of(b), Structure::Upper,
                   Structure::Upper);
    EXPECT_EQ(s.elapsed(), n * (n + 1) * (n + 2) / 3);  // 2 * sum_{i<=k<=j} 1
  }
}

}  // namespace
}  // namespace qrcert
