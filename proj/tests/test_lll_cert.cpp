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

#include <cfloat>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "qrcert/bigint.hpp"
#include "qrcert/errors.hpp"
#include "qrcert/lll_cert.hpp"
#include "qrcert/oracle.hpp"
#include "support.hpp"

namespace qrcert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(LLLParams, AcceptsTheUsualRange) {
  EXPECT_NO_THROW(LLLParams(0.99, 0.51));
  EXPECT_NO_THROW(LLLParams(1.0, 0.5));
  EXPECT_NO_THROW(LLLParams(0.75, 0.5001));
  EXPECT_NO_THROW(LLLParams(0.2500001, 0.5));
}

TEST(LLLParams, RejectsInvalidPairs) {
  EXPECT_THROW(LLLParams(0.25, 0.5), InputError);
  EXPECT_THROW(LLLParams(1.0000001, 0.5), InputError);
  EXPECT_THROW(LLLParams(0.99, 0.4999), InputError);
  EXPECT_THROW(LLLParams(0.75, std::sqrt(0.75)), InputError);
  EXPECT_THROW(LLLParams(0.75, 0.9), InputError);
  EXPECT_THROW(LLLParams(0.3, 0.55), InputError);  // 0.55^2 > 0.3
  EXPECT_THROW(LLLParams(std::nan(""), 0.5), InputError);
  EXPECT_THROW(LLLParams(0.99, kInf), InputError);
}

TEST(LLLParams, DecimalTextRoundsInTheSafeDirection) {
  const LLLParams p = LLLParams::from_decimal("0.99", "0.51");
  EXPECT_GE(testing::exact(p.delta()), mpq_class(99, 100));
  EXPECT_LE(testing::exact(p.eta()), mpq_class(51, 100));
  const LLLParams q = LLLParams::from_decimal("3/4", "1/2");
  EXPECT_EQ(q.delta(), 0.75);
  EXPECT_EQ(q.eta(), 0.5);
  // 0.1 is not representable: upward and downward neighbours differ by one ulp.
  const LLLParams r = LLLParams::from_decimal("0.9", "0.6");
  EXPECT_GT(testing::exact(r.delta()), mpq_class(9, 10));
  EXPECT_LT(testing::exact(r.eta()), mpq_class(6, 10));
  EXPECT_THROW(LLLParams::from_decimal("abc", "0.5"), InputError);
  EXPECT_THROW(LLLParams::from_decimal("0.25", "0.5"), InputError);
}

TEST(ExactDecimal, ParsesLiterals) {
  EXPECT_EQ(parse_exact_decimal("-12"), mpq_class(-12));
  EXPECT_EQ(parse_exact_decimal("0.5001"), mpq_class(5001, 10000));
  EXPECT_EQ(parse_exact_decimal("010"), mpq_class(10));
  EXPECT_EQ(parse_exact_decimal("1e-3"), mpq_class(1, 1000));
  EXPECT_EQ(parse_exact_decimal("2.5E+2"), mpq_class(250));
  EXPECT_EQ(parse_exact_decimal("+.25"), mpq_class(1, 4));
  EXPECT_EQ(parse_exact_decimal("3/4"), mpq_class(3, 4));
  EXPECT_EQ(parse_exact_decimal("-6/8"), mpq_class(-3, 4));
  for (const char* bad : {"", "-", "1.2.3", "1e", "0x10", "3/0", "1/", "e5", " 1", "1 "})
    EXPECT_THROW(parse_exact_decimal(bad), InputError) << bad;
}

TEST(RoundToDouble, MatchesExactNeighbours) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    mpz_class num, den;
    num = static_cast<unsigned long>(rng());
    num *= static_cast<unsigned long>(rng());
    if (trial % 2) num = -num;
    den = static_cast<unsigned long>(rng() % 1000000 + 1);
    mpq_class q(num, den);
    q.canonicalize();
    const double lo = round_to_double(q, Direction::Downward);
    const double hi = round_to_double(q, Direction::Upward);
    const double mid = round_to_double(q, Direction::ToNearest);
    ASSERT_LE(testing::exact(lo), q);
    ASSERT_GE(testing::exact(hi), q);
    ASSERT_TRUE(lo == hi || std::nextafter(lo, kInf) == hi);
    ASSERT_TRUE(mid == lo || mid == hi);
    if (lo != hi) {
      const mpq_class dlo = q - testing::exact(lo), dhi = testing::exact(hi) - q;
      if (dlo != dhi) {
        ASSERT_EQ(mid, dlo < dhi ? lo : hi);
      }
    }
  }
}

TEST(RoundToDouble, EdgeCases) {
  EXPECT_EQ(round_to_double(mpq_class(0), Direction::Downward), 0.0);
  const double third = round_to_double(mpq_class(1, 3), Direction::Downward);
  EXPECT_LT(testing::exact(third), mpq_class(1, 3));
  EXPECT_GT(testing::exact(std::nextafter(third, 1.0)), mpq_class(1, 3));
  const mpz_class huge = mpz_class(1) << 1100;
  EXPECT_EQ(round_to_double(huge, Direction::Upward), kInf);
  EXPECT_EQ(round_to_double(huge, Direction::Downward), DBL_MAX);
  EXPECT_EQ(round_to_double(mpz_class(-huge), Direction::Downward), -kInf);
  EXPECT_EQ(round_to_double(mpz_class(-huge), Direction::Upward), -DBL_MAX);
  const mpz_class odd = (mpz_class(1) << 53) + 1;  // halfway between two doubles
  EXPECT_EQ(round_to_double(odd, Direction::ToNearest), 9007199254740992.0);
  EXPECT_EQ(round_to_double(odd, Direction::Upward), 9007199254740994.0);
  const mpq_class tiny(mpz_class(1), mpz_class(1) << 1100);
  EXPECT_EQ(round_to_double(tiny, Direction::Downward), 0.0);
  EXPECT_EQ(round_to_double(tiny, Direction::Upward), std::numeric_limits<double>::denorm_min());
}

TEST(IngestInterval, EnclosesEveryEntry) {
  BigIntMatrix a(1, 3);
  a(0, 0) = 7;
  a(0, 1) = (mpz_class(1) << 60) + 1;
  a(0, 2) = -((mpz_class(1) << 70) + 3);
  const IntervalMatrix enc = ingest_interval(a);
  EXPECT_EQ(enc.lo()(0, 0), 7.0);
  EXPECT_EQ(enc.hi()(0, 0), 7.0);
  for (std::size_t j = 1; j < 3; ++j) {
    EXPECT_LT(testing::exact(enc.lo()(0, j)), mpq_class(a(0, j)));
    EXPECT_GT(testing::exact(enc.hi()(0, j)), mpq_class(a(0, j)));
    EXPECT_EQ(std::nextafter(enc.lo()(0, j), kInf), enc.hi()(0, j));
  }
}

class LLLCert : public ::testing::TestWithParam<RoundingBackend> {
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

UpperTriangularMatrix upper(FloatMatrix m) { return UpperTriangularMatrix::from_matrix(m); }

TEST_P(LLLCert, PropernessWithExactFactor) {
  const auto r = upper(FloatMatrix{{2, 1, -0.5}, {0, 2, 1.5}, {0, 0, 1}});
  const BoundMatrix zero(3, 3);
  const PropernessCheck p = check_properness(r, zero, 0.5);
  ASSERT_EQ(p.uncertified.size(), 1u);
  EXPECT_EQ(p.uncertified[0], std::make_pair(std::size_t{1}, std::size_t{2}));
  EXPECT_EQ(p.margin(0, 1), 0.0);
  EXPECT_EQ(p.margin(0, 2), 0.5);
  EXPECT_EQ(p.margin(1, 2), -0.5);
  EXPECT_EQ(p.max_mu_bound, 0.75);
  EXPECT_TRUE(check_properness(r, zero, 0.75).uncertified.empty());
}

TEST_P(LLLCert, PropernessAccountsForTheErrorBound) {
  const auto r = upper(FloatMatrix{{2, 1}, {0, 2}});
  const BoundMatrix f = BoundMatrix::filled(2, 2, 1e-16);
  EXPECT_EQ(check_properness(r, f, 0.5).uncertified.size(), 1u);
  EXPECT_TRUE(check_properness(r, f, 0.5001).uncertified.empty());
  const BoundMatrix big = BoundMatrix::filled(2, 2, 3.0);
  const PropernessCheck p = check_properness(r, big, 0.9);
  EXPECT_EQ(p.uncertified.size(), 1u);
  EXPECT_EQ(p.max_mu_bound, kInf);
}

TEST_P(LLLCert, LovaszMargins) {
  const auto r = upper(FloatMatrix{{2, 1, 0}, {0, 2, 0}, {0, 0, 1.5}});
  const BoundMatrix zero(3, 3);
  const LovaszCheck l = check_lovasz(r, zero, 0.75);
  ASSERT_EQ(l.margin.size(), 2u);
  EXPECT_NEAR(l.margin[0], 2 - std::sqrt(2.0), 1e-15);
  // index 1: sqrt(0.75) * 2 = 1.732 > 1.5
  ASSERT_EQ(l.uncertified.size(), 1u);
  EXPECT_EQ(l.uncertified[0], 1u);
  EXPECT_LT(l.margin[1], 0.0);
  EXPECT_NEAR(l.margin[1], 1.5 - std::sqrt(3.0), 1e-15);
}

TEST_P(LLLCert, LovaszNegativeRadicand) {
  const auto r = upper(FloatMatrix{{1, 2}, {0, 0.1}});
  const LovaszCheck l = check_lovasz(r, BoundMatrix(2, 2), 0.75);
  EXPECT_EQ(l.margin[0], -kInf);
  ASSERT_EQ(l.uncertified.size(), 1u);
}

TEST_P(LLLCert, LovaszWithLargeOffDiagonalErrorDropsTheMu) {
  // |r_01| - f_01 < 0: the subtracted term is dropped.
  const auto r = upper(FloatMatrix{{2, 0.1}, {0, 1.8}});
  const BoundMatrix f(FloatMatrix{{0, 0.5}, {0, 0}});
  const LovaszCheck l = check_lovasz(r, f, 0.75);
  EXPECT_TRUE(l.uncertified.empty());
  EXPECT_NEAR(l.margin[0], 1.8 - std::sqrt(0.75) * 2, 1e-15);
}

TEST_P(LLLCert, ScaledIdentityIsReduced) {
  BigIntMatrix a(5, 5);
  for (std::size_t i = 0; i < 5; ++i) a(i, i) = 2;
  const CertificateVerdict v = certify_lll(a, LLLParams(0.99, 0.51));
  EXPECT_EQ(v.outcome, Outcome::Reduced);
  EXPECT_EQ(v.reason, FailureReason::None);
  EXPECT_EQ(v.max_mu_bound, 0.0);
  EXPECT_EQ(v.max_rel_error, 0.0);
  EXPECT_GT(v.min_lovasz_margin, 0.0);
}

TEST_P(LLLCert, OneDimensionalBasis) {
  const CertificateVerdict v = certify_lll(BigIntMatrix{{-7}}, LLLParams(0.75, 0.5));
  EXPECT_EQ(v.outcome, Outcome::Reduced);
  EXPECT_EQ(v.min_lovasz_margin, kInf);
  EXPECT_EQ(v.r_tilde(0, 0), 7.0);
}

TEST_P(LLLCert, BoundaryMuNeedsSlackInEta) {
  // Gram-Schmidt coefficient mu_10 is exactly 1/2.
  const BigIntMatrix a{{1, 1, -2}, {1, 0, 2}, {0, 2, 1}};
  ASSERT_TRUE(oracle::exact_is_reduced(a, mpq_class(3, 4), mpq_class(1, 2)));
  const CertificateVerdict tight = certify_lll(a, LLLParams(0.75, 0.5));
  EXPECT_EQ(tight.outcome, Outcome::Failed);
  EXPECT_EQ(tight.reason, FailureReason::PropernessUncertified);
  EXPECT_EQ(tight.fail_i, 0u);
  EXPECT_EQ(tight.fail_j, 1u);
  const CertificateVerdict loose = certify_lll(a, LLLParams::from_decimal("0.75", "0.5001"));
  EXPECT_EQ(loose.outcome, Outcome::Reduced);
}

TEST_P(LLLCert, SwappedBasisFailsLovasz) {
  const BigIntMatrix a{{1, 1}, {1, 0}};
  ASSERT_FALSE(oracle::exact_is_reduced(a, mpq_class(1), mpq_class(6, 10)));
  const CertificateVerdict v = certify_lll(a, LLLParams(1.0, 0.6));
  EXPECT_EQ(v.outcome, Outcome::Failed);
  EXPECT_EQ(v.reason, FailureReason::LovaszUncertified);
  EXPECT_EQ(v.fail_i, 0u);
  EXPECT_EQ(v.fail_j, 1u);
  EXPECT_LT(v.min_lovasz_margin, 0.0);
}

TEST_P(LLLCert, LooserParametersCanSucceed) {
  const BigIntMatrix a{{100, 51}, {0, 200}};
  const CertificateVerdict strict = certify_lll(a, LLLParams::from_decimal("0.99", "0.5001"));
  EXPECT_EQ(strict.outcome, Outcome::Failed);
  EXPECT_EQ(strict.reason, FailureReason::PropernessUncertified);
  const CertificateVerdict relaxed = certify_lll(a, LLLParams::from_decimal("0.985", "0.515"));
  EXPECT_EQ(relaxed.outcome, Outcome::Reduced);
  EXPECT_GE(relaxed.max_mu_bound, 0.51);
  EXPECT_LE(relaxed.max_mu_bound, 0.51 * (1 + 1e-14));
}

TEST_P(LLLCert, HugeEntriesOverflow) {
  BigIntMatrix a = BigIntMatrix::identity(2);
  a(0, 0) = mpz_class(1) << 1100;
  const CertificateVerdict v = certify_lll(a, LLLParams(0.99, 0.51));
  EXPECT_EQ(v.outcome, Outcome::Failed);
  EXPECT_EQ(v.reason, FailureReason::Overflow);
}

TEST_P(LLLCert, ZeroColumnIsAPivotFailure) {
  const CertificateVerdict v = certify_lll(BigIntMatrix{{1, 0}, {0, 0}}, LLLParams(0.99, 0.51));
  EXPECT_EQ(v.outcome, Outcome::Failed);
  EXPECT_EQ(v.reason, FailureReason::PivotFailure);
  EXPECT_EQ(v.fail_i, 1u);
}

TEST_P(LLLCert, RejectsNonSquare) {
  EXPECT_THROW(certify_lll(BigIntMatrix(2, 3), LLLParams(0.99, 0.51)), ShapeError);
  EXPECT_THROW(certify_lll(BigIntMatrix(), LLLParams(0.99, 0.51)), ShapeError);
}

TEST_P(LLLCert, SoundOnReducedAndUnreducedBases) {
  std::mt19937_64 rng(2024);
  const mpq_class delta_q(99, 100), eta_q(51, 100);
  const LLLParams params = LLLParams::from_decimal("0.99", "0.51");
  int certified = 0, reduced_inputs = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 2 + trial % 9;
    BigIntMatrix a = oracle::random_integer_matrix(n, 50, rng);
    if (oracle::exact_determinant(a) == 0) continue;
    if (trial % 3 != 0) a = oracle::exact_lll_reduce(a, mpq_class(99, 100), mpq_class(1, 2));
    const bool truth = oracle::exact_is_reduced(a, mpq_class(params.delta()), mpq_class(params.eta()));
    reduced_inputs += truth;
    const CertificateVerdict v = certify_lll(a, params);
    if (v.outcome == Outcome::Reduced) {
      ++certified;
      ASSERT_TRUE(truth) << "trial " << trial;
      ASSERT_TRUE(oracle::exact_is_reduced(a, delta_q, eta_q)) << "trial " << trial;
    }
  }
  EXPECT_GE(certified, reduced_inputs * 9 / 10);
  EXPECT_GT(certified, 50);
}

TEST_P(LLLCert, KnapsackBasesAfterReduction) {
  std::mt19937_64 rng(9);
  for (std::size_t n : {6u, 10u, 16u}) {
    const BigIntMatrix b = oracle::knapsack_basis(n, 100, rng);
    const BigIntMatrix red = oracle::exact_lll_reduce(b, mpq_class(99, 100), mpq_class(1, 2));
    const LLLParams params(0.98, 0.52);
    const CertificateVerdict v = certify_lll(red, params);
    EXPECT_EQ(v.outcome, Outcome::Reduced) << n << " " << to_string(v.reason);
    const CertificateVerdict raw = certify_lll(b, params);
    EXPECT_EQ(raw.outcome, Outcome::Failed) << n;
  }
}

TEST_P(LLLCert, RelaxingParametersNeverLosesACertificate) {
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 7;
    BigIntMatrix a = oracle::random_integer_matrix(n, 100, rng);
    if (oracle::exact_determinant(a) == 0) continue;
    a = oracle::exact_lll_reduce(a, mpq_class(3, 4), mpq_class(1, 2));
    bool previous = false;
    for (int step = 0; step <= 8; ++step) {
      const double delta = 0.99 - 0.03 * step;
      const double eta = 0.5 + 0.01 * step;
      const bool ok = certify_lll(a, LLLParams(delta, eta)).outcome == Outcome::Reduced;
      ASSERT_TRUE(ok || !previous) << "trial " << trial << " step " << step;
      previous = ok;
    }
  }
}

TEST_P(LLLCert, SummaryFieldsAgreeWithTheChecks) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + trial % 6;
    BigIntMatrix a = oracle::random_integer_matrix(n, 30, rng);
    if (oracle::exact_determinant(a) == 0) continue;
    if (trial % 2) a = oracle::exact_lll_reduce(a, mpq_class(3, 4), mpq_class(1, 2));
    const CertificateVerdict v = certify_lll(a, LLLParams(0.75, 0.55));
    if (v.reason == FailureReason::PivotFailure) continue;
    ASSERT_EQ(v.lovasz.margin.size(), n - 1);
    double min = kInf;
    for (double m : v.lovasz.margin) min = std::min(min, m);
    EXPECT_EQ(v.min_lovasz_margin, min);
    EXPECT_EQ(v.lovasz.margin[v.min_lovasz_index], min);
    EXPECT_EQ(v.max_mu_bound, v.properness.max_mu_bound);
    EXPECT_EQ(v.outcome == Outcome::Reduced,
              v.properness.uncertified.empty() && v.lovasz.uncertified.empty());
    if (v.outcome == Outcome::Reduced) {
      EXPECT_GE(v.min_lovasz_margin, 0.0);
      EXPECT_LE(v.max_mu_bound, 0.55 * (1 + 1e-12) + 1e-300);
    }
    EXPECT_GE(v.max_rel_error, v.max_rel_error_diag);
  }
}

INSTANTIATE_TEST_SUITE_P(Backends, LLLCert, ::testing::ValuesIn(testing::available_backends()), Name);

TEST(FailureNames, AreStable) {
  EXPECT_EQ(to_string(Outcome::Reduced), "Reduced");
  EXPECT_EQ(to_string(Outcome::Failed), "Failed");
  EXPECT_EQ(to_string(FailureReason::PropernessUncertified), "PropernessUncertified");
  EXPECT_EQ(to_string(FailureReason::LovaszUncertified), "LovaszUncertified");
  EXPECT_EQ(to_string(FailureReason::BoundNotFinite), "BoundNotFinite");
  EXPECT_EQ(to_string(FailureReason::Overflow), "Overflow");
  EXPECT_EQ(to_string(FailureReason::PivotFailure), "PivotFailure");
}

}  // namespace
}  // namespace qrcert
