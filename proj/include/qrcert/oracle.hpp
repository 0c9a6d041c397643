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

#include <gmpxx.h>
#include <mpfr.h>

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "qrcert/bigint.hpp"
#include "qrcert/matrix.hpp"

// Exact and high-precision reference computations. Nothing here touches the
// floating-point rounding mode; tests and fixture generators use these as
// ground truth.
namespace qrcert::oracle {

class SingularBasis : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit RationalMatrix(const BigIntMatrix& a);
  static RationalMatrix from_floats(const FloatMatrix& m);  // exact

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  mpq_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const mpq_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpq_class> data_;
};

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);

struct GramSchmidtData {
  std::vector<mpq_class> rstar_sq;  // ||a*_i||^2
  RationalMatrix mu;                // mu(i, j) for j < i, zero elsewhere
};

/// Gram-Schmidt of the columns of `a` over Q, built from the explicit
/// orthogonal vectors a*_i. Throws SingularBasis on dependent columns.
GramSchmidtData exact_gram_schmidt(const BigIntMatrix& a);

/// Multiprecision number with value semantics.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t precision);
  Mpfr(const Mpfr& other);
  Mpfr& operator=(const Mpfr& other);
  ~Mpfr();

  mpfr_ptr get() noexcept { return value_; }
  mpfr_srcptr get() const noexcept { return value_; }

 private:
  mpfr_t value_;
};

/// R factor of a square integer matrix, from an LDL^T factorisation of
/// A^T A over Q: r_ii^2 = d_i and r_ij = u_ij r_ii with unit upper
/// triangular u. Every entry also has an enclosure [lo, hi] at the requested
/// binary precision, computed with outward rounding.
class ExactR {
 public:
  std::size_t order() const noexcept { return d_.size(); }
  mpfr_prec_t precision() const noexcept { return precision_; }

  const mpq_class& diag_sq(std::size_t i) const { return d_[i]; }
  const mpq_class& ratio(std::size_t i, std::size_t j) const { return u_(i, j); }
  // r_ii * r_ij = d_i u_ij, exact.
  mpq_class diag_times_entry(std::size_t i, std::size_t j) const { return d_[i] * u_(i, j); }

  const Mpfr& lo(std::size_t i, std::size_t j) const { return lo_[i * order() + j]; }
  const Mpfr& hi(std::size_t i, std::size_t j) const { return hi_[i * order() + j]; }

  // True when |x - r_ij| <= bound is proved for the exact r_ij.
  bool within(std::size_t i, std::size_t j, double x, double bound) const;
  // Upper bound of |x - r_ij| rounded up to binary64.
  double deviation_upper(std::size_t i, std::size_t j, double x) const;
  // r_ij rounded to nearest binary64 (exact except when r_ij sits within
  // 2^-precision of a rounding boundary).
  double nearest(std::size_t i, std::size_t j) const;
  FloatMatrix nearest() const;

 private:
  friend ExactR exact_cholesky_r(const BigIntMatrix& a, mpfr_prec_t precision_bits);
  mpfr_prec_t precision_ = 0;
  std::vector<mpq_class> d_;
  RationalMatrix u_;
  std::vector<Mpfr> lo_;
  std::vector<Mpfr> hi_;
};

/// Throws NotPositiveDefinite when `a` is singular.
ExactR exact_cholesky_r(const BigIntMatrix& a, mpfr_prec_t precision_bits = 200);

/// Exact (delta, eta)-reducedness of the column basis: |mu_ij| <= eta for
/// j < i and (delta - mu_{i+1,i}^2) ||a*_i||^2 <= ||a*_{i+1}||^2.
bool exact_is_reduced(const BigIntMatrix& a, const mpq_class& delta, const mpq_class& eta);
bool exact_is_reduced(const GramSchmidtData& gs, const mpq_class& delta, const mpq_class& eta);

/// Integral LLL reduction of the column basis (size reduction to |mu| <= 1/2,
/// so the output is reduced for every eta >= 1/2). Requires 1/4 < delta <= 1.
BigIntMatrix exact_lll_reduce(const BigIntMatrix& a, const mpq_class& delta,
                              const mpq_class& eta);

mpz_class exact_determinant(const BigIntMatrix& a);
// Throws SingularBasis.
RationalMatrix exact_inverse(const BigIntMatrix& a);
// ||A||_inf ||A^-1||_inf, rounded to nearest; +inf for singular A.
double exact_cond_inf(const BigIntMatrix& a);

// --- generators -----------------------------------------------------------------

/// randsvd-type matrix U diag(sigma) V^T with sigma geometrically spaced from
/// 1 down to 1/target_cond and random orthogonal U, V built from Householder
/// reflectors. Deterministic in `seed`.
FloatMatrix gen_test_matrix(std::size_t n, double target_cond, std::uint64_t seed);

/// 2-norm condition number from an extended-precision SVD.
double cond2_diagnostic(const FloatMatrix& a);

/// P_ij = binomial(i + j, i), 0-based.
BigIntMatrix pascal(std::size_t n);

/// Square matrix with entries uniform in [-bound, bound].
BigIntMatrix random_integer_matrix(std::size_t n, long bound, std::mt19937_64& rng);

/// Knapsack-type basis: row 0 holds (W, w_1, ..., w_{n-1}) with random
/// `bits`-bit weights, the remaining rows are (0 | I).
BigIntMatrix knapsack_basis(std::size_t n, unsigned bits, std::mt19937_64& rng);

/// scale times a random signed permutation matrix.
BigIntMatrix scaled_signed_permutation(std::size_t n, long scale, std::mt19937_64& rng);

}  // namespace qrcert::oracle
