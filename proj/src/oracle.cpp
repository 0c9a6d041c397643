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

#include "qrcert/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "qrcert/errors.hpp"

namespace qrcert::oracle {

namespace {

using Vec = std::vector<mpz_class>;
using QVec = std::vector<mpq_class>;

std::vector<Vec> columns_of(const BigIntMatrix& a) {
  std::vector<Vec> cols(a.cols(), Vec(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) cols[j][i] = a(i, j);
  return cols;
}

BigIntMatrix from_columns(const std::vector<Vec>& cols, std::size_t rows) {
  BigIntMatrix a(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) a(i, j) = cols[j][i];
  return a;
}

mpz_class dot(const Vec& x, const Vec& y) {
  mpz_class s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// Nearest integer to a / b for b > 0 (halves rounded up).
mpz_class round_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_class num = 2 * a + b;
  mpz_class den = 2 * b;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

mpz_class random_bits(unsigned bits, std::mt19937_64& rng) {
  mpz_class z = 0;
  for (unsigned done = 0; done < bits; done += 64) {
    const unsigned take = std::min(64u, bits - done);
    std::uint64_t chunk = rng();
    if (take < 64) chunk &= (std::uint64_t{1} << take) - 1;
    z <<= take;
    z += mpz_class(std::to_string(chunk), 10);
  }
  return z;
}

}  // namespace

// --- rational matrices --------------------------------------------------------------

RationalMatrix::RationalMatrix(const BigIntMatrix& a) : RationalMatrix(a.rows(), a.cols()) {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = a(i, j);
}

RationalMatrix RationalMatrix::from_floats(const FloatMatrix& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) throw InputError("from_floats: non-finite entry");
      out(i, j) = mpq_class(m(i, j));
    }
  return out;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("multiply: inner dimensions differ");
  RationalMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

// --- Gram-Schmidt ------------------------------------------------------------------

GramSchmidtData exact_gram_schmidt(const BigIntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (n > m) throw SingularBasis("exact_gram_schmidt: more columns than rows");
  GramSchmidtData gs{std::vector<mpq_class>(n), RationalMatrix(n, n)};
  std::vector<QVec> star(n, QVec(m));

  for (std::size_t i = 0; i < n; ++i) {
    QVec ai(m);
    for (std::size_t r = 0; r < m; ++r) ai[r] = a(r, i);
    star[i] = ai;
    for (std::size_t j = 0; j < i; ++j) {
      mpq_class proj = 0;
      for (std::size_t r = 0; r < m; ++r) proj += ai[r] * star[j][r];
      const mpq_class mu = proj / gs.rstar_sq[j];
      gs.mu(i, j) = mu;
      for (std::size_t r = 0; r < m; ++r) star[i][r] -= mu * star[j][r];
    }
    mpq_class norm = 0;
    for (std::size_t r = 0; r < m; ++r) norm += star[i][r] * star[i][r];
    if (norm == 0) throw SingularBasis("exact_gram_schmidt: dependent columns");
    gs.rstar_sq[i] = norm;
  }
  return gs;
}

// --- MPFR values -------------------------------------------------------------------

Mpfr::Mpfr(mpfr_prec_t precision) { mpfr_init2(value_, precision); mpfr_set_zero(value_, 1); }
Mpfr::Mpfr(const Mpfr& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}
Mpfr& Mpfr::operator=(const Mpfr& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}
Mpfr::~Mpfr() { mpfr_clear(value_); }

// --- exact R via LDL^T ----------------------------------------------------------------

ExactR exact_cholesky_r(const BigIntMatrix& a, mpfr_prec_t precision_bits) {
  if (!a.is_square() || a.rows() == 0) throw ShapeError("exact_cholesky_r: square matrix required");
  const std::size_t n = a.rows();
  const auto cols = columns_of(a);

  RationalMatrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) b(i, j) = b(j, i) = dot(cols[i], cols[j]);

  ExactR r;
  r.precision_ = precision_bits;
  r.d_.assign(n, 0);
  r.u_ = RationalMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    mpq_class di = b(i, i);
    for (std::size_t k = 0; k < i; ++k) di -= r.d_[k] * r.u_(k, i) * r.u_(k, i);
    if (di <= 0) throw NotPositiveDefinite("exact_cholesky_r: A^T A is not positive definite");
    r.d_[i] = di;
    r.u_(i, i) = 1;
    for (std::size_t j = i + 1; j < n; ++j) {
      mpq_class s = b(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= r.d_[k] * r.u_(k, i) * r.u_(k, j);
      r.u_(i, j) = s / di;
    }
  }

  const mpfr_prec_t work = precision_bits + 64;
  r.lo_.assign(n * n, Mpfr(work));
  r.hi_.assign(n * n, Mpfr(work));
  Mpfr s_lo(work), s_hi(work), u_lo(work), u_hi(work), t(work);
  for (std::size_t i = 0; i < n; ++i) {
    mpfr_set_q(s_lo.get(), r.d_[i].get_mpq_t(), MPFR_RNDD);
    mpfr_sqrt(s_lo.get(), s_lo.get(), MPFR_RNDD);
    mpfr_set_q(s_hi.get(), r.d_[i].get_mpq_t(), MPFR_RNDU);
    mpfr_sqrt(s_hi.get(), s_hi.get(), MPFR_RNDU);
    for (std::size_t j = i; j < n; ++j) {
      Mpfr& lo = r.lo_[i * n + j];
      Mpfr& hi = r.hi_[i * n + j];
      const mpq_class& u = r.u_(i, j);
      if (u >= 0) {
        mpfr_set_q(u_lo.get(), u.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(u_hi.get(), u.get_mpq_t(), MPFR_RNDU);
        mpfr_mul(lo.get(), u_lo.get(), s_lo.get(), MPFR_RNDD);
        mpfr_mul(hi.get(), u_hi.get(), s_hi.get(), MPFR_RNDU);
      } else {
        mpfr_set_q(u_lo.get(), u.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(u_hi.get(), u.get_mpq_t(), MPFR_RNDU);
        mpfr_mul(lo.get(), u_lo.get(), s_hi.get(), MPFR_RNDD);
        mpfr_mul(hi.get(), u_hi.get(), s_lo.get(), MPFR_RNDU);
      }
    }
  }
  return r;
}

bool ExactR::within(std::size_t i, std::size_t j, double x, double bound) const {
  if (!(bound >= 0.0)) return false;
  if (std::isinf(bound)) return true;
  if (i > j) return std::abs(x) <= bound;
  Mpfr t(precision_ + 64);
  mpfr_set_d(t.get(), x, MPFR_RNDN);
  mpfr_sub(t.get(), hi(i, j).get(), t.get(), MPFR_RNDU);
  if (mpfr_cmp_d(t.get(), bound) > 0) return false;
  mpfr_set_d(t.get(), x, MPFR_RNDN);
  mpfr_sub(t.get(), t.get(), lo(i, j).get(), MPFR_RNDU);
  return mpfr_cmp_d(t.get(), bound) <= 0;
}

double ExactR::deviation_upper(std::size_t i, std::size_t j, double x) const {
  if (i > j) return std::abs(x);
  Mpfr a(precision_ + 64), b(precision_ + 64);
  mpfr_set_d(a.get(), x, MPFR_RNDN);
  mpfr_sub(a.get(), hi(i, j).get(), a.get(), MPFR_RNDU);
  mpfr_set_d(b.get(), x, MPFR_RNDN);
  mpfr_sub(b.get(), b.get(), lo(i, j).get(), MPFR_RNDU);
  mpfr_max(a.get(), a.get(), b.get(), MPFR_RNDU);
  return mpfr_get_d(a.get(), MPFR_RNDU);
}

double ExactR::nearest(std::size_t i, std::size_t j) const {
  if (i > j) return 0.0;
  return mpfr_get_d(lo(i, j).get(), MPFR_RNDN);
}

FloatMatrix ExactR::nearest() const {
  const std::size_t n = order();
  FloatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = nearest(i, j);
  return m;
}

// --- reducedness and reduction -----------------------------------------------------------

bool exact_is_reduced(const GramSchmidtData& gs, const mpq_class& delta, const mpq_class& eta) {
  const std::size_t n = gs.rstar_sq.size();
  const mpq_class eta_sq = eta * eta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (gs.mu(i, j) * gs.mu(i, j) > eta_sq) return false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const mpq_class& mu = gs.mu(i + 1, i);
    if ((delta - mu * mu) * gs.rstar_sq[i] > gs.rstar_sq[i + 1]) return false;
  }
  return true;
}

bool exact_is_reduced(const BigIntMatrix& a, const mpq_class& delta, const mpq_class& eta) {
  return exact_is_reduced(exact_gram_schmidt(a), delta, eta);
}

BigIntMatrix exact_lll_reduce(const BigIntMatrix& a, const mpq_class& delta, const mpq_class& eta) {
  if (!(delta > mpq_class(1, 4) && delta <= 1))
    throw InputError("exact_lll_reduce: delta must satisfy 1/4 < delta <= 1");
  if (eta < mpq_class(1, 2)) throw InputError("exact_lll_reduce: eta must be >= 1/2");
  const std::size_t n = a.cols();
  if (n == 0) return a;

  // Integral version with 1-based indices: d[i] is the Gram determinant of
  // the first i vectors, lam[k][j] = d[j] mu_kj.
  std::vector<Vec> b(n + 1);
  {
    auto cols = columns_of(a);
    for (std::size_t j = 0; j < n; ++j) b[j + 1] = std::move(cols[j]);
  }
  const mpz_class p = delta.get_num(), q = delta.get_den();
  Vec d(n + 1);
  std::vector<Vec> lam(n + 1, Vec(n + 1));
  d[0] = 1;
  d[1] = dot(b[1], b[1]);
  if (d[1] == 0) throw SingularBasis("exact_lll_reduce: zero vector in basis");

  auto redi = [&](std::size_t k, std::size_t l) {
    if (mpz_class(abs(2 * lam[k][l])) <= d[l]) return;
    const mpz_class r = round_div(lam[k][l], d[l]);
    for (std::size_t i = 0; i < b[k].size(); ++i) b[k][i] -= r * b[l][i];
    lam[k][l] -= r * d[l];
    for (std::size_t i = 1; i < l; ++i) lam[k][i] -= r * lam[l][i];
  };

  std::size_t kmax = 1;
  auto swapi = [&](std::size_t k) {
    std::swap(b[k], b[k - 1]);
    for (std::size_t j = 1; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
    const mpz_class l = lam[k][k - 1];
    const mpz_class bnew = (d[k - 2] * d[k] + l * l) / d[k - 1];
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      const mpz_class t = lam[i][k];
      lam[i][k] = (d[k] * lam[i][k - 1] - l * t) / d[k - 1];
      lam[i][k - 1] = (bnew * t + l * lam[i][k]) / d[k];
    }
    d[k - 1] = bnew;
  };

  std::size_t k = 2;
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        mpz_class u = dot(b[k], b[j]);
        for (std::size_t i = 1; i < j; ++i) u = (d[i] * u - lam[k][i] * lam[j][i]) / d[i - 1];
        if (j < k) {
          lam[k][j] = u;
        } else {
          if (u == 0) throw SingularBasis("exact_lll_reduce: dependent columns");
          d[k] = u;
        }
      }
    }
    redi(k, k - 1);
    if (q * d[k] * d[k - 2] < p * d[k - 1] * d[k - 1] - q * lam[k][k - 1] * lam[k][k - 1]) {
      swapi(k);
      k = std::max<std::size_t>(2, k - 1);
    } else {
      for (std::size_t l = k - 1; l-- > 1;) redi(k, l);
      ++k;
    }
  }
  std::vector<Vec> out(b.begin() + 1, b.end());
  return from_columns(out, a.rows());
}

// --- determinants, inverses, conditioning -----------------------------------------------

mpz_class exact_determinant(const BigIntMatrix& a) {
  if (!a.is_square()) throw ShapeError("exact_determinant: square matrix required");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  std::vector<Vec> m(n, Vec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j);

  // Fraction-free (Bareiss) elimination.
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t piv = k + 1;
      while (piv < n && m[piv][k] == 0) ++piv;
      if (piv == n) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

RationalMatrix exact_inverse(const BigIntMatrix& a) {
  if (!a.is_square()) throw ShapeError("exact_inverse: square matrix required");
  const std::size_t n = a.rows();
  RationalMatrix m(a), inv(n, n);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m(piv, k) == 0) ++piv;
    if (piv == n) throw SingularBasis("exact_inverse: singular matrix");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(k, j), m(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    const mpq_class pinv = 1 / m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) *= pinv;
      inv(k, j) *= pinv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      const mpq_class f = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

double exact_cond_inf(const BigIntMatrix& a) {
  RationalMatrix inv;
  try {
    inv = exact_inverse(a);
  } catch (const SingularBasis&) {
    return std::numeric_limits<double>::infinity();
  }
  const std::size_t n = a.rows();
  mpq_class na = 0, ni = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mpq_class ra = 0, ri = 0;
    for (std::size_t j = 0; j < n; ++j) {
      ra += abs(mpq_class(a(i, j)));
      ri += abs(inv(i, j));
    }
    na = std::max(na, ra);
    ni = std::max(ni, ri);
  }
  return mpq_class(na * ni).get_d();
}

// --- generators --------------------------------------------------------------------------

FloatMatrix gen_test_matrix(std::size_t n, double target_cond, std::uint64_t seed) {
  if (!(target_cond >= 1.0)) throw InputError("gen_test_matrix: target_cond must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto random_orthogonal = [&]() {
    FloatMatrix q = FloatMatrix::identity(n);
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) {
      double vv = 0.0;
      for (auto& x : v) {
        x = normal(rng);
        vv += x * x;
      }
      if (vv == 0.0) continue;
      // q <- (I - 2 v v^T / v^T v) q
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i] * q(i, j);
        s *= 2.0 / vv;
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= s * v[i];
      }
    }
    return q;
  };

  const FloatMatrix u = random_orthogonal();
  const FloatMatrix v = random_orthogonal();
  std::vector<double> sigma(n, 1.0);
  for (std::size_t k = 0; k < n && n > 1; ++k)
    sigma[k] = std::pow(target_cond, -static_cast<double>(k) / static_cast<double>(n - 1));

  FloatMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double us = u(i, k) * sigma[k];
      for (std::size_t j = 0; j < n; ++j) a(i, j) += us * v(j, k);
    }
  return a;
}

double cond2_diagnostic(const FloatMatrix& a) {
  using M = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  M m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  Eigen::JacobiSVD<M> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const long double smin = s(s.size() - 1);
  if (smin == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(s(0) / smin);
}

BigIntMatrix pascal(std::size_t n) {
  BigIntMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      mpz_bin_uiui(p(i, j).get_mpz_t(), static_cast<unsigned long>(i + j),
                   static_cast<unsigned long>(i));
  return p;
}

BigIntMatrix random_integer_matrix(std::size_t n, long bound, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> dist(-bound, bound);
  BigIntMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = dist(rng);
  return a;
}

BigIntMatrix knapsack_basis(std::size_t n, unsigned bits, std::mt19937_64& rng) {
  if (n == 0 || bits == 0) throw InputError("knapsack_basis: n and bits must be positive");
  BigIntMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    mpz_class w = random_bits(bits, rng);
    mpz_setbit(w.get_mpz_t(), bits - 1);  // exactly `bits` bits
    a(0, j) = w;
    if (j > 0) a(j, j) = 1;
  }
  return a;
}

BigIntMatrix scaled_signed_permutation(std::size_t n, long scale, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  BigIntMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j) a(perm[j], j) = (rng() & 1) ? scale : -scale;
  return a;
}

}  // namespace qrcert::oracle
