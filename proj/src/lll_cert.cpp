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

#include "qrcert/lll_cert.hpp"

#include <cctype>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

#include "qrcert/errors.hpp"
#include "qrcert/rounding.hpp"

namespace qrcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMax = std::numeric_limits<double>::max();

int cmp(const mpq_class& q, double x) { return ::cmp(q, mpq_class(x)); }

}  // namespace

// --- BigIntMatrix and conversions -------------------------------------------

BigIntMatrix::BigIntMatrix(std::initializer_list<std::initializer_list<long>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("BigIntMatrix: ragged initializer");
    for (long v : r) data_.emplace_back(v);
  }
}

BigIntMatrix BigIntMatrix::identity(std::size_t n) {
  BigIntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

FloatMatrix BigIntMatrix::to_nearest() const {
  FloatMatrix out(rows_, cols_);
  for (std::size_t e = 0; e < data_.size(); ++e)
    out.entries()[e] = round_to_double(data_[e], Direction::ToNearest);
  return out;
}

double round_to_double(const mpq_class& q, Direction d) {
  const int sign = sgn(q);
  if (sign == 0) return 0.0;

  // Largest double <= q, or the overflow cases.
  double lo;
  const long bits = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
                    static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  if (bits > 1026) {
    lo = sign > 0 ? kMax : -kInf;
  } else {
    lo = q.get_d();  // truncates toward zero
    if (!std::isfinite(lo)) lo = sign > 0 ? kMax : -kMax;
    int guard = 0;
    while (std::isfinite(lo) && cmp(q, lo) < 0) {
      lo = std::nextafter(lo, -kInf);
      if (++guard > 64) throw std::logic_error("round_to_double: no convergence");
    }
    while (std::isfinite(lo)) {
      const double next = std::nextafter(lo, kInf);
      if (!std::isfinite(next) || cmp(q, next) < 0) break;
      lo = next;
      if (++guard > 64) throw std::logic_error("round_to_double: no convergence");
    }
  }
  const bool exact = std::isfinite(lo) && cmp(q, lo) == 0;
  if (exact || d == Direction::Downward) return lo;
  const double hi = std::isfinite(lo) ? std::nextafter(lo, kInf) : -kMax;
  if (d == Direction::Upward) return hi;

  // Nearest, ties to even.
  if (!std::isfinite(lo)) return (cmp(q, -kMax) < 0 && cmp(q - mpq_class(-kMax), mpq_class(-0x1p970)) <= 0) ? -kInf : -kMax;
  if (!std::isfinite(hi)) return (q - mpq_class(lo) >= mpq_class(0x1p970)) ? kInf : lo;
  const mpq_class below = q - mpq_class(lo);
  const mpq_class above = mpq_class(hi) - q;
  const int c = ::cmp(below, above);
  if (c < 0) return lo;
  if (c > 0) return hi;
  std::int64_t bits_lo;
  std::memcpy(&bits_lo, &lo, sizeof lo);
  return (bits_lo & 1) == 0 ? lo : hi;
}

double round_to_double(const mpz_class& z, Direction d) {
  if (mpz_sizeinbase(z.get_mpz_t(), 2) <= 53) return z.get_d();  // exact
  return round_to_double(mpq_class(z), d);
}

mpq_class parse_exact_decimal(std::string_view text) {
  auto fail = [&]() -> mpq_class {
    throw InputError("not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t pos = 0;
  auto digits = [&](std::string& out) {
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      out.push_back(text[pos++]);
    return pos > start;
  };

  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';
  std::string mant;
  const bool int_part = digits(mant);

  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    std::string den;
    if (!int_part || !digits(den) || pos != text.size()) return fail();
    const mpz_class num(mant, 10), d(den, 10);
    if (d == 0) return fail();
    mpq_class q{num, d};
    q.canonicalize();
    return negative ? mpq_class(-q) : q;
  }

  std::size_t frac_digits = 0;
  bool frac_part = false;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t before = mant.size();
    frac_part = digits(mant);
    frac_digits = mant.size() - before;
  }
  if (!int_part && !frac_part) return fail();

  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool eneg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) eneg = text[pos++] == '-';
    std::string ed;
    if (!digits(ed) || ed.size() > 6) return fail();
    exponent = std::stol(ed) * (eneg ? -1 : 1);
  }
  if (pos != text.size()) return fail();

  const long scale = exponent - static_cast<long>(frac_digits);
  mpz_class value(mant, 10);
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  mpq_class q = scale >= 0 ? mpq_class(value * p10) : mpq_class(value, p10);
  q.canonicalize();
  return negative ? mpq_class(-q) : q;
}

// --- parameters and verdict strings ----------------------------------------------

LLLParams::LLLParams(double delta, double eta) : delta_(delta), eta_(eta) {
  if (!std::isfinite(delta) || !std::isfinite(eta))
    throw InputError("LLLParams: parameters must be finite");
  if (!(delta > 0.25 && delta <= 1.0))
    throw InputError("LLLParams: delta must satisfy 1/4 < delta <= 1");
  if (!(eta >= 0.5)) throw InputError("LLLParams: eta must be >= 1/2");
  if (!(mul_up(eta, eta) < delta))
    throw InputError("LLLParams: eta must be < sqrt(delta)");
}

LLLParams LLLParams::from_decimal(std::string_view delta, std::string_view eta) {
  return LLLParams(round_to_double(parse_exact_decimal(delta), Direction::Upward),
                   round_to_double(parse_exact_decimal(eta), Direction::Downward));
}

std::string_view to_string(Outcome outcome) noexcept {
  return outcome == Outcome::Reduced ? "Reduced" : "Failed";
}

std::string_view to_string(FailureReason reason) noexcept {
  switch (reason) {
    case FailureReason::None:
      return "None";
    case FailureReason::BoundNotFinite:
      return "BoundNotFinite";
    case FailureReason::PropernessUncertified:
      return "PropernessUncertified";
    case FailureReason::LovaszUncertified:
      return "LovaszUncertified";
    case FailureReason::Overflow:
      return "Overflow";
    case FailureReason::PivotFailure:
      return "PivotFailure";
  }
  return "Unknown";
}

// --- certified tests -----------------------------------------------------------

namespace {

void require_conforming(const UpperTriangularMatrix& r, const BoundMatrix& f, const char* what) {
  if (f.rows() != r.order() || f.cols() != r.order())
    throw ShapeError(std::string(what) + ": R~ and F orders differ");
}

}  // namespace

PropernessCheck check_properness(const UpperTriangularMatrix& r, const BoundMatrix& f,
                                 double eta) {
  require_conforming(r, f, "check_properness");
  const std::size_t n = r.order();
  std::vector<double> t_diag(n), lower_diag(n);
  FloatMatrix t_off(n, n);

  with_rounding<Direction::Downward>([&](auto ar) {
    const double eta_down = eta;  // already binary64
    for (std::size_t i = 0; i < n; ++i) {
      lower_diag[i] = ar.sub(r(i, i), f(i, i));
      t_diag[i] = ar.mul(lower_diag[i], eta_down);
    }
    return 0;
  });

  PropernessCheck out{FloatMatrix(n, n), {}, 0.0};
  with_rounding<Direction::Upward>([&](auto ar) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double t = ar.add(std::abs(r(i, j)), f(i, j));
        t_off(i, j) = t;
        if (!(t <= t_diag[i])) out.uncertified.emplace_back(i, j);
        const double mu = lower_diag[i] > 0.0 ? ar.div(t, lower_diag[i]) : kInf;
        if (!(mu <= out.max_mu_bound)) out.max_mu_bound = std::isnan(mu) ? kInf : mu;
      }
    }
    return 0;
  });
  with_rounding<Direction::Downward>([&](auto ar) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out.margin(i, j) = ar.sub(t_diag[i], t_off(i, j));
    return 0;
  });
  return out;
}

LovaszCheck check_lovasz(const UpperTriangularMatrix& r, const BoundMatrix& f, double delta) {
  require_conforming(r, f, "check_lovasz");
  const std::size_t n = r.order();
  const std::size_t m = n > 0 ? n - 1 : 0;
  std::vector<double> t_upper(m), t_next(m), radicand(m), t(m);
  double delta_up = 0.0;

  with_rounding<Direction::Upward>([&](auto ar) {
    delta_up = opaque(delta);  // already binary64
    for (std::size_t i = 0; i < m; ++i) t_upper[i] = ar.add(r(i, i), f(i, i));
    return 0;
  });
  with_rounding<Direction::Downward>([&](auto ar) {
    for (std::size_t i = 0; i < m; ++i) {
      t_next[i] = ar.sub(r(i + 1, i + 1), f(i + 1, i + 1));
      double num = ar.sub(std::abs(r(i, i + 1)), f(i, i + 1));
      // A negative lower bound of |r_{i,i+1}| is replaced by 0, which only
      // makes the test harder to pass.
      if (!(num > 0.0)) num = 0.0;
      const double x = ar.div(num, t_upper[i]);
      radicand[i] = -ar.sub(ar.mul(x, x), delta_up);
    }
    return 0;
  });

  LovaszCheck out{std::vector<double>(m), {}};
  with_rounding<Direction::Upward>([&](auto ar) {
    for (std::size_t i = 0; i < m; ++i)
      t[i] = radicand[i] >= 0.0 ? ar.mul(ar.sqrt(radicand[i]), t_upper[i]) : kInf;
    return 0;
  });
  with_rounding<Direction::Downward>([&](auto ar) {
    for (std::size_t i = 0; i < m; ++i) {
      out.margin[i] = radicand[i] >= 0.0 ? ar.sub(t_next[i], t[i]) : -kInf;
      if (!(t[i] <= t_next[i])) out.uncertified.push_back(i);
    }
    return 0;
  });
  return out;
}

IntervalMatrix ingest_interval(const BigIntMatrix& a) {
  FloatMatrix lo(a.rows(), a.cols()), hi(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      lo(i, j) = round_to_double(a(i, j), Direction::Downward);
      hi(i, j) = round_to_double(a(i, j), Direction::Upward);
    }
  }
  return IntervalMatrix(std::move(lo), std::move(hi));
}

// --- certificate -----------------------------------------------------------------

namespace {

void summarise(CertificateVerdict& v) {
  const std::size_t n = v.r_tilde.order();
  v.min_lovasz_margin = kInf;
  for (std::size_t i = 0; i < v.lovasz.margin.size(); ++i) {
    if (!(v.lovasz.margin[i] >= v.min_lovasz_margin)) {
      v.min_lovasz_margin = v.lovasz.margin[i];
      v.min_lovasz_index = i;
    }
  }
  v.max_mu_bound = v.properness.max_mu_bound;
  with_rounding<Direction::Upward>([&](auto ar) {
    double all = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double r = std::abs(v.r_tilde(i, j));
        if (r == 0.0) continue;
        const double rel = ar.div(v.report.f(i, j), r);
        if (!(rel <= all)) all = std::isnan(rel) ? kInf : rel;
        if (i == j && !(rel <= diag)) diag = std::isnan(rel) ? kInf : rel;
      }
    }
    v.max_rel_error = all;
    v.max_rel_error_diag = diag;
    return 0;
  });
}

}  // namespace

CertificateVerdict certify_lll(const BigIntMatrix& a, const LLLParams& params) {
  if (!a.is_square() || a.rows() == 0)
    throw ShapeError("certify_lll: basis matrix must be square and nonempty");
  const std::size_t n = a.rows();

  CertificateVerdict v;
  v.delta = params.delta();
  v.eta = params.eta();
  auto fail = [&](FailureReason reason, std::size_t i = 0, std::size_t j = 0) {
    v.outcome = Outcome::Failed;
    v.reason = reason;
    v.fail_i = i;
    v.fail_j = j;
    return v;
  };

  const IntervalMatrix a_enc = ingest_interval(a);
  FloatMatrix mid(n, n);
  {
    auto lo = a_enc.lo().entries(), hi = a_enc.hi().entries();
    for (std::size_t e = 0; e < lo.size(); ++e)
      mid.entries()[e] = lo[e] == hi[e] ? lo[e] : 0.5 * lo[e] + 0.5 * hi[e];
  }
  if (!mid.all_finite()) return fail(FailureReason::Overflow);

  try {
    v.r_tilde = mgs_qr(mid);
  } catch (const ZeroColumnError& e) {
    return fail(FailureReason::PivotFailure, e.column(), e.column());
  }

  v.report = bound_r_error(a_enc, v.r_tilde);
  if (v.report.status != RBoundStatus::Finite) {
    return fail(v.report.status == RBoundStatus::Overflow ? FailureReason::Overflow
                                                          : FailureReason::BoundNotFinite);
  }

  std::feclearexcept(FE_OVERFLOW | FE_UNDERFLOW);
  v.properness = check_properness(v.r_tilde, v.report.f, params.eta());
  v.lovasz = check_lovasz(v.r_tilde, v.report.f, params.delta());
  const bool range_trouble = std::fetestexcept(FE_OVERFLOW | FE_UNDERFLOW) != 0;
  summarise(v);

  if (range_trouble) return fail(FailureReason::Overflow);
  if (!v.properness.uncertified.empty()) {
    const auto [i, j] = v.properness.uncertified.front();
    return fail(FailureReason::PropernessUncertified, i, j);
  }
  if (!v.lovasz.uncertified.empty()) {
    const std::size_t i = v.lovasz.uncertified.front();
    return fail(FailureReason::LovaszUncertified, i, i + 1);
  }
  v.outcome = Outcome::Reduced;
  v.reason = FailureReason::None;
  return v;
}

}  // namespace qrcert
