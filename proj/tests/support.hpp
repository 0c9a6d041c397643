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

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qrcert/bigint.hpp"
#include "qrcert/matrix.hpp"
#include "qrcert/oracle.hpp"
#include "qrcert/rounding.hpp"

namespace qrcert::testing {

inline mpq_class exact(double x) { return mpq_class(x); }

// Selects a rounding backend for the lifetime of the object.
class BackendScope {
 public:
  explicit BackendScope(RoundingBackend b) : saved_(rounding_backend()) { set_rounding_backend(b); }
  ~BackendScope() { set_rounding_backend(saved_); }
  BackendScope(const BackendScope&) = delete;
  BackendScope& operator=(const BackendScope&) = delete;

 private:
  RoundingBackend saved_;
};

inline std::vector<RoundingBackend> available_backends() {
  std::vector<RoundingBackend> out{RoundingBackend::Software};
  if (hardware_rounding_available()) out.insert(out.begin(), RoundingBackend::Hardware);
  return out;
}

inline std::string backend_name(RoundingBackend b) {
  return b == RoundingBackend::Hardware ? "Hardware" : "Software";
}

// Doubles with a random sign, mantissa and binary exponent in [emin, emax].
inline double random_double(std::mt19937_64& rng, int emin, int emax) {
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<int> ex(emin, emax);
  const double v = std::ldexp(mant(rng), ex(rng));
  return (rng() & 1) ? -v : v;
}

inline FloatMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, int emin = -4,
                                 int emax = 4) {
  FloatMatrix m(r, c);
  for (double& x : m.entries()) x = random_double(rng, emin, emax);
  return m;
}

// Exact integer image of a finite float matrix: A * 2^shift. Returns the
// shift so that R(A) = 2^-shift R(scaled).
inline int scale_to_integers(const FloatMatrix& a, BigIntMatrix& out) {
  int shift = 0;
  for (double x : a.entries()) {
    if (x == 0.0) continue;
    int e;
    std::frexp(x, &e);
    shift = std::max(shift, 53 - e);
  }
  out = BigIntMatrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      mpq_class q(a(i, j));
      q *= mpq_class(mpz_class(1) << shift);
      out(i, j) = q.get_num();  // the denominator is 1 by construction
    }
  return shift;
}

// Nonsingular random integer matrix whose infinity-norm condition number
// does not exceed max_cond.
inline BigIntMatrix random_well_conditioned(std::size_t n, long bound, double max_cond,
                                            std::mt19937_64& rng) {
  for (;;) {
    BigIntMatrix a = oracle::random_integer_matrix(n, bound, rng);
    const double c = oracle::exact_cond_inf(a);
    if (std::isfinite(c) && c <= max_cond) return a;
  }
}

}  // namespace qrcert::testing
