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
#include <string_view>
#include <utility>
#include <vector>

#include "qrcert/bigint.hpp"
#include "qrcert/certified.hpp"
#include "qrcert/r_bound.hpp"

namespace qrcert {

/// LLL parameters (delta, eta) with 1/4 < delta <= 1 and 1/2 <= eta < sqrt(delta).
///
/// The certificate speaks about exactly these binary64 values. The
/// eta < sqrt(delta) requirement is checked as eta*eta (rounded upward) < delta.
class LLLParams {
 public:
  // Throws InputError when the pair is invalid.
  LLLParams(double delta, double eta);

  // Decimal or fractional text; delta is rounded upward and eta downward to
  // binary64, the directions in which the certified statement stays sound
  // for the decimal parameters as well.
  static LLLParams from_decimal(std::string_view delta, std::string_view eta);

  double delta() const noexcept { return delta_; }
  double eta() const noexcept { return eta_; }

 private:
  double delta_;
  double eta_;
};

enum class Outcome { Reduced, Failed };

enum class FailureReason {
  None,
  BoundNotFinite,
  PropernessUncertified,
  LovaszUncertified,
  Overflow,
  PivotFailure
};

std::string_view to_string(Outcome outcome) noexcept;
std::string_view to_string(FailureReason reason) noexcept;

struct PropernessCheck {
  // margin(i, j), i < j: downward t_i - t_j, the certified slack of
  // |r_ij| <= eta r_ii. Zero on and below the diagonal.
  FloatMatrix margin;
  std::vector<std::pair<std::size_t, std::size_t>> uncertified;
  // Upper bound of max_{i<j} |r_ij| / r_ii (+inf when some r_ii - f_ii <= 0).
  double max_mu_bound = 0.0;
};

struct LovaszCheck {
  // margin[i]: downward t_{i+1} - t, the certified slack of the Lovasz
  // condition at index i (-inf when the radicand was negative).
  std::vector<double> margin;
  std::vector<std::size_t> uncertified;
};

/// Certifies |r_ij| / r_ii <= eta for the exact R with |R~ - R| <= f, every
/// pair i < j. A pair fails when the test cannot be certified, which does not
/// mean the condition is false.
PropernessCheck check_properness(const UpperTriangularMatrix& r, const BoundMatrix& f, double eta);

/// Certifies sqrt(delta - (r_{i,i+1}/r_ii)^2) r_ii <= r_{i+1,i+1} for the
/// exact R, every i < n - 1.
LovaszCheck check_lovasz(const UpperTriangularMatrix& r, const BoundMatrix& f, double delta);

/// Componentwise binary64 enclosure of an integer matrix; zero width for
/// every entry that is exactly representable.
IntervalMatrix ingest_interval(const BigIntMatrix& a);

struct CertificateVerdict {
  Outcome outcome = Outcome::Failed;
  FailureReason reason = FailureReason::None;
  // Indices of the first failure, when it concerns a pair or an index.
  std::size_t fail_i = 0;
  std::size_t fail_j = 0;

  double delta = 0.0;
  double eta = 0.0;
  UpperTriangularMatrix r_tilde;
  RBoundReport report{};
  PropernessCheck properness;
  LovaszCheck lovasz;

  double min_lovasz_margin = 0.0;  // min_i margin[i], +inf for n = 1
  std::size_t min_lovasz_index = 0;
  double max_mu_bound = 0.0;
  double max_rel_error = 0.0;       // max f_ij / |r~_ij| over nonzero r~_ij
  double max_rel_error_diag = 0.0;  // max f_ii / r~_ii
};

/// LLL-reducedness certificate of the column basis of a square integer
/// matrix: approximate R factor by Gram-Schmidt on the rounded matrix,
/// certified error bound over the integer-to-binary64 enclosure, then
/// certified properness and Lovasz tests.
///
/// Reduced is a proof that the basis is (delta, eta)-reduced. Failed is
/// inconclusive. Throws ShapeError for a non-square matrix.
CertificateVerdict certify_lll(const BigIntMatrix& a, const LLLParams& params);

}  // namespace qrcert
