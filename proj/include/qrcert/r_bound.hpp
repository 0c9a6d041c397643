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

#include <stdexcept>
#include <string_view>

#include "qrcert/certified.hpp"
#include "qrcert/matrix.hpp"

namespace qrcert {

enum class RBoundStatus { Finite, InvertibilityCheckFailed, SpectralRadiusCheckFailed, Overflow };

std::string_view to_string(RBoundStatus status) noexcept;

/// Result of the certified error bound for the R factor.
///
/// With status Finite, |R~ - R| <= f componentwise for the exact QR factor R
/// of every real matrix in the input enclosure, and f = H |R~| with h >= H.
/// Otherwise the upper triangles of h and f are +inf. Entries strictly below
/// the diagonal are always exact zeros.
struct RBoundReport {
  BoundMatrix h;
  BoundMatrix f;
  double g_norm;           // >= ||G||_inf, +inf if not reached
  double w_residual_norm;  // >= ||R~ V - I||_inf
  RBoundStatus status;
};

class SpectralRadiusCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvertibilityCheck {
  IntervalMatrix w_enc;  // encloses W = R~ V
  double w_res_norm;     // >= ||W - I||_inf
  bool ok;               // w_res_norm < 1, hence R~ invertible
};

/// Encloses W = R~ V with two triangular products and bounds ||W - I||_inf.
InvertibilityCheck check_invertibility(const UpperTriangularMatrix& r,
                                       const UpperTriangularMatrix& v);

/// Upper-triangular bound of |W^-1| for W in w_enc:
///   |2I - W| + ||I - W||^2 / (1 - ||I - W||) on the upper triangle.
/// Throws DomainError unless w_res_norm < 1.
BoundMatrix bound_w_inverse(const IntervalMatrix& w_enc, double w_res_norm);

struct GBound {
  BoundMatrix g;  // symmetric, >= |R~^-T A^T A R~^-1 - I|
  double g_norm;  // >= ||g||_inf
};

/// Bounds G through |W^-T| (|V^T A^T A V - I| + |W^T W - I|) |W^-1| for
/// every A in a_enc.
GBound bound_g(const IntervalMatrix& a_enc, const UpperTriangularMatrix& v,
               const IntervalMatrix& w_enc, const BoundMatrix& w_inv_bound);

/// triu(G (I - G)^-1) <= triu(g) + ||g||^2 / (1 - ||g||) triu(1 1^T).
/// Throws SpectralRadiusCheckError unless g_norm < 1.
BoundMatrix bound_h(const BoundMatrix& g, double g_norm);

/// Certified componentwise error bound for an approximate R factor.
///
/// `r` must be upper triangular with a positive diagonal (InputError
/// otherwise). It can come from any factorisation; mgs_qr is one choice.
/// Check failures and overflow are reported through the status, never thrown.
RBoundReport bound_r_error(const IntervalMatrix& a_enc, const UpperTriangularMatrix& r);

}  // namespace qrcert
