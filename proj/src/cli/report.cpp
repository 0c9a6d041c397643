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

#include "qrcert/cli/report.hpp"

#include <cmath>
#include <sstream>

#include "qrcert/cli/matrix_io.hpp"

namespace qrcert::cli {

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json matrix_json(const FloatMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

struct RelativeErrors {
  double all = 0.0;
  double diag = 0.0;
  double max_f = 0.0;
};

RelativeErrors relative_errors(const UpperTriangularMatrix& r, const BoundMatrix& f) {
  RelativeErrors e;
  for (std::size_t i = 0; i < r.order(); ++i) {
    for (std::size_t j = i; j < r.order(); ++j) {
      e.max_f = std::max(e.max_f, f(i, j));
      const double a = std::abs(r(i, j));
      if (a == 0.0) continue;
      const double rel = div_up(f(i, j), a);
      e.all = std::max(e.all, rel);
      if (i == j) e.diag = std::max(e.diag, rel);
    }
  }
  return e;
}

}  // namespace

Json bound_report(const UpperTriangularMatrix& r_tilde, const RBoundReport& report) {
  const RelativeErrors rel = relative_errors(r_tilde, report.f);
  Json j;
  j["command"] = "bound-r";
  j["status"] = std::string(to_string(report.status));
  j["n"] = r_tilde.order();
  j["g_norm"] = number(report.g_norm);
  j["w_residual_norm"] = number(report.w_residual_norm);
  j["max_f"] = number(rel.max_f);
  j["max_rel_error"] = number(rel.all);
  j["max_rel_error_diag"] = number(rel.diag);
  j["r_tilde"] = matrix_json(r_tilde.matrix());
  j["f"] = matrix_json(report.f.values());
  j["h"] = matrix_json(report.h.values());
  return j;
}

Json certificate_report(const CertificateVerdict& v) {
  Json j;
  j["command"] = "certify";
  j["verdict"] = std::string(to_string(v.outcome));
  j["reason"] = std::string(to_string(v.reason));
  if (v.outcome == Outcome::Failed && v.reason != FailureReason::BoundNotFinite &&
      v.reason != FailureReason::Overflow) {
    j["fail_i"] = v.fail_i;
    j["fail_j"] = v.fail_j;
  }
  j["delta"] = number(v.delta);
  j["eta"] = number(v.eta);
  j["n"] = v.r_tilde.order();
  j["bound_status"] = std::string(to_string(v.report.status));
  j["g_norm"] = number(v.report.g_norm);
  j["w_residual_norm"] = number(v.report.w_residual_norm);
  j["min_lovasz_margin"] = number(v.min_lovasz_margin);
  j["min_lovasz_index"] = v.min_lovasz_index;
  j["max_mu_bound"] = number(v.max_mu_bound);
  j["max_rel_error"] = number(v.max_rel_error);
  j["max_rel_error_diag"] = number(v.max_rel_error_diag);
  j["uncertified_properness"] = v.properness.uncertified.size();
  j["uncertified_lovasz"] = v.lovasz.uncertified.size();
  Json margins = Json::array();
  for (double m : v.lovasz.margin) margins.push_back(number(m));
  j["lovasz_margins"] = std::move(margins);
  return j;
}

namespace {

std::string scalar_text(const Json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void render(std::ostringstream& os, const std::string& prefix, const Json& value) {
  if (value.is_object()) {
    for (const auto& [key, item] : value.items())
      render(os, prefix.empty() ? key : prefix + "." + key, item);
    return;
  }
  if (value.is_array() && !value.empty() && value.front().is_array()) {
    os << prefix << ":\n";
    for (const auto& row : value) {
      os << " ";
      for (const auto& x : row) os << ' ' << scalar_text(x);
      os << '\n';
    }
    return;
  }
  if (value.is_array()) {
    os << prefix << ":";
    for (const auto& x : value) os << ' ' << scalar_text(x);
    os << '\n';
    return;
  }
  os << prefix << ": " << scalar_text(value) << '\n';
}

}  // namespace

std::string render_text(const Json& report) {
  std::ostringstream os;
  render(os, "", report);
  return os.str();
}

}  // namespace qrcert::cli
