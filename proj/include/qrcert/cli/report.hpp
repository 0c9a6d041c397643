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

#include <json.hpp>

#include <string>

#include "qrcert/lll_cert.hpp"
#include "qrcert/r_bound.hpp"

namespace qrcert::cli {

using Json = nlohmann::ordered_json;

// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
Json number(double x);
Json matrix_json(const FloatMatrix& m);

Json bound_report(const UpperTriangularMatrix& r_tilde, const RBoundReport& report);
Json certificate_report(const CertificateVerdict& verdict);

// Flat "key: value" rendering; nested matrices are printed row by row.
std::string render_text(const Json& report);

}  // namespace qrcert::cli
