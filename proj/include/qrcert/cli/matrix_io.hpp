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

#include <iosfwd>
#include <string>
#include <string_view>

#include "qrcert/bigint.hpp"
#include "qrcert/certified.hpp"
#include "qrcert/matrix.hpp"

namespace qrcert::cli {

// Text matrix file: a header "rows cols", then `rows` lines of `cols`
// whitespace-separated entries. Lines starting with '#' are comments. A file
// whose entries are all integer literals is read in integer mode (arbitrary
// precision), anything else in float mode (binary64, correctly rounded).
struct MatrixFile {
  bool integer_mode = false;
  BigIntMatrix ints;
  FloatMatrix floats;

  std::size_t rows() const noexcept { return integer_mode ? ints.rows() : floats.rows(); }
  std::size_t cols() const noexcept { return integer_mode ? ints.cols() : floats.cols(); }

  // Componentwise binary64 enclosure of the stored matrix (a point matrix in
  // float mode).
  IntervalMatrix enclosure() const;
  // The matrix rounded to nearest binary64.
  FloatMatrix nearest() const;
};

// Throws InputError with the offending line number.
MatrixFile parse_matrix(std::istream& in);
MatrixFile parse_matrix(std::string_view text);
MatrixFile read_matrix_file(const std::string& path);

// Serialisation in the same format; floats use the shortest decimal that
// reads back to the same binary64 value.
std::string serialize(const BigIntMatrix& a, std::string_view comment = {});
std::string serialize(const FloatMatrix& a, std::string_view comment = {});
std::string serialize(const MatrixFile& f, std::string_view comment = {});

std::string format_double(double x);

}  // namespace qrcert::cli
