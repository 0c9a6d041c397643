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

#include <cstddef>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "qrcert/matrix.hpp"
#include "qrcert/rounding.hpp"

namespace qrcert {

/// Dense row-major matrix of arbitrary-precision integers. Lattice bases are
/// stored column-wise: column j is the basis vector a_j.
class BigIntMatrix {
 public:
  BigIntMatrix() = default;
  BigIntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  BigIntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static BigIntMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  mpz_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const mpz_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  // Entries rounded to nearest (ties to even) binary64.
  FloatMatrix to_nearest() const;

  friend bool operator==(const BigIntMatrix& a, const BigIntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpz_class> data_;
};

/// The binary64 value nearest to q in the given direction (Downward: the
/// largest double <= q, Upward: the smallest double >= q, ToNearest: ties to
/// even). Magnitudes beyond the finite range give +-inf on the outward side
/// and +-DBL_MAX on the inward side. Computed with exact comparisons; the
/// floating-point environment is not touched.
double round_to_double(const mpq_class& q, Direction d);
double round_to_double(const mpz_class& z, Direction d);

/// Exact value of a decimal literal: "-12", "0.5001", "1e-3", "2.5E+2" or a
/// fraction "3/4". Throws InputError on malformed text.
mpq_class parse_exact_decimal(std::string_view text);

}  // namespace qrcert
