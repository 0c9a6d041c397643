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

#include <cstdint>

namespace qrcert::flops {

// Per-thread floating-point operation counter. Matrix kernels record one
// multiplication plus one addition (2 flops) per inner-product term; the
// O(n^2) elementwise work is not counted.
std::uint64_t count() noexcept;
void reset() noexcept;
void add(std::uint64_t n) noexcept;

// Counts flops recorded while alive.
class Scope {
 public:
  Scope() noexcept : start_(count()) {}
  std::uint64_t elapsed() const noexcept { return count() - start_; }

 private:
  std::uint64_t start_;
};

}  // namespace qrcert::flops
