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

#include <cmath>

namespace qrcert {

enum class Direction { Downward, Upward, ToNearest };

// How directed rounding is realised. Hardware switches the IEEE-754 rounding
// mode of the executing thread; Software keeps round-to-nearest and corrects
// each result to the neighbouring binary64 value when the rounding went the
// wrong way (slower, never tighter than hardware).
enum class RoundingBackend { Hardware, Software };

// Process-wide backend. Defaults to Hardware unless the environment variable
// QRCERT_ROUNDING=software is set or the hardware probe fails at startup.
RoundingBackend rounding_backend() noexcept;
void set_rounding_backend(RoundingBackend backend);
bool hardware_rounding_available() noexcept;

// True when the thread's environment currently rounds to nearest, checked by
// evaluating 1 + 2^-60 and 1 - 2^-60 at run time.
bool rounding_is_nearest() noexcept;

// Compiler barrier: the value is materialised in a register at this point,
// so the compiler can neither constant-fold nor move the computation that
// produced it across a rounding-mode switch.
inline double opaque(double x) noexcept {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  asm volatile("" : "+x"(x));
#elif defined(__GNUC__) && defined(__aarch64__)
  asm volatile("" : "+w"(x));
#else
  volatile double v = x;
  x = v;
#endif
  return x;
}

/// Scoped exclusive selection of a rounding direction on the calling thread.
///
/// With the hardware backend the constructor switches the floating-point
/// environment and the destructor restores the previous direction (round to
/// nearest for an outermost guard), including during stack unwinding. Guards
/// nest. With the software backend no environment state changes, but
/// `active()` still reports the scope so round-to-nearest kernels can refuse
/// to run inside it.
class RoundingGuard {
 public:
  explicit RoundingGuard(Direction direction);
  ~RoundingGuard();
  RoundingGuard(const RoundingGuard&) = delete;
  RoundingGuard& operator=(const RoundingGuard&) = delete;

  Direction direction() const noexcept { return direction_; }
  bool hardware() const noexcept { return hardware_; }

  static bool active() noexcept;

 private:
  Direction direction_;
  Direction previous_;
  bool hardware_;
};

namespace detail {
double emulated_add(double a, double b, Direction d) noexcept;
double emulated_mul(double a, double b, Direction d) noexcept;
double emulated_div(double a, double b, Direction d) noexcept;
double emulated_sqrt(double a, Direction d) noexcept;
}  // namespace detail

// Arithmetic executed natively; rounds in whatever direction the hardware
// environment is set to.
struct NativeArith {
  static double add(double a, double b) noexcept { return a + b; }
  static double sub(double a, double b) noexcept { return a - b; }
  static double mul(double a, double b) noexcept { return a * b; }
  static double div(double a, double b) noexcept { return a / b; }
  static double sqrt(double a) noexcept { return std::sqrt(a); }
};

// Directed rounding emulated on top of round-to-nearest.
template <Direction D>
struct EmulatedArith {
  static double add(double a, double b) noexcept { return detail::emulated_add(a, b, D); }
  static double sub(double a, double b) noexcept { return detail::emulated_add(a, -b, D); }
  static double mul(double a, double b) noexcept { return detail::emulated_mul(a, b, D); }
  static double div(double a, double b) noexcept { return detail::emulated_div(a, b, D); }
  static double sqrt(double a) noexcept { return detail::emulated_sqrt(a, D); }
};

/// Runs `f(arith)` with every operation performed through `arith` rounded in
/// direction D. `f` must be generic in the arithmetic policy and must keep
/// all guarded work inside the call.
template <Direction D, class F>
decltype(auto) with_rounding(F&& f) {
  static_assert(D != Direction::ToNearest);
  RoundingGuard guard(D);
  if (guard.hardware()) return f(NativeArith{});
  return f(EmulatedArith<D>{});
}

// Single directed operations, each under its own guard.
double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_down(double a);
double sqrt_up(double a);

}  // namespace qrcert
