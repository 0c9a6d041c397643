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

#include "qrcert/rounding.hpp"

#include <atomic>
#include <cfenv>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace qrcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMax = std::numeric_limits<double>::max();
// Below this magnitude an error-free transformation may lose bits to
// underflow; the emulation then rescales by a power of two first.
constexpr double kTiny = 0x1p-960;

int fe_mode(Direction d) {
  switch (d) {
    case Direction::Downward:
      return FE_DOWNWARD;
    case Direction::Upward:
      return FE_UPWARD;
    case Direction::ToNearest:
      break;
  }
  return FE_TONEAREST;
}

bool probe_hardware() noexcept {
  const int saved = std::fegetround();
  bool ok = std::fesetround(FE_UPWARD) == 0;
  const double up = opaque(opaque(1.0) + opaque(0x1p-60));
  ok = ok && std::fesetround(FE_DOWNWARD) == 0;
  const double down = opaque(opaque(1.0) - opaque(0x1p-60));
  std::fesetround(saved);
  return ok && up > 1.0 && down < 1.0;
}

RoundingBackend initial_backend() noexcept {
  const char* env = std::getenv("QRCERT_ROUNDING");
  if (env != nullptr && std::strcmp(env, "software") == 0) return RoundingBackend::Software;
  return probe_hardware() ? RoundingBackend::Hardware : RoundingBackend::Software;
}

std::atomic<RoundingBackend>& backend_state() noexcept {
  static std::atomic<RoundingBackend> state{initial_backend()};
  return state;
}

thread_local int guard_depth = 0;
thread_local Direction current_direction = Direction::ToNearest;

// Moves the round-to-nearest result `r` one step in direction d when the
// exact value lies on that side of it (sign of `err` = sign(exact - r)).
double correct(double r, double err, Direction d) noexcept {
  if (d == Direction::Upward && err > 0.0) return std::nextafter(r, kInf);
  if (d == Direction::Downward && err < 0.0) return std::nextafter(r, -kInf);
  return r;
}


// Round-to-nearest overflowed from finite operands.
double overflowed(double r, Direction d) noexcept {
  if (r > 0) return d == Direction::Upward ? kInf : kMax;
  return d == Direction::Downward ? -kInf : -kMax;
}

}  // namespace

RoundingBackend rounding_backend() noexcept { return backend_state().load(); }

void set_rounding_backend(RoundingBackend backend) {
  if (guard_depth > 0)
    throw std::logic_error("set_rounding_backend: a RoundingGuard is active");
  if (backend == RoundingBackend::Hardware && !hardware_rounding_available())
    throw std::runtime_error("set_rounding_backend: hardware rounding unavailable");
  backend_state().store(backend);
}

bool hardware_rounding_available() noexcept {
  static const bool available = probe_hardware();
  return available;
}

bool rounding_is_nearest() noexcept {
  const double up = opaque(opaque(1.0) + opaque(0x1p-60));
  const double down = opaque(opaque(1.0) - opaque(0x1p-60));
  return up == 1.0 && down == 1.0 && std::fegetround() == FE_TONEAREST;
}

RoundingGuard::RoundingGuard(Direction direction)
    : direction_(direction),
      previous_(current_direction),
      hardware_(rounding_backend() == RoundingBackend::Hardware) {
  if (hardware_) {
    if (std::fesetround(fe_mode(direction)) != 0)
      throw std::runtime_error("RoundingGuard: fesetround failed");
    asm volatile("" ::: "memory");
  }
  current_direction = direction;
  ++guard_depth;
}

RoundingGuard::~RoundingGuard() {
  if (hardware_) {
    asm volatile("" ::: "memory");
    std::fesetround(fe_mode(previous_));
  }
  current_direction = previous_;
  --guard_depth;
}

bool RoundingGuard::active() noexcept { return guard_depth > 0; }

namespace detail {

double emulated_add(double a, double b, Direction d) noexcept {
  const double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isfinite(a) && std::isfinite(b)) return overflowed(s, d);
    return s;
  }
  // TwoSum: the rounding error of a + b, exactly.
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return correct(s, err, d);
}

double emulated_mul(double a, double b, Direction d) noexcept {
  const double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isfinite(a) && std::isfinite(b)) return overflowed(p, d);
    return p;
  }
  if (a == 0.0 || b == 0.0) return p;
  if (std::abs(p) < kTiny) {
    // Near the underflow threshold the fma residual may itself underflow.
    // Scaling the larger operand and p by the same power of two brings the
    // residual into the normal range; only its sign is needed.
    const int k = -900 - std::ilogb(a) - std::ilogb(b);
    const bool scale_a = std::abs(a) >= std::abs(b);
    const double as = scale_a ? std::ldexp(a, k) : a;
    const double bs = scale_a ? b : std::ldexp(b, k);
    return correct(p, std::fma(as, bs, -std::ldexp(p, k)), d);
  }
  return correct(p, std::fma(a, b, -p), d);
}

double emulated_div(double a, double b, Direction d) noexcept {
  const double q = a / b;
  if (!std::isfinite(q)) {
    if (std::isfinite(a) && std::isfinite(b) && b != 0.0) return overflowed(q, d);
    return q;
  }
  if (a == 0.0 || std::isinf(b)) return q;
  // a - q*b is exact; the true quotient exceeds q iff it has the sign of b.
  // Tiny operands are scaled first, as in emulated_mul.
  double as = a, qs = q;
  if (q == 0.0) return correct(q, (a > 0.0) == (b > 0.0) ? 1.0 : -1.0, d);
  if (std::abs(q) < kTiny || std::abs(a) < kTiny) {
    const int k = std::abs(q) < kTiny ? -500 - std::ilogb(q) : 500;
    as = std::ldexp(a, k);
    qs = std::ldexp(q, k);
  }
  const double rem = std::fma(-qs, b, as);
  const double err = (rem == 0.0) ? 0.0 : ((rem > 0.0) == (b > 0.0) ? 1.0 : -1.0);
  return correct(q, err, d);
}

double emulated_sqrt(double a, Direction d) noexcept {
  const double s = std::sqrt(a);
  if (!std::isfinite(s) || a == 0.0) return s;
  if (a < kTiny) {
    const double ss = std::ldexp(s, 500);
    return correct(s, std::fma(-ss, ss, std::ldexp(a, 1000)), d);
  }
  return correct(s, std::fma(-s, s, a), d);
}

}  // namespace detail

double add_down(double a, double b) {
  return with_rounding<Direction::Downward>(
      [&](auto ar) { return opaque(ar.add(opaque(a), opaque(b))); });
}
double add_up(double a, double b) {
  return with_rounding<Direction::Upward>(
      [&](auto ar) { return opaque(ar.add(opaque(a), opaque(b))); });
}
double sub_down(double a, double b) {
  return with_rounding<Direction::Downward>(
      [&](auto ar) { return opaque(ar.sub(opaque(a), opaque(b))); });
}
double sub_up(double a, double b) {
  return with_rounding<Direction::Upward>(
      [&](auto ar) { return opaque(ar.sub(opaque(a), opaque(b))); });
}
double mul_down(double a, double b) {
  return with_rounding<Direction::Downward>(
      [&](auto ar) { return opaque(ar.mul(opaque(a), opaque(b))); });
}
double mul_up(double a, double b) {
  return with_rounding<Direction::Upward>(
      [&](auto ar) { return opaque(ar.mul(opaque(a), opaque(b))); });
}
double div_down(double a, double b) {
  return with_rounding<Direction::Downward>(
      [&](auto ar) { return opaque(ar.div(opaque(a), opaque(b))); });
}
double div_up(double a, double b) {
  return with_rounding<Direction::Upward>(
      [&](auto ar) { return opaque(ar.div(opaque(a), opaque(b))); });
}
double sqrt_down(double a) {
  return with_rounding<Direction::Downward>(
      [&](auto ar) { return opaque(ar.sqrt(opaque(a))); });
}
double sqrt_up(double a) {
  return with_rounding<Direction::Upward>(
      [&](auto ar) { return opaque(ar.sqrt(opaque(a))); });
}

}  // namespace qrcert
