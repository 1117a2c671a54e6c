// Copyright 2026 The pact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <type_traits>

namespace pact::fixed {

// Signed fixed-point number holding value * 2^Frac in a Rep. Every operation
// saturates at the bounds of Rep; nothing wraps.
template <typename Rep, int Frac>
struct Q {
  static_assert(std::is_signed_v<Rep> && std::is_integral_v<Rep>);
  static_assert(Frac > 0 && Frac < static_cast<int>(sizeof(Rep) * 8));

  using rep = Rep;
  static constexpr int kFracBits = Frac;
  static constexpr Rep kMaxRaw = std::numeric_limits<Rep>::max();
  static constexpr Rep kMinRaw = std::numeric_limits<Rep>::min();
  static constexpr double kUlp = 1.0 / static_cast<double>(std::int64_t{1} << Frac);

  Rep raw = 0;

  static constexpr Q from_raw(std::int64_t v) { return Q{saturate(v)}; }

  static constexpr Q max() { return Q{kMaxRaw}; }
  static constexpr Q min() { return Q{kMinRaw}; }

  // Round half up, saturating. NaN maps to zero.
  static Q from_double(double x) {
    if (std::isnan(x)) return Q{};
    const double scaled = std::floor(std::ldexp(x, Frac) + 0.5);
    if (scaled >= static_cast<double>(kMaxRaw)) return max();
    if (scaled <= static_cast<double>(kMinRaw)) return min();
    return Q{static_cast<Rep>(scaled)};
  }

  constexpr double to_double() const { return std::ldexp(static_cast<double>(raw), -Frac); }

  static constexpr Rep saturate(std::int64_t v) {
    if (v > kMaxRaw) return kMaxRaw;
    if (v < kMinRaw) return kMinRaw;
    return static_cast<Rep>(v);
  }

  friend constexpr auto operator<=>(const Q&, const Q&) = default;
};

// Features, thresholds, power: range [-32768, 32768).
using Q16_16 = Q<std::int32_t, 16>;
// Likelihoods, probabilities, filter coefficients, decision threshold.
using Q1_15 = Q<std::int16_t, 15>;

template <typename Rep, int Frac>
constexpr Q<Rep, Frac> q_add(Q<Rep, Frac> a, Q<Rep, Frac> b) {
  return Q<Rep, Frac>::from_raw(std::int64_t{a.raw} + b.raw);
}

template <typename Rep, int Frac>
constexpr Q<Rep, Frac> q_sub(Q<Rep, Frac> a, Q<Rep, Frac> b) {
  return Q<Rep, Frac>::from_raw(std::int64_t{a.raw} - b.raw);
}

// (a * b) >> Frac, rounding the shifted-out bits half up.
template <typename Rep, int Frac>
constexpr Q<Rep, Frac> q_mul(Q<Rep, Frac> a, Q<Rep, Frac> b) {
  const std::int64_t p = std::int64_t{a.raw} * b.raw;
  return Q<Rep, Frac>::from_raw((p + (std::int64_t{1} << (Frac - 1))) >> Frac);
}

// floor(n / d + 1/2) for d > 0 without overflow of 2n + d.
constexpr std::int64_t div_round_half_up(std::int64_t n, std::int64_t d) {
  std::int64_t q = n / d;
  std::int64_t r = n % d;
  if (r < 0) {
    --q;
    r += d;
  }
  // r in [0, d): round up when r >= d/2.
  if (r >= d - r) ++q;
  return q;
}

// a / b rounded half up. Division by zero saturates by the sign of a (0/0 is 0).
template <typename Rep, int Frac>
constexpr Q<Rep, Frac> q_div(Q<Rep, Frac> a, Q<Rep, Frac> b) {
  using T = Q<Rep, Frac>;
  if (b.raw == 0) return a.raw > 0 ? T::max() : a.raw < 0 ? T::min() : T{};
  std::int64_t n = std::int64_t{a.raw} * (std::int64_t{1} << Frac);
  std::int64_t d = b.raw;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  return T::from_raw(div_round_half_up(n, d));
}

// floor(sqrt(v)), shift-and-subtract. No division.
constexpr std::uint64_t isqrt_floor(std::uint64_t v) {
  std::uint64_t res = 0;
  std::uint64_t bit = std::uint64_t{1} << 62;
  while (bit > v) bit >>= 2;
  while (bit != 0) {
    if (v >= res + bit) {
      v -= res + bit;
      res = (res >> 1) + bit;
    } else {
      res >>= 1;
    }
    bit >>= 2;
  }
  return res;
}

// sqrt(v) rounded to nearest.
constexpr std::uint64_t isqrt_round(std::uint64_t v) {
  const std::uint64_t r = isqrt_floor(v);
  // Round up when v > r^2 + r, i.e. sqrt(v) >= r + 1/2.
  return v > r * r + r ? r + 1 : r;
}

}  // namespace pact::fixed
