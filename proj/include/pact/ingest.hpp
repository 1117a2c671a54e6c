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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>

#include "pact/error.hpp"

namespace pact {

inline constexpr double kSampleRateHz = 25.0;
inline constexpr int kRawMin = -2048;
inline constexpr int kRawMax = 2047;
// 12 bits over +/-8 g.
inline constexpr double kGPerLsb = 8.0 / 2048.0;
inline constexpr double kLsbPerG = 2048.0 / 8.0;

// One accelerometer reading as delivered by the sensor: sign-extended 12-bit
// two's complement counts.
struct RawSample {
  std::int16_t x = 0;
  std::int16_t y = 0;
  std::int16_t z = 0;

  friend bool operator==(const RawSample&, const RawSample&) = default;
};

// A decoded reading in g. sample_index is the implicit 25 Hz time base.
struct AccelSample {
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
  std::uint64_t sample_index = 0;

  friend bool operator==(const AccelSample&, const AccelSample&) = default;
};

constexpr bool in_raw_range(int v) { return v >= kRawMin && v <= kRawMax; }

constexpr bool is_valid(const RawSample& r) {
  return in_raw_range(r.x) && in_raw_range(r.y) && in_raw_range(r.z);
}

inline AccelSample decode_sample(const RawSample& raw, std::uint64_t sample_index) {
  if (!is_valid(raw)) {
    throw DecodeError("rejected sample " + std::to_string(sample_index) + ": (" +
                      std::to_string(raw.x) + ", " + std::to_string(raw.y) + ", " +
                      std::to_string(raw.z) + ") outside the 12-bit range");
  }
  // Power-of-two scale: exact in binary floating point.
  return {raw.x * kGPerLsb, raw.y * kGPerLsb, raw.z * kGPerLsb, sample_index};
}

// Nearest 12-bit code for a value in g. Throws DecodeError outside [-8, 8).
inline std::int16_t encode_axis(double g) {
  const double counts = std::round(g * kLsbPerG);
  if (!(counts >= kRawMin && counts <= kRawMax)) {
    throw DecodeError("acceleration " + std::to_string(g) + " g outside the +/-8 g range");
  }
  return static_cast<std::int16_t>(counts);
}

inline RawSample encode_sample(const AccelSample& s) {
  return {encode_axis(s.ax), encode_axis(s.ay), encode_axis(s.az)};
}

// Assigns sequential indices while decoding a stream.
class SampleDecoder {
 public:
  explicit SampleDecoder(std::uint64_t first_index = 0) : next_(first_index) {}

  AccelSample operator()(const RawSample& raw) {
    AccelSample s = decode_sample(raw, next_);
    ++next_;
    return s;
  }

  std::uint64_t next_index() const noexcept { return next_; }
  void set_next_index(std::uint64_t i) noexcept { next_ = i; }

 private:
  std::uint64_t next_;
};

inline double magnitude(const AccelSample& s) {
  return std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az);
}

inline constexpr std::size_t kWindowLength = 64;

// Fixed-capacity ring of the most recent magnitude values with running first
// and second moments.
//
// With integer accumulators the moments are exact. With floating-point ones
// they are re-derived from the buffer every time the write head wraps, which
// bounds drift to at most kWindowLength incremental updates.
//
// The window also counts how many trailing values are identical, so a
// constant window is recognized exactly rather than through a variance that
// is zero only up to rounding.
template <typename Value, typename Accum, std::size_t N = kWindowLength>
class RingWindow {
  static_assert(N > 0 && N <= 255);

 public:
  using value_type = Value;
  using accum_type = Accum;
  static constexpr std::size_t kCapacity = N;

  void push(Value v) {
    if (fill_ > 0 && v == buf_[last_pos()]) {
      run_ = static_cast<std::uint8_t>(std::min<std::size_t>(run_ + 1u, N));
    } else {
      run_ = 1;
    }
    if (fill_ == N) {
      const Accum old = static_cast<Accum>(buf_[head_]);
      sum_ -= old;
      sum_sq_ -= old * old;
    } else {
      ++fill_;
    }
    buf_[head_] = v;
    const Accum a = static_cast<Accum>(v);
    sum_ += a;
    sum_sq_ += a * a;
    head_ = static_cast<std::uint8_t>((head_ + 1) % N);
    if constexpr (std::is_floating_point_v<Accum>) {
      if (head_ == 0) resync();
    }
  }

  std::size_t size() const noexcept { return fill_; }
  static constexpr std::size_t capacity() noexcept { return N; }
  bool empty() const noexcept { return fill_ == 0; }
  bool full() const noexcept { return fill_ == N; }

  // i = 0 is the oldest buffered value.
  Value operator[](std::size_t i) const { return buf_[(oldest_pos() + i) % N]; }
  Value back() const { return buf_[last_pos()]; }

  Accum sum() const noexcept { return sum_; }
  Accum sum_squares() const noexcept { return sum_sq_; }

  bool is_constant() const noexcept { return fill_ > 0 && run_ >= fill_; }

  // Buffered values, oldest first, into out[0..size()).
  std::size_t copy_chronological(std::span<Value, N> out) const {
    for (std::size_t i = 0; i < fill_; ++i) out[i] = (*this)[i];
    return fill_;
  }

  // Raw layout, exposed for canonical state serialization.
  const std::array<Value, N>& storage() const noexcept { return buf_; }
  std::uint8_t head() const noexcept { return head_; }
  std::uint8_t run_length() const noexcept { return run_; }

  // Rebuilds a window from its raw layout. Throws InvalidInput when the
  // fields are mutually inconsistent.
  static RingWindow restore(const std::array<Value, N>& storage, std::size_t head,
                            std::size_t fill, std::size_t run, Accum sum,
                            Accum sum_sq) {
    if (head >= N || fill > N || run > N || (fill < N && head != fill) ||
        (fill == 0) != (run == 0) || run > fill) {
      throw InvalidInput("inconsistent window state");
    }
    RingWindow w;
    w.buf_ = storage;
    w.head_ = static_cast<std::uint8_t>(head);
    w.fill_ = static_cast<std::uint8_t>(fill);
    w.run_ = static_cast<std::uint8_t>(run);
    w.sum_ = sum;
    w.sum_sq_ = sum_sq;
    if constexpr (!std::is_floating_point_v<Accum>) {
      // Exact accumulators must match the buffer.
      Accum s = 0, s2 = 0;
      for (std::size_t i = 0; i < fill; ++i) {
        const Accum a = static_cast<Accum>(w[i]);
        s += a;
        s2 += a * a;
      }
      if (s != sum || s2 != sum_sq) throw InvalidInput("window sums do not match buffer");
    }
    return w;
  }

 private:
  std::size_t oldest_pos() const noexcept { return fill_ == N ? head_ : 0; }
  std::size_t last_pos() const noexcept { return (head_ + N - 1) % N; }

  void resync() {
    Accum s{}, s2{};
    for (std::size_t i = 0; i < fill_; ++i) {
      const Accum a = static_cast<Accum>((*this)[i]);
      s += a;
      s2 += a * a;
    }
    sum_ = s;
    sum_sq_ = s2;
  }

  std::array<Value, N> buf_{};
  std::uint8_t head_ = 0;
  std::uint8_t fill_ = 0;
  std::uint8_t run_ = 0;
  Accum sum_{};
  Accum sum_sq_{};
};

// Floating-point window of magnitudes in g.
using SampleWindow = RingWindow<double, double>;

inline void push_sample(SampleWindow& window, const AccelSample& s) {
  window.push(magnitude(s));
}

}  // namespace pact
