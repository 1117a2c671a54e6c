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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "pact/ingest.hpp"

namespace pact {

// Predictors consumed by the likelihood tree, in serialization order.
enum class Feature : std::uint8_t { kPower = 0, kRhythmicity = 1, kFreqStability = 2 };

inline constexpr std::size_t kNumFeatures = 3;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "power", "rhythmicity", "freq_stability"};

// Cadence band searched for the dominant autocorrelation lag: 8..32 samples,
// i.e. 3.1 Hz down to 0.78 Hz at 25 Hz.
inline constexpr int kMinLag = 8;
inline constexpr int kMaxLag = 32;
inline constexpr std::size_t kMinFillForLag = kMaxLag + 1;

struct FeatureVector {
  double power = 0.0;           // g^2
  double rhythmicity = 0.0;     // [0, 1]
  double freq_stability = 0.0;  // [0, 1]
  std::optional<int> dominant_lag;

  double operator[](Feature f) const {
    switch (f) {
      case Feature::kPower: return power;
      case Feature::kRhythmicity: return rhythmicity;
      case Feature::kFreqStability: return freq_stability;
    }
    return 0.0;
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Rhythm {
  double rhythmicity = 0.0;
  std::optional<int> dominant_lag;

  friend bool operator==(const Rhythm&, const Rhythm&) = default;
};

// The last kCapacity dominant lags, including "no lag" entries.
class LagHistory {
 public:
  static constexpr std::size_t kCapacity = 8;
  static constexpr std::uint8_t kNone = 0;

  void push(std::optional<int> lag) {
    entries_[head_] = lag ? static_cast<std::uint8_t>(*lag) : kNone;
    head_ = static_cast<std::uint8_t>((head_ + 1) % kCapacity);
    if (count_ < kCapacity) ++count_;
  }

  std::size_t size() const noexcept { return count_; }

  // Returns (entries within +/-1 of lag, valid entries).
  std::pair<int, int> agreement(int lag) const {
    int agree = 0, valid = 0;
    for (std::size_t i = 0; i < count_; ++i) {
      const int e = entries_[i];
      if (e == kNone) continue;
      ++valid;
      if (e - lag <= 1 && lag - e <= 1) ++agree;
    }
    return {agree, valid};
  }

  const std::array<std::uint8_t, kCapacity>& storage() const noexcept { return entries_; }
  std::uint8_t head() const noexcept { return head_; }

  static LagHistory restore(const std::array<std::uint8_t, kCapacity>& entries,
                            std::size_t head, std::size_t count) {
    if (head >= kCapacity || count > kCapacity || (count < kCapacity && head != count)) {
      throw InvalidInput("inconsistent lag history");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const int e = entries[i];
      if (e != kNone && (e < kMinLag || e > kMaxLag)) throw InvalidInput("lag out of band");
    }
    LagHistory h;
    h.entries_ = entries;
    h.head_ = static_cast<std::uint8_t>(head);
    h.count_ = static_cast<std::uint8_t>(count);
    return h;
  }

  friend bool operator==(const LagHistory&, const LagHistory&) = default;

 private:
  std::array<std::uint8_t, kCapacity> entries_{};
  std::uint8_t head_ = 0;
  std::uint8_t count_ = 0;
};

// Biased variance of the buffered magnitudes. Subtracting the mean removes
// the gravity component.
inline double compute_power(const SampleWindow& w) {
  if (w.empty() || w.is_constant()) return 0.0;
  const double n = static_cast<double>(w.size());
  const double mean = w.sum() / n;
  return std::max(0.0, w.sum_squares() / n - mean * mean);
}

// Periodicity of the magnitude over the cadence band.
//
// The dominant lag is the argmax of the biased autocorrelation
//   r(L) = sum_{i>=L} d_i d_{i-L} / sum_i d_i^2,   d_i = m_i - mean,
// which discounts lag multiples of the true period by (n - L) / n; ties go to
// the smaller lag. The reported rhythmicity is r at that lag rescaled by
// n / (n - L), so an ideal periodic signal scores 1 whatever its period.
inline Rhythm compute_rhythmicity(const SampleWindow& w) {
  const std::size_t n = w.size();
  if (n < kMinFillForLag || w.is_constant()) return {};
  std::array<double, kWindowLength> d{};
  w.copy_chronological(d);
  const double mean = w.sum() / static_cast<double>(n);
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] -= mean;
    den += d[i] * d[i];
  }
  if (!(den > 0.0)) return {};

  double best = 0.0;
  int best_lag = 0;
  for (int lag = kMinLag; lag <= kMaxLag; ++lag) {
    double num = 0.0;
    for (std::size_t i = static_cast<std::size_t>(lag); i < n; ++i) num += d[i] * d[i - lag];
    if (num > best) {
      best = num;
      best_lag = lag;
    }
  }
  if (best_lag == 0) return {};
  const double scale = static_cast<double>(n) / static_cast<double>(n - best_lag);
  return {std::clamp(best * scale / den, 0.0, 1.0), best_lag};
}

// Fraction of remembered dominant lags within one sample of the current one.
// The history is updated with current_lag afterwards.
inline double compute_freq_stability(LagHistory& history, std::optional<int> current_lag) {
  double score = 0.0;
  if (current_lag) {
    const auto [agree, valid] = history.agreement(*current_lag);
    if (valid > 0) score = static_cast<double>(agree) / static_cast<double>(valid);
  }
  history.push(current_lag);
  return score;
}

inline FeatureVector extract_features(const SampleWindow& w, LagHistory& history) {
  FeatureVector f;
  f.power = compute_power(w);
  const Rhythm r = compute_rhythmicity(w);
  f.rhythmicity = r.rhythmicity;
  f.dominant_lag = r.dominant_lag;
  f.freq_stability = compute_freq_stability(history, r.dominant_lag);
  return f;
}

}  // namespace pact
