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
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "pact/features.hpp"
#include "pact/fixed_point.hpp"
#include "pact/ingest.hpp"
#include "pact/smoother.hpp"
#include "pact/tree.hpp"

// Integer-only mirror of the floating-point pipeline. Magnitudes, features
// and thresholds are Q16.16; likelihoods, probabilities, filter coefficients
// and the threshold are Q1.15.
//
// Divisions: the power estimate needs one division by n^2 only while the
// window is still filling (a shift once it is full); rhythmicity needs one
// normalization division per sample. Everything else uses shifts, products
// or compile-time tables.

namespace pact::fixed {

// Ring of Q16.16 magnitudes with exact 64-bit moments.
using FixedWindow = RingWindow<std::int32_t, std::int64_t>;

// |(x, y, z)| in Q16.16 g straight from 12-bit counts:
// sqrt(x^2 + y^2 + z^2) / 256 * 2^16 = sqrt((x^2 + y^2 + z^2) * 2^16).
inline Q16_16 magnitude_q(const RawSample& r) {
  const std::uint64_t x = static_cast<std::uint64_t>(std::int64_t{r.x} * r.x);
  const std::uint64_t y = static_cast<std::uint64_t>(std::int64_t{r.y} * r.y);
  const std::uint64_t z = static_cast<std::uint64_t>(std::int64_t{r.z} * r.z);
  return Q16_16::from_raw(static_cast<std::int64_t>(isqrt_round((x + y + z) << 16)));
}

struct FixedFeatureVector {
  Q16_16 power{};
  Q16_16 rhythmicity{};
  Q16_16 freq_stability{};
  std::optional<int> dominant_lag;

  Q16_16 operator[](Feature f) const {
    switch (f) {
      case Feature::kPower: return power;
      case Feature::kRhythmicity: return rhythmicity;
      case Feature::kFreqStability: return freq_stability;
    }
    return {};
  }

  FeatureVector to_float() const {
    return {power.to_double(), rhythmicity.to_double(), freq_stability.to_double(), dominant_lag};
  }

  friend bool operator==(const FixedFeatureVector&, const FixedFeatureVector&) = default;
};

struct FixedRhythm {
  Q16_16 rhythmicity{};
  std::optional<int> dominant_lag;

  friend bool operator==(const FixedRhythm&, const FixedRhythm&) = default;
};

// (n * S2 - S1^2) / n^2 with S1, S2 the exact Q16.16 / Q32.32 moments,
// rescaled to Q16.16.
inline Q16_16 power_q(const FixedWindow& w) {
  if (w.empty() || w.is_constant()) return {};
  const std::int64_t n = static_cast<std::int64_t>(w.size());
  const std::int64_t num = n * w.sum_squares() - w.sum() * w.sum();
  if (num <= 0) return {};
  const std::uint64_t n2 = static_cast<std::uint64_t>(n * n);
  if (std::has_single_bit(n2)) {
    const int shift = std::countr_zero(n2) + 16;
    return Q16_16::from_raw((num + (std::int64_t{1} << (shift - 1))) >> shift);
  }
  return Q16_16::from_raw(div_round_half_up(num, static_cast<std::int64_t>(n2) << 16));
}

// Same contract as compute_rhythmicity. Deviations are kept scaled by n
// (D_i = n m_i - S1) so they stay integral; numerators and the energy are
// 64-bit sums. Every lag shares the denominator, so the argmax compares
// numerators directly.
inline FixedRhythm autocorr_q(const FixedWindow& w) {
  const std::size_t n = w.size();
  if (n < kMinFillForLag || w.is_constant()) return {};
  std::array<std::int32_t, kWindowLength> m{};
  w.copy_chronological(m);
  const std::int64_t sn = static_cast<std::int64_t>(n);
  std::array<std::int64_t, kWindowLength> d{};
  std::int64_t den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = sn * m[i] - w.sum();
    den += d[i] * d[i];
  }
  if (den <= 0) return {};

  std::int64_t best = 0;
  int best_lag = 0;
  for (int lag = kMinLag; lag <= kMaxLag; ++lag) {
    std::int64_t num = 0;
    for (std::size_t i = static_cast<std::size_t>(lag); i < n; ++i) num += d[i] * d[i - lag];
    if (num > best) {
      best = num;
      best_lag = lag;
    }
  }
  if (best_lag == 0) return {};

  // Bring the energy under 2^31 so num * n * 2^16 fits in 64 bits.
  const int shift = std::max(0, static_cast<int>(std::bit_width(static_cast<std::uint64_t>(den))) - 31);
  const std::int64_t num_s = best >> shift;
  const std::int64_t den_s = den >> shift;
  const std::int64_t q = div_round_half_up(num_s * sn * 65536, (sn - best_lag) * den_s);
  return {Q16_16::from_raw(std::clamp<std::int64_t>(q, 0, 65536)), best_lag};
}

namespace detail {

// kStabilityTable[valid][agree] = round(agree / valid) in Q16.16.
constexpr auto make_stability_table() {
  std::array<std::array<std::int32_t, LagHistory::kCapacity + 1>, LagHistory::kCapacity + 1> t{};
  for (std::int64_t v = 1; v <= static_cast<std::int64_t>(LagHistory::kCapacity); ++v) {
    for (std::int64_t a = 0; a <= v; ++a) {
      t[static_cast<std::size_t>(v)][static_cast<std::size_t>(a)] =
          static_cast<std::int32_t>(div_round_half_up(a * 65536, v));
    }
  }
  return t;
}

inline constexpr auto kStabilityTable = make_stability_table();

}  // namespace detail

inline Q16_16 freq_stability_q(LagHistory& history, std::optional<int> current_lag) {
  Q16_16 score{};
  if (current_lag) {
    const auto [agree, valid] = history.agreement(*current_lag);
    if (valid > 0) score.raw = detail::kStabilityTable[static_cast<std::size_t>(valid)][static_cast<std::size_t>(agree)];
  }
  history.push(current_lag);
  return score;
}

inline FixedFeatureVector extract_features_q(const FixedWindow& w, LagHistory& history) {
  FixedFeatureVector f;
  f.power = power_q(w);
  const FixedRhythm r = autocorr_q(w);
  f.rhythmicity = r.rhythmicity;
  f.dominant_lag = r.dominant_lag;
  f.freq_stability = freq_stability_q(history, r.dominant_lag);
  return f;
}

using FixedLikelihoods = std::array<Q1_15, kNumClasses>;

// Integer view of a LikelihoodTree: Q16.16 thresholds, Q1.15 likelihoods.
class FixedTree {
 public:
  struct Node {
    bool leaf = true;
    Feature feature = Feature::kPower;
    Q16_16 threshold{};
    std::uint16_t left = 0;
    std::uint16_t right = 0;
    FixedLikelihoods likelihoods{};
  };

  explicit FixedTree(const LikelihoodTree& tree) : root_(tree.root()) {
    nodes_.reserve(tree.size());
    for (const TreeNode& n : tree.nodes()) {
      Node q;
      q.leaf = n.is_leaf();
      q.feature = n.feature;
      q.threshold = Q16_16::from_double(n.threshold);
      q.left = n.left;
      q.right = n.right;
      // 1.0 (only possible for an unsmoothed node) saturates to 32767.
      for (std::size_t c = 0; c < kNumClasses; ++c) q.likelihoods[c] = Q1_15::from_double(n.likelihoods[c]);
      nodes_.push_back(q);
    }
  }

  // Trees are validated on construction of the LikelihoodTree, so the walk
  // cannot leave the array or exceed the depth bound.
  const FixedLikelihoods& eval(const FixedFeatureVector& f) const {
    const Node* n = &nodes_[root_];
    while (!n->leaf) n = &nodes_[f[n->feature] < n->threshold ? n->left : n->right];
    return n->likelihoods;
  }

 private:
  std::vector<Node> nodes_;
  std::uint16_t root_ = 0;
};

struct FixedSmootherState {
  std::array<Q1_15, kNumClasses> probs{};
  std::array<Q1_15, kNumClasses> alpha{};
  Q1_15 threshold{};

  static FixedSmootherState from(const SmootherState& s) {
    FixedSmootherState q;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      q.probs[c] = Q1_15::from_double(s.probs[c]);
      q.alpha[c] = Q1_15::from_double(s.alpha[c]);
    }
    q.threshold = Q1_15::from_double(s.threshold);
    return q;
  }

  friend bool operator==(const FixedSmootherState&, const FixedSmootherState&) = default;
};

// p <- L + alpha * (p - L), which is the float recursion rearranged so that
// only one rounded product appears. Results stay in [0, 1).
inline void ar_update_q(FixedSmootherState& s, const FixedLikelihoods& likelihoods) {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const Q1_15 delta = q_sub(s.probs[c], likelihoods[c]);
    const Q1_15 next = q_add(likelihoods[c], q_mul(s.alpha[c], delta));
    s.probs[c].raw = std::max<std::int16_t>(next.raw, 0);
  }
}

struct FixedDecision {
  ActivityClass label = ActivityClass::kOther;
  Q1_15 confidence{};

  Decision to_float() const { return {label, confidence.to_double()}; }

  friend bool operator==(const FixedDecision&, const FixedDecision&) = default;
};

inline FixedDecision decide_q(const FixedSmootherState& s) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumTrainedClasses; ++c) {
    if (s.probs[c] > s.probs[best]) best = c;
  }
  const Q1_15 p = s.probs[best];
  return {p >= s.threshold ? class_from_index(best) : ActivityClass::kOther, p};
}

}  // namespace pact::fixed
