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

#include <array>
#include <cstddef>

#include "pact/activity.hpp"
#include "pact/error.hpp"
#include "pact/tree.hpp"

namespace pact {

using ProbabilityVector = std::array<double, kNumClasses>;

inline constexpr double kDefaultAlpha = 0.98;
inline constexpr double kDefaultThreshold = 0.5;
inline constexpr double kDefaultInitialProb = 0.2;

// Per-class first-order autoregressive filter bank plus the decision threshold.
struct SmootherState {
  ProbabilityVector probs{};
  std::array<double, kNumClasses> alpha{};
  double threshold = kDefaultThreshold;

  static SmootherState make(const std::array<double, kNumClasses>& alpha,
                            double threshold = kDefaultThreshold,
                            double initial = kDefaultInitialProb) {
    for (double a : alpha) {
      if (!(a >= 0.0 && a < 1.0)) throw InvalidInput("filter coefficient outside [0, 1)");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("threshold outside (0, 1)");
    if (!(initial >= 0.0 && initial <= 1.0)) throw InvalidInput("initial probability outside [0, 1]");
    SmootherState s;
    s.probs.fill(initial);
    s.alpha = alpha;
    s.threshold = threshold;
    return s;
  }

  static SmootherState make(double alpha = kDefaultAlpha, double threshold = kDefaultThreshold,
                            double initial = kDefaultInitialProb) {
    std::array<double, kNumClasses> a;
    a.fill(alpha);
    return make(a, threshold, initial);
  }

  friend bool operator==(const SmootherState&, const SmootherState&) = default;
};

struct Decision {
  ActivityClass label = ActivityClass::kOther;
  double confidence = 0.0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

// p_c <- alpha_c * p_c + (1 - alpha_c) * L_c, each class on its own; no
// renormalization across classes.
inline void ar_update(SmootherState& s, const LikelihoodVector& likelihoods) {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    s.probs[c] = s.alpha[c] * s.probs[c] + (1.0 - s.alpha[c]) * likelihoods[c];
  }
}

// Argmax over Rest/Walk/Run/Bike (ties to the lower index); Other unless the
// winner reaches the threshold. Confidence is the winner's probability.
inline Decision decide(const SmootherState& s) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumTrainedClasses; ++c) {
    if (s.probs[c] > s.probs[best]) best = c;
  }
  const double p = s.probs[best];
  return {p >= s.threshold ? class_from_index(best) : ActivityClass::kOther, p};
}

}  // namespace pact
