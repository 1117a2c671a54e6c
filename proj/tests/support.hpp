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

// Generators and reference implementations shared by the test binaries.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "pact/pact.hpp"

namespace pact::test {

using Rng = synth::SplitMix64;

inline RawSample random_raw(Rng& rng) {
  auto axis = [&] { return static_cast<std::int16_t>(static_cast<int>(rng.next() % 4096) - 2048); };
  return {axis(), axis(), axis()};
}

// Window holding exactly the given magnitudes (last kWindowLength of them).
inline SampleWindow window_of(const std::vector<double>& m) {
  SampleWindow w;
  for (double v : m) w.push(v);
  return w;
}

inline std::vector<double> sinusoid(std::size_t n, double period, double amp = 0.5, double offset = 1.0,
                                    double phase = 0.0) {
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = offset + amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period + phase);
  }
  return m;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> m(n);
  for (double& v : m) v = rng.uniform();
  return m;
}

// Two-pass variance.
inline double variance_oracle(const std::vector<double>& m) {
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= static_cast<double>(m.size());
  double s = 0.0;
  for (double v : m) s += (v - mean) * (v - mean);
  return s / static_cast<double>(m.size());
}

// Biased autocorrelation by definition, no shortcuts.
inline double autocorr_oracle(const std::vector<double>& m, int lag) {
  const std::size_t n = m.size();
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) den += (m[i] - mean) * (m[i] - mean);
  for (std::size_t i = static_cast<std::size_t>(lag); i < n; ++i) num += (m[i] - mean) * (m[i - lag] - mean);
  return num / den;
}

inline double gini_oracle(const ClassCounts& c) {
  double n = 0.0;
  for (auto v : c) n += static_cast<double>(v);
  double s = 0.0;
  for (auto v : c) s += (static_cast<double>(v) / n) * (static_cast<double>(v) / n);
  return 1.0 - s;
}

// Every (feature, midpoint) pair, scored in long double, ties resolved by
// scan order (lower feature, then lower threshold).
inline std::optional<Split> best_split_oracle(const std::vector<TrainingSample>& s) {
  auto counts_of = [&](auto pred) {
    ClassCounts c{};
    for (const auto& x : s) {
      if (pred(x)) ++c[index(x.label)];
    }
    return c;
  };
  auto gini = [](const ClassCounts& c) {
    long double n = 0, q = 0;
    for (auto v : c) n += v;
    for (auto v : c) q += static_cast<long double>(v) * v;
    return n == 0 ? 0.0L : 1.0L - q / (n * n);
  };
  const ClassCounts all = counts_of([](const auto&) { return true; });
  const long double g = gini(all);
  const long double n = static_cast<long double>(s.size());
  std::optional<Split> best;
  long double best_gain = 0;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    std::vector<double> v;
    for (const auto& x : s) v.push_back(x.x[f]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double t = (v[i] + v[i + 1]) / 2;
      const ClassCounts l = counts_of([&](const auto& x) { return x.x[f] < t; });
      const ClassCounts r = counts_of([&](const auto& x) { return !(x.x[f] < t); });
      long double nl = 0, nr = 0;
      for (auto c : l) nl += c;
      for (auto c : r) nr += c;
      const long double gain = g - nl / n * gini(l) - nr / n * gini(r);
      if (gain > best_gain + 1e-15L) {
        best_gain = gain;
        best = Split{static_cast<Feature>(f), t, static_cast<double>(gain)};
      }
    }
  }
  return best;
}

// Random training set with features on a coarse lattice so ties occur.
inline TrainingSet random_training_set(Rng& rng, std::size_t n, std::size_t classes = kNumClasses) {
  TrainingSet s(n);
  for (auto& x : s) {
    for (double& v : x.x) v = static_cast<double>(rng.next() % 6) / 4.0;
    x.label = class_from_index(rng.next() % classes);
  }
  return s;
}

inline LikelihoodVector random_likelihoods(Rng& rng) {
  LikelihoodVector v{};
  double sum = 0.0;
  for (double& x : v) sum += (x = 0.05 + rng.uniform());
  for (double& x : v) x /= sum;
  return v;
}

// Random full-or-partial tree up to max_depth, nodes in preorder.
inline LikelihoodTree random_tree(Rng& rng, std::size_t max_depth = kMaxTreeDepth, double leaf_prob = 0.15) {
  std::vector<TreeNode> nodes;
  auto build = [&](auto&& self, std::size_t depth) -> std::uint16_t {
    const auto i = static_cast<std::uint16_t>(nodes.size());
    nodes.push_back(TreeNode::leaf(random_likelihoods(rng)));
    if (depth == max_depth || (depth > 0 && rng.uniform() < leaf_prob)) return i;
    const auto f = static_cast<Feature>(rng.next() % kNumFeatures);
    const double t = rng.uniform();
    const std::uint16_t l = self(self, depth + 1);
    const std::uint16_t r = self(self, depth + 1);
    nodes[i] = TreeNode::internal(f, t, l, r, random_likelihoods(rng));
    return i;
  };
  // Full depth-7 trees exceed 255 nodes; fall back to leaves past that.
  for (;;) {
    nodes.clear();
    build(build, 0);
    if (nodes.size() <= kMaxTreeNodes) return LikelihoodTree(std::move(nodes), 0);
  }
}

inline std::shared_ptr<const LikelihoodTree> shared(LikelihoodTree t) {
  return std::make_shared<const LikelihoodTree>(std::move(t));
}

// Small tree trained once per process on a short corpus-like session.
inline std::shared_ptr<const LikelihoodTree> small_trained_tree() {
  static const auto tree = [] {
    synth::SessionScript script;
    script.seed = 99;
    for (auto c : {ActivityClass::kRest, ActivityClass::kWalk, ActivityClass::kRun, ActivityClass::kBike,
                   ActivityClass::kOther}) {
      script.segments.push_back({synth::default_profile(c), 60.0, synth::kSettleSeconds});
    }
    const TrainingSet set = synth::build_training_set(synth::gen_session(script));
    return shared(quantize_tree(train_tree(set)));
  }();
  return tree;
}

}  // namespace pact::test
