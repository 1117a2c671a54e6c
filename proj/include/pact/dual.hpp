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
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pact/classifier.hpp"
#include "pact/formats.hpp"

namespace pact {

// Runs any classifier over a stream, keeping decisions and probabilities.
template <typename C>
std::vector<DecisionRecord> classify_stream(C& classifier, std::span<const RawSample> samples) {
  std::vector<DecisionRecord> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const Decision d = classifier.step(s);
    out.push_back({d, classifier.probabilities()});
  }
  return out;
}

// Float vs fixed comparison over one stream.
struct EquivalenceReport {
  std::uint64_t samples = 0;
  double agreement = 1.0;       // fraction of samples with the same label
  double max_prob_div = 0.0;    // max over samples and classes of |p_fixed - p_float|
  std::optional<std::uint64_t> first_divergence;  // first sample with differing labels

  // Single-line JSON object.
  std::string to_json() const {
    nlohmann::json j;
    j["agreement"] = agreement;
    j["max_prob_div"] = max_prob_div;
    j["first_divergence"] = first_divergence ? nlohmann::json(*first_divergence) : nlohmann::json(nullptr);
    j["samples"] = samples;
    return j.dump();
  }

  friend bool operator==(const EquivalenceReport&, const EquivalenceReport&) = default;
};

struct DualRun {
  EquivalenceReport report;
  std::vector<DecisionRecord> float_records;
  std::vector<DecisionRecord> fixed_records;
};

inline DualRun run_dual_detailed(std::shared_ptr<const LikelihoodTree> tree, std::span<const RawSample> samples,
                                 const ClassifierConfig& config = {}) {
  Classifier ref(tree, config);
  FixedClassifier fx(tree, config);
  DualRun run;
  run.float_records = classify_stream(ref, samples);
  run.fixed_records = classify_stream(fx, samples);
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& a = run.float_records[i];
    const auto& b = run.fixed_records[i];
    if (a.decision.label == b.decision.label) {
      ++agree;
    } else if (!run.report.first_divergence) {
      run.report.first_divergence = i;
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      run.report.max_prob_div = std::max(run.report.max_prob_div, std::abs(a.probs[c] - b.probs[c]));
    }
  }
  run.report.samples = samples.size();
  run.report.agreement =
      samples.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(samples.size());
  return run;
}

inline EquivalenceReport run_dual(std::shared_ptr<const LikelihoodTree> tree, std::span<const RawSample> samples,
                                  const ClassifierConfig& config = {}) {
  return run_dual_detailed(std::move(tree), samples, config).report;
}

}  // namespace pact
