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
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>

#include "pact/activity.hpp"
#include "pact/error.hpp"
#include "pact/ingest.hpp"
#include "pact/smoother.hpp"

namespace pact {

// Rows: ground-truth labels (the five classes plus unseen activities).
// Columns: classifier outputs. Unlabeled samples are not counted.
class ConfusionMatrix {
 public:
  // Column order of the printed table.
  static constexpr std::array<ActivityClass, kNumClasses> kColumnOrder = {
      ActivityClass::kRest, ActivityClass::kOther, ActivityClass::kWalk, ActivityClass::kRun,
      ActivityClass::kBike};

  void add(GroundTruth t, ActivityClass predicted) {
    if (t == GroundTruth::kUnlabeled) return;
    ++counts_[row(t)][index(predicted)];
  }

  std::uint64_t count(GroundTruth t, ActivityClass predicted) const { return counts_[row(t)][index(predicted)]; }

  std::uint64_t row_total(GroundTruth t) const {
    std::uint64_t s = 0;
    for (auto v : counts_[row(t)]) s += v;
    return s;
  }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (std::size_t r = 0; r < kNumTruthLabels; ++r) s += row_total(static_cast<GroundTruth>(r));
    return s;
  }

  // Row-normalized percentage; 0 for an empty row.
  double percent(GroundTruth t, ActivityClass predicted) const {
    const std::uint64_t n = row_total(t);
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(count(t, predicted)) / static_cast<double>(n);
  }

  // Diagonal entry of a trained class as a fraction.
  double recall(ActivityClass c) const { return percent(truth(c), c) / 100.0; }

  // Table with one row per ground-truth label that has samples, the
  // percentages per predicted class, and the labeled duration in hours.
  std::string to_table() const {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-10s", "");
    out += buf;
    for (auto c : kColumnOrder) {
      std::snprintf(buf, sizeof buf, " %8s", std::string(name(c)).c_str());
      out += buf;
    }
    out += "  duration_h\n";
    for (std::size_t r = 0; r < kNumTruthLabels; ++r) {
      const auto t = static_cast<GroundTruth>(r);
      const std::uint64_t n = row_total(t);
      if (n == 0) continue;
      std::snprintf(buf, sizeof buf, "%-10s", std::string(name(t)).c_str());
      out += buf;
      for (auto c : kColumnOrder) {
        std::snprintf(buf, sizeof buf, " %8.2f", percent(t, c));
        out += buf;
      }
      std::snprintf(buf, sizeof buf, "  %10.4f\n", static_cast<double>(n) / kSampleRateHz / 3600.0);
      out += buf;
    }
    return out;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  static std::size_t row(GroundTruth t) {
    const auto r = static_cast<std::int8_t>(t);
    if (r < 0 || r >= static_cast<std::int8_t>(kNumTruthLabels)) throw InvalidInput("not a ground-truth row");
    return static_cast<std::size_t>(r);
  }

  std::array<std::array<std::uint64_t, kNumClasses>, kNumTruthLabels> counts_{};
};

inline ConfusionMatrix evaluate(std::span<const GroundTruth> labels, std::span<const Decision> decisions) {
  if (labels.size() != decisions.size()) {
    throw ParseError(ParseErrc::kLengthMismatch, std::to_string(labels.size()) + " labels for " +
                                                     std::to_string(decisions.size()) + " samples");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < labels.size(); ++i) m.add(labels[i], decisions[i].label);
  return m;
}

}  // namespace pact
