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
#include <cstdint>
#include <optional>
#include <string_view>

namespace pact {

// Output classes of the classifier. The numeric order is fixed: it is the
// tie-breaking order of the decision stage and the column order of every
// likelihood/probability vector.
enum class ActivityClass : std::uint8_t { kRest = 0, kWalk, kRun, kBike, kOther };

inline constexpr std::size_t kNumClasses = 5;
// Classes eligible for the argmax; Other is only produced by the threshold.
inline constexpr std::size_t kNumTrainedClasses = 4;

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "Rest", "Walk", "Run", "Bike", "Other"};

constexpr std::size_t index(ActivityClass c) { return static_cast<std::size_t>(c); }

constexpr ActivityClass class_from_index(std::size_t i) {
  return static_cast<ActivityClass>(i);
}

inline std::string_view name(ActivityClass c) { return kClassNames[index(c)]; }

// Ground-truth annotation of a sample. Besides the five classifier classes it
// covers activities the classifier was never trained on, so the evaluator can
// report how they are absorbed. kUnlabeled marks samples excluded from
// training and scoring (transition zones, unclear segments).
enum class GroundTruth : std::int8_t {
  kUnlabeled = -1,
  kRest = 0,
  kWalk,
  kRun,
  kBike,
  kOther,
  kOffice,
  kXcSkiing,
  kGym,
  kHousework,
};

inline constexpr std::size_t kNumTruthLabels = 9;

inline constexpr std::array<std::string_view, kNumTruthLabels> kTruthNames = {
    "Rest", "Walk", "Run", "Bike", "Other", "Office", "XcSkiing", "Gym", "Housework"};

constexpr GroundTruth truth(ActivityClass c) {
  return static_cast<GroundTruth>(static_cast<std::int8_t>(c));
}

// The trainable class of a label, if it has one.
constexpr std::optional<ActivityClass> trained_class(GroundTruth g) {
  const auto v = static_cast<std::int8_t>(g);
  if (v < 0 || v >= static_cast<std::int8_t>(kNumClasses)) return std::nullopt;
  return static_cast<ActivityClass>(v);
}

inline std::string_view name(GroundTruth g) {
  if (g == GroundTruth::kUnlabeled) return "-";
  return kTruthNames[static_cast<std::size_t>(g)];
}

// Accepts a name ("Walk"), a numeric code ("1"), or "-"/"" for unlabeled.
inline std::optional<GroundTruth> parse_truth(std::string_view s) {
  if (s.empty() || s == "-") return GroundTruth::kUnlabeled;
  for (std::size_t i = 0; i < kNumTruthLabels; ++i) {
    if (s == kTruthNames[i]) return static_cast<GroundTruth>(i);
  }
  if (s == "XC") return GroundTruth::kXcSkiing;
  if (s.size() == 1 && s[0] >= '0' && s[0] <= '8') {
    return static_cast<GroundTruth>(s[0] - '0');
  }
  if (s == "-1") return GroundTruth::kUnlabeled;
  return std::nullopt;
}

}  // namespace pact
