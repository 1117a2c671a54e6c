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
#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pact/activity.hpp"
#include "pact/byte_io.hpp"
#include "pact/error.hpp"
#include "pact/features.hpp"
#include "pact/ingest.hpp"
#include "pact/smoother.hpp"

// Text and binary stream formats.
//
//   samples CSV   sample_index,ax_g,ay_g,az_g
//   labels CSV    sample_index,label        (label name, code 0-8, or "-")
//   decisions CSV sample_index,label,confidence,p_rest,p_walk,p_run,p_bike,p_other
//   features CSV  sample_index,power,rhythmicity,freq_stability,dominant_lag
//   raw binary    little-endian int16 triplets (x, y, z) of sign-extended
//                 12-bit counts, no header
//
// Readers accept an optional header line equal to the column list, CRLF line
// endings, and a missing final newline. Sample indices must be consecutive.

namespace pact {

inline constexpr std::string_view kSamplesHeader = "sample_index,ax_g,ay_g,az_g";
inline constexpr std::string_view kLabelsHeader = "sample_index,label";
inline constexpr std::string_view kDecisionsHeader =
    "sample_index,label,confidence,p_rest,p_walk,p_run,p_bike,p_other";
inline constexpr std::string_view kFeaturesHeader =
    "sample_index,power,rhythmicity,freq_stability,dominant_lag";

struct SampleStream {
  std::uint64_t first_index = 0;
  std::vector<RawSample> samples;
};

struct LabelStream {
  std::uint64_t first_index = 0;
  std::vector<GroundTruth> labels;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Calls fn(line, line_number) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    ++line_no;
    if (!line.empty()) fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

template <std::size_t N>
std::array<std::string_view, N> split_fields(std::string_view line, std::size_t line_no) {
  std::array<std::string_view, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t comma = line.find(',');
    if ((comma == std::string_view::npos) != (i + 1 == N)) {
      throw ParseError(ParseErrc::kBadField, "expected " + std::to_string(N) + " fields", line_no);
    }
    out[i] = trim(line.substr(0, comma));
    if (comma != std::string_view::npos) line.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(ParseErrc::kBadField, "not a number: \"" + std::string(s.substr(0, 32)) + "\"",
                     line_no);
  }
  return v;
}

class IndexChecker {
 public:
  std::uint64_t first() const { return first_.value_or(0); }

  void check(std::uint64_t index, std::size_t line_no) {
    if (!first_) {
      first_ = index;
    } else if (index != next_) {
      throw ParseError(ParseErrc::kNonSequentialIndex,
                       "expected " + std::to_string(next_) + ", got " + std::to_string(index), line_no);
    }
    next_ = index + 1;
  }

 private:
  std::optional<std::uint64_t> first_;
  std::uint64_t next_ = 0;
};

inline void append_number(std::string& out, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

inline void append_fixed(std::string& out, double v, int precision) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  out.append(buf, r.ptr);
}

}  // namespace detail

inline SampleStream read_samples_csv(std::string_view text) {
  SampleStream out;
  detail::IndexChecker idx;
  bool first_line = true;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const bool header = first_line && line == kSamplesHeader;
    first_line = false;
    if (header) return;
    const auto f = detail::split_fields<4>(line, no);
    idx.check(detail::parse_number<std::uint64_t>(f[0], no), no);
    std::array<std::int16_t, 3> c{};
    for (std::size_t a = 0; a < 3; ++a) {
      const double g = detail::parse_number<double>(f[a + 1], no);
      try {
        c[a] = encode_axis(g);
      } catch (const DecodeError& e) {
        throw ParseError(ParseErrc::kOutOfRange, e.what(), no);
      }
    }
    out.samples.push_back({c[0], c[1], c[2]});
  });
  out.first_index = idx.first();
  return out;
}

inline std::string write_samples_csv(std::span<const RawSample> samples, std::uint64_t first_index = 0) {
  std::string out(kSamplesHeader);
  out += '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out += std::to_string(first_index + i);
    for (std::int16_t v : {samples[i].x, samples[i].y, samples[i].z}) {
      out += ',';
      detail::append_number(out, v * kGPerLsb);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<RawSample> read_samples_raw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 6 != 0) {
    throw ParseError(ParseErrc::kTruncated, std::to_string(bytes.size()) + " bytes is not a whole number of samples");
  }
  std::vector<RawSample> out;
  out.reserve(bytes.size() / 6);
  ByteReader r(bytes);
  while (r.remaining() > 0) {
    const RawSample s{r.i16(), r.i16(), r.i16()};
    if (!is_valid(s)) {
      throw ParseError(ParseErrc::kOutOfRange, "sample " + std::to_string(out.size()) + " is not a 12-bit value");
    }
    out.push_back(s);
  }
  return out;
}

inline std::vector<std::uint8_t> write_samples_raw(std::span<const RawSample> samples) {
  ByteWriter w;
  for (const auto& s : samples) {
    w.i16(s.x);
    w.i16(s.y);
    w.i16(s.z);
  }
  return w.take();
}

inline LabelStream read_labels_csv(std::string_view text) {
  LabelStream out;
  detail::IndexChecker idx;
  bool first_line = true;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const bool header = first_line && line == kLabelsHeader;
    first_line = false;
    if (header) return;
    const auto f = detail::split_fields<2>(line, no);
    idx.check(detail::parse_number<std::uint64_t>(f[0], no), no);
    const auto label = parse_truth(f[1]);
    if (!label) throw ParseError(ParseErrc::kBadField, "unknown label \"" + std::string(f[1].substr(0, 32)) + "\"", no);
    out.labels.push_back(*label);
  });
  out.first_index = idx.first();
  return out;
}

inline std::string write_labels_csv(std::span<const GroundTruth> labels, std::uint64_t first_index = 0) {
  std::string out(kLabelsHeader);
  out += '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(first_index + i);
    out += ',';
    out += name(labels[i]);
    out += '\n';
  }
  return out;
}

// One classifier output row.
struct DecisionRecord {
  Decision decision;
  ProbabilityVector probs{};

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

inline void append_decision_row(std::string& out, std::uint64_t index, const DecisionRecord& r) {
  out += std::to_string(index);
  out += ',';
  out += name(r.decision.label);
  out += ',';
  detail::append_fixed(out, r.decision.confidence, 6);
  for (double p : r.probs) {
    out += ',';
    detail::append_fixed(out, p, 6);
  }
  out += '\n';
}

inline void append_feature_row(std::string& out, std::uint64_t index, const FeatureVector& f) {
  out += std::to_string(index);
  for (double v : {f.power, f.rhythmicity, f.freq_stability}) {
    out += ',';
    detail::append_fixed(out, v, 6);
  }
  out += ',';
  out += f.dominant_lag ? std::to_string(*f.dominant_lag) : std::string("none");
  out += '\n';
}

}  // namespace pact
