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
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pact/byte_io.hpp"
#include "pact/features.hpp"
#include "pact/fixed_pipeline.hpp"
#include "pact/ingest.hpp"
#include "pact/smoother.hpp"
#include "pact/tree.hpp"
#include "pact/tree_io.hpp"

// Streaming classifiers: decode -> window -> features -> tree -> filter bank
// -> decision, one Decision per input sample.
//
// Canonical state layout (little-endian), used to measure the RAM budget and
// to checkpoint/resume a stream bit-exactly. V is f64 for the float backend
// and i32 for the fixed one; A is f64 / i64; P is f64 / i16 (Q1.15).
//
//   4   magic "PCST"
//   2   version = 1
//   1   backend (0 float, 1 fixed)
//   1   reserved = 0
//   4   tree id (CRC-32 of the tree file)
//   8   next sample index
//   1   window head, 1 window fill, 1 trailing-run length
//   64V window storage (ring order)
//   A   running sum, A running sum of squares
//   1   lag history head, 1 lag history count, 8 lag entries (0 = none)
//   5P  probabilities, 5P filter coefficients, P threshold
//   4   CRC-32 of every preceding byte
//
// The tree itself is read-only and lives with the code (flash), not here.

namespace pact {

enum class Backend : std::uint8_t { kFloat = 0, kFixed = 1 };

inline constexpr std::array<std::uint8_t, 4> kStateMagic = {'P', 'C', 'S', 'T'};
inline constexpr std::uint16_t kStateVersion = 1;

struct ClassifierConfig {
  std::array<double, kNumClasses> alpha = {kDefaultAlpha, kDefaultAlpha, kDefaultAlpha,
                                           kDefaultAlpha, kDefaultAlpha};
  double threshold = kDefaultThreshold;
  double initial_prob = kDefaultInitialProb;

  SmootherState smoother() const { return SmootherState::make(alpha, threshold, initial_prob); }
};

namespace detail {

inline void write_state_header(ByteWriter& w, Backend b, std::uint32_t tree_id, std::uint64_t next) {
  for (auto c : kStateMagic) w.u8(c);
  w.u16(kStateVersion);
  w.u8(static_cast<std::uint8_t>(b));
  w.u8(0);
  w.u32(tree_id);
  w.u64(next);
}

// Returns the next sample index.
inline std::uint64_t read_state_header(ByteReader& r, Backend b, std::uint32_t tree_id) {
  for (auto c : kStateMagic) {
    if (r.u8() != c) throw ParseError(ParseErrc::kBadMagic, "expected \"PCST\"");
  }
  if (r.u16() != kStateVersion) throw ParseError(ParseErrc::kVersionMismatch, "state version");
  if (r.u8() != static_cast<std::uint8_t>(b)) throw ParseError(ParseErrc::kBadField, "state saved by another backend");
  if (r.u8() != 0) throw ParseError(ParseErrc::kBadField, "reserved byte");
  if (r.u32() != tree_id) throw ParseError(ParseErrc::kBadField, "state saved against another tree");
  return r.u64();
}

inline void write_history(ByteWriter& w, const LagHistory& h) {
  w.u8(h.head());
  w.u8(static_cast<std::uint8_t>(h.size()));
  for (auto e : h.storage()) w.u8(e);
}

inline LagHistory read_history(ByteReader& r) {
  const std::size_t head = r.u8();
  const std::size_t count = r.u8();
  std::array<std::uint8_t, LagHistory::kCapacity> e{};
  for (auto& v : e) v = r.u8();
  return LagHistory::restore(e, head, count);
}

template <typename Window, typename ReadValue, typename ReadAccum>
Window read_window(ByteReader& r, ReadValue read_value, ReadAccum read_accum) {
  const std::size_t head = r.u8();
  const std::size_t fill = r.u8();
  const std::size_t run = r.u8();
  std::array<typename Window::value_type, Window::kCapacity> values{};
  for (auto& v : values) v = read_value();
  const auto sum = read_accum();
  const auto sum_sq = read_accum();
  return Window::restore(values, head, fill, run, sum, sum_sq);
}

inline void finish(ByteReader& r) {
  if (r.remaining() != 0) throw ParseError(ParseErrc::kTrailingBytes, "state blob too long");
}

}  // namespace detail

// Floating-point reference classifier.
class Classifier {
 public:
  explicit Classifier(std::shared_ptr<const LikelihoodTree> tree, const ClassifierConfig& config = {})
      : tree_(std::move(tree)), tree_id_(pact::tree_id(*tree_)), smoother_(config.smoother()) {}

  Decision step(const RawSample& raw) {
    const AccelSample s = decoder_(raw);
    push_sample(window_, s);
    features_ = extract_features(window_, history_);
    ar_update(smoother_, tree_eval(*tree_, features_));
    return decide(smoother_);
  }

  std::vector<Decision> run(std::span<const RawSample> samples) {
    std::vector<Decision> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(step(s));
    return out;
  }

  const FeatureVector& features() const noexcept { return features_; }
  const SmootherState& smoother() const noexcept { return smoother_; }
  ProbabilityVector probabilities() const noexcept { return smoother_.probs; }
  const SampleWindow& window() const noexcept { return window_; }
  std::uint64_t next_index() const noexcept { return decoder_.next_index(); }
  std::uint32_t tree_id() const noexcept { return tree_id_; }
  const LikelihoodTree& tree() const noexcept { return *tree_; }
  static constexpr Backend backend() { return Backend::kFloat; }

  std::vector<std::uint8_t> save_state() const {
    ByteWriter w;
    detail::write_state_header(w, backend(), tree_id_, decoder_.next_index());
    w.u8(window_.head());
    w.u8(static_cast<std::uint8_t>(window_.size()));
    w.u8(window_.run_length());
    for (double v : window_.storage()) w.f64(v);
    w.f64(window_.sum());
    w.f64(window_.sum_squares());
    detail::write_history(w, history_);
    for (double p : smoother_.probs) w.f64(p);
    for (double a : smoother_.alpha) w.f64(a);
    w.f64(smoother_.threshold);
    w.append_crc();
    return w.take();
  }

  // Restores a checkpoint from save_state(); the object is unchanged on error.
  void load_state(std::span<const std::uint8_t> blob) {
    ByteReader r(verify_crc(blob));
    try {
      const std::uint64_t next = detail::read_state_header(r, backend(), tree_id_);
      auto window = detail::read_window<SampleWindow>(
          r, [&] { return r.f64(); }, [&] { return r.f64(); });
      LagHistory history = detail::read_history(r);
      SmootherState sm;
      for (double& p : sm.probs) p = r.f64();
      for (double& a : sm.alpha) a = r.f64();
      sm.threshold = r.f64();
      detail::finish(r);
      for (double p : sm.probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability outside [0, 1]");
      }
      SmootherState::make(sm.alpha, sm.threshold);  // validates
      decoder_.set_next_index(next);
      window_ = window;
      history_ = history;
      smoother_ = sm;
    } catch (const InvalidInput& e) {
      throw ParseError(ParseErrc::kBadField, e.what());
    }
  }

 private:
  std::shared_ptr<const LikelihoodTree> tree_;
  std::uint32_t tree_id_;
  SampleDecoder decoder_;
  SampleWindow window_;
  LagHistory history_;
  SmootherState smoother_;
  FeatureVector features_;
};

// Integer-only classifier.
class FixedClassifier {
 public:
  explicit FixedClassifier(std::shared_ptr<const LikelihoodTree> tree, const ClassifierConfig& config = {})
      : tree_id_(pact::tree_id(*tree)),
        tree_(*tree),
        smoother_(fixed::FixedSmootherState::from(config.smoother())) {}

  fixed::FixedDecision step_q(const RawSample& raw) {
    if (!is_valid(raw)) decode_sample(raw, next_index_);  // throws
    ++next_index_;
    window_.push(fixed::magnitude_q(raw).raw);
    features_ = fixed::extract_features_q(window_, history_);
    fixed::ar_update_q(smoother_, tree_.eval(features_));
    return fixed::decide_q(smoother_);
  }

  Decision step(const RawSample& raw) { return step_q(raw).to_float(); }

  std::vector<Decision> run(std::span<const RawSample> samples) {
    std::vector<Decision> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(step(s));
    return out;
  }

  const fixed::FixedFeatureVector& features() const noexcept { return features_; }
  const fixed::FixedSmootherState& smoother() const noexcept { return smoother_; }
  ProbabilityVector probabilities() const noexcept {
    ProbabilityVector p{};
    for (std::size_t c = 0; c < kNumClasses; ++c) p[c] = smoother_.probs[c].to_double();
    return p;
  }
  std::uint64_t next_index() const noexcept { return next_index_; }
  std::uint32_t tree_id() const noexcept { return tree_id_; }
  static constexpr Backend backend() { return Backend::kFixed; }

  std::vector<std::uint8_t> save_state() const {
    ByteWriter w;
    detail::write_state_header(w, backend(), tree_id_, next_index_);
    w.u8(window_.head());
    w.u8(static_cast<std::uint8_t>(window_.size()));
    w.u8(window_.run_length());
    for (std::int32_t v : window_.storage()) w.i32(v);
    w.i64(window_.sum());
    w.i64(window_.sum_squares());
    detail::write_history(w, history_);
    for (auto p : smoother_.probs) w.i16(p.raw);
    for (auto a : smoother_.alpha) w.i16(a.raw);
    w.i16(smoother_.threshold.raw);
    w.append_crc();
    return w.take();
  }

  void load_state(std::span<const std::uint8_t> blob) {
    ByteReader r(verify_crc(blob));
    try {
      const std::uint64_t next = detail::read_state_header(r, backend(), tree_id_);
      auto window = detail::read_window<fixed::FixedWindow>(
          r, [&] { return r.i32(); }, [&] { return r.i64(); });
      LagHistory history = detail::read_history(r);
      fixed::FixedSmootherState sm;
      for (auto& p : sm.probs) p.raw = r.i16();
      for (auto& a : sm.alpha) a.raw = r.i16();
      sm.threshold.raw = r.i16();
      detail::finish(r);
      for (auto p : sm.probs) {
        if (p.raw < 0) throw InvalidInput("negative probability");
      }
      for (auto a : sm.alpha) {
        if (a.raw < 0) throw InvalidInput("negative filter coefficient");
      }
      if (sm.threshold.raw <= 0) throw InvalidInput("threshold not positive");
      next_index_ = next;
      window_ = window;
      history_ = history;
      smoother_ = sm;
    } catch (const InvalidInput& e) {
      throw ParseError(ParseErrc::kBadField, e.what());
    }
  }

 private:
  std::uint32_t tree_id_;
  fixed::FixedTree tree_;
  std::uint64_t next_index_ = 0;
  fixed::FixedWindow window_;
  LagHistory history_;
  fixed::FixedSmootherState smoother_;
  fixed::FixedFeatureVector features_;
};

// Byte length of the canonical state serialization.
template <typename C>
std::size_t state_size(const C& classifier) {
  return classifier.save_state().size();
}

}  // namespace pact
