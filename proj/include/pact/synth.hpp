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
#include <numbers>
#include <span>
#include <vector>

#include "pact/activity.hpp"
#include "pact/features.hpp"
#include "pact/ingest.hpp"
#include "pact/tree.hpp"

// Deterministic synthetic accelerometer sessions.
//
// Randomness comes from SplitMix64 (Steele, Lea & Flood), chosen because it is
// fully specified by three constants and so reproducible in any language:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// uniform() = (next() >> 11) * 2^-53; gaussian() is one Box-Muller cosine
// branch over (1 - uniform(), uniform()).
//
// Motion model per sample, for a profile with base frequency f, amplitude A,
// harmonic ratio h, noise sigma and jitter j:
//
//   s   = A * (sin(phi) + h * sin(2 phi))
//   phi += 2 pi f_cycle / 25,  f_cycle redrawn each cycle as f * (1 + j N(0,1))
//   (ax, ay, az) = (0.6 s, 0, 1 + 0.8 s) + sigma * (N, N, N)
//
// i.e. gravity on z and the movement along a fixed unit direction. Values are
// rounded to 12-bit counts and clipped to the sensor range.

namespace pact::synth {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

// Seed of the k-th child stream of a parent seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ull * (k + 1)));
  return g.next();
}

struct ActivityProfile {
  ActivityClass label = ActivityClass::kRest;
  double base_freq = 0.0;       // Hz, [0, 4]
  double amplitude = 0.0;       // g
  double noise_std = 0.0;       // g, per axis
  double harmonic_ratio = 0.0;  // second-harmonic amplitude relative to the fundamental
  double freq_jitter = 0.0;     // relative std of the cycle-to-cycle frequency

  bool valid() const {
    return base_freq >= 0.0 && base_freq <= 4.0 && amplitude >= 0.0 && noise_std >= 0.0 &&
           harmonic_ratio >= 0.0 && freq_jitter >= 0.0;
  }
};

// Caricatures, not biomechanics. Rest sits at the noise floor of a still
// sensor (about 0.5 mg rms), below one 12-bit count; Bike is weakly periodic
// vibration; Other is slow irregular gesturing.
inline ActivityProfile default_profile(ActivityClass c) {
  switch (c) {
    case ActivityClass::kRest: return {c, 0.0, 0.0, 0.0005, 0.0, 0.0};
    case ActivityClass::kWalk: return {c, 1.8, 0.35, 0.03, 0.3, 0.03};
    case ActivityClass::kRun: return {c, 2.5, 1.5, 0.08, 0.25, 0.02};
    case ActivityClass::kBike: return {c, 1.2, 0.08, 0.12, 0.5, 0.3};
    case ActivityClass::kOther: return {c, 0.6, 0.3, 0.05, 0.8, 0.5};
  }
  return {};
}

struct Segment {
  ActivityProfile profile;
  double seconds = 0.0;
  // Leading part of the segment annotated as unlabeled (transition zone).
  double settle_seconds = 0.0;

  std::size_t samples() const { return static_cast<std::size_t>(std::llround(seconds * kSampleRateHz)); }
  std::size_t settle_samples() const {
    return std::min(samples(), static_cast<std::size_t>(std::llround(settle_seconds * kSampleRateHz)));
  }
};

struct SessionScript {
  std::vector<Segment> segments;
  std::uint64_t seed = 0;

  double total_seconds() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.seconds;
    return t;
  }
};

// Raw samples with one ground-truth label each.
struct LabeledStream {
  std::vector<RawSample> samples;
  std::vector<GroundTruth> labels;

  std::size_t size() const noexcept { return samples.size(); }

  void append(const LabeledStream& o) {
    samples.insert(samples.end(), o.samples.begin(), o.samples.end());
    labels.insert(labels.end(), o.labels.begin(), o.labels.end());
  }

  friend bool operator==(const LabeledStream&, const LabeledStream&) = default;
};

inline std::int16_t to_counts(double g) {
  const double c = std::round(g * kLsbPerG);
  return static_cast<std::int16_t>(std::clamp(c, static_cast<double>(kRawMin), static_cast<double>(kRawMax)));
}

inline LabeledStream gen_session(const SessionScript& script) {
  if (!(script.total_seconds() > 0.0)) throw InvalidInput("session script has no duration");
  for (const auto& seg : script.segments) {
    if (!seg.profile.valid() || seg.seconds < 0.0) throw InvalidInput("invalid session segment");
  }
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  SplitMix64 rng(script.seed);
  LabeledStream out;
  for (const auto& seg : script.segments) {
    const ActivityProfile& p = seg.profile;
    const std::size_t n = seg.samples();
    const std::size_t settle = seg.settle_samples();
    double phase = kTwoPi * rng.uniform();
    auto draw_freq = [&] { return p.base_freq * std::max(0.2, 1.0 + p.freq_jitter * rng.gaussian()); };
    double freq = draw_freq();
    for (std::size_t i = 0; i < n; ++i) {
      const double s = p.amplitude * (std::sin(phase) + p.harmonic_ratio * std::sin(2.0 * phase));
      const double nx = rng.gaussian(), ny = rng.gaussian(), nz = rng.gaussian();
      out.samples.push_back({to_counts(0.6 * s + p.noise_std * nx), to_counts(p.noise_std * ny),
                             to_counts(1.0 + 0.8 * s + p.noise_std * nz)});
      out.labels.push_back(i < settle ? GroundTruth::kUnlabeled : truth(p.label));
      phase += kTwoPi * freq / kSampleRateHz;
      if (phase >= kTwoPi) {
        phase -= kTwoPi;
        freq = draw_freq();
      }
    }
  }
  return out;
}

// Runs the floating-point feature extractor over a stream and keeps the
// samples whose label is one of the five classifier classes.
inline TrainingSet build_training_set(const LabeledStream& stream) {
  if (stream.labels.size() != stream.samples.size()) throw InvalidInput("labels and samples differ in length");
  TrainingSet set;
  SampleDecoder decoder;
  SampleWindow window;
  LagHistory history;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    push_sample(window, decoder(stream.samples[i]));
    const FeatureVector f = extract_features(window, history);
    if (const auto c = trained_class(stream.labels[i])) set.push_back(TrainingSample::from(f, *c));
  }
  return set;
}

// Class mix of the training corpus: Rest, Walk, Run, Bike, Other.
inline constexpr std::array<double, kNumClasses> kCorpusMix = {0.291, 0.30, 0.175, 0.23, 0.005};
inline constexpr std::size_t kCorpusLabeledSamples = 60000;
inline constexpr std::size_t kCorpusSessions = 6;
// One window length of each segment is left unlabeled.
inline constexpr double kSettleSeconds = static_cast<double>(64) / kSampleRateHz;

// Per-segment spread around the default profiles.
inline ActivityProfile vary(const ActivityProfile& base, SplitMix64& rng) {
  ActivityProfile p = base;
  const double f = rng.uniform(0.85, 1.15);
  const double a = rng.uniform(0.8, 1.2);
  const double s = rng.uniform(0.8, 1.2);
  if (p.label == ActivityClass::kRest) return p;
  p.base_freq = std::min(4.0, p.base_freq * f);
  p.amplitude *= a;
  p.noise_std *= s;
  return p;
}

// kCorpusSessions sessions, each visiting every class once in random order,
// sized so the labeled samples follow kCorpusMix.
inline SessionScript corpus_session(std::uint64_t seed, std::size_t session) {
  SplitMix64 rng(derive_seed(seed, 1000 + session));
  std::array<std::size_t, kNumClasses> order{0, 1, 2, 3, 4};
  for (std::size_t i = kNumClasses - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(rng.next() % (i + 1))]);
  }
  SessionScript script;
  script.seed = derive_seed(seed, session);
  for (std::size_t c : order) {
    const auto labeled = static_cast<std::size_t>(
        std::llround(kCorpusMix[c] * kCorpusLabeledSamples / static_cast<double>(kCorpusSessions)));
    const double seconds = static_cast<double>(labeled + kWindowLength) / kSampleRateHz;
    script.segments.push_back({vary(default_profile(class_from_index(c)), rng), seconds, kSettleSeconds});
  }
  return script;
}

inline LabeledStream corpus_stream(std::uint64_t seed) {
  LabeledStream out;
  for (std::size_t s = 0; s < kCorpusSessions; ++s) out.append(gen_session(corpus_session(seed, s)));
  return out;
}

// Seed of the held-out half of the corpus built from `seed`.
inline std::uint64_t eval_seed(std::uint64_t seed) { return derive_seed(seed, 0xE7A1ull); }

struct Corpus {
  TrainingSet training;
  LabeledStream train_stream;
  LabeledStream eval_stream;
};

inline Corpus default_corpus(std::uint64_t seed) {
  Corpus c;
  c.train_stream = corpus_stream(seed);
  c.eval_stream = corpus_stream(eval_seed(seed));
  c.training = build_training_set(c.train_stream);
  return c;
}

inline Segment default_segment(ActivityClass c, double seconds) {
  return {default_profile(c), seconds, 0.0};
}

// Rest, then walking, then running at increasing speed.
inline SessionScript staged_protocol_script(std::uint64_t seed, double stage_seconds = 60.0) {
  ActivityProfile fast_run = default_profile(ActivityClass::kRun);
  fast_run.base_freq = 2.8;
  fast_run.amplitude = 1.8;
  return {{default_segment(ActivityClass::kRest, stage_seconds),
           default_segment(ActivityClass::kWalk, stage_seconds),
           default_segment(ActivityClass::kRun, stage_seconds / 2),
           {fast_run, stage_seconds / 2, 0.0}},
          seed};
}

// Equal parts Rest, Walk, Run, Bike.
inline SessionScript four_activity_script(std::uint64_t seed, double total_seconds = 600.0) {
  const double q = total_seconds / 4;
  return {{default_segment(ActivityClass::kRest, q), default_segment(ActivityClass::kWalk, q),
           default_segment(ActivityClass::kRun, q), default_segment(ActivityClass::kBike, q)},
          seed};
}

// One-minute benchmark mix: 58% rest, 12.5% walk, 4.2% run, 25.3% other.
inline constexpr std::array<double, 4> kBenchMix = {0.58, 0.125, 0.042, 0.253};

inline SessionScript bench_script(std::uint64_t seed, double minutes = 1.0) {
  const double t = 60.0 * minutes;
  return {{default_segment(ActivityClass::kRest, t * kBenchMix[0]),
           default_segment(ActivityClass::kWalk, t * kBenchMix[1]),
           default_segment(ActivityClass::kRun, t * kBenchMix[2]),
           default_segment(ActivityClass::kOther, t * kBenchMix[3])},
          seed};
}

}  // namespace pact::synth
