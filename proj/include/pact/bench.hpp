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
#include <chrono>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pact/classifier.hpp"
#include "pact/synth.hpp"
#include "pact/tree_io.hpp"

namespace pact {

struct BenchReport {
  Backend backend = Backend::kFloat;
  std::uint64_t stream_samples = 0;  // samples in one cycle of the test stream
  std::uint64_t iterations = 0;
  double mean_ns = 0.0;
  double median_ns = 0.0;
  double p99_ns = 0.0;
  double samples_per_second = 0.0;
  std::size_t state_bytes = 0;
  std::size_t tree_bytes = 0;
  // Fractions of Rest, Walk, Run, Other in the test stream.
  std::array<double, 4> mix{};

  std::string to_json() const {
    nlohmann::json j;
    j["backend"] = backend == Backend::kFloat ? "float" : "fixed";
    j["stream_samples"] = stream_samples;
    j["iterations"] = iterations;
    j["mean_ns"] = mean_ns;
    j["median_ns"] = median_ns;
    j["p99_ns"] = p99_ns;
    j["samples_per_second"] = samples_per_second;
    j["state_bytes"] = state_bytes;
    j["tree_bytes"] = tree_bytes;
    j["mix"] = mix;
    return j.dump();
  }
};

struct BenchOptions {
  double minutes = 1.0;
  std::uint64_t iterations = 1000;
  std::uint64_t seed = 1;
  Backend backend = Backend::kFloat;
  ClassifierConfig config;
};

namespace detail {

template <typename C>
BenchReport time_stream(C& classifier, const synth::LabeledStream& stream, std::uint64_t iterations) {
  using Clock = std::chrono::steady_clock;
  std::vector<std::uint32_t> ns;
  ns.reserve(stream.size() * iterations);
  std::uint64_t sink = 0;
  const auto start = Clock::now();
  for (std::uint64_t it = 0; it < iterations; ++it) {
    for (const RawSample& s : stream.samples) {
      const auto t0 = Clock::now();
      const Decision d = classifier.step(s);
      const auto t1 = Clock::now();
      sink += static_cast<std::uint64_t>(d.label);
      ns.push_back(static_cast<std::uint32_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
    }
  }
  const double total_s = std::chrono::duration<double>(Clock::now() - start).count();
  BenchReport r;
  r.iterations = iterations;
  r.stream_samples = stream.size();
  if (ns.empty()) return r;
  r.mean_ns = std::accumulate(ns.begin(), ns.end(), 0.0) / static_cast<double>(ns.size());
  auto at = [&](double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(ns.size() - 1));
    std::nth_element(ns.begin(), ns.begin() + static_cast<std::ptrdiff_t>(k), ns.end());
    return static_cast<double>(ns[k]);
  };
  r.median_ns = at(0.5);
  r.p99_ns = at(0.99);
  r.samples_per_second = total_s > 0 ? static_cast<double>(ns.size()) / total_s : 0.0;
  // Keeps the decisions observable so the loop cannot be elided.
  if (sink == 0xFFFFFFFFFFFFFFFFull) r.mean_ns += 1;
  r.state_bytes = classifier.save_state().size();
  return r;
}

}  // namespace detail

// Loops a synthetic stream with the benchmark activity mix through a
// classifier, timing every step. The classifier state carries over between
// cycles.
inline BenchReport run_bench(std::shared_ptr<const LikelihoodTree> tree, const BenchOptions& opt = {}) {
  const synth::LabeledStream stream = synth::gen_session(synth::bench_script(opt.seed, opt.minutes));
  BenchReport r;
  if (opt.backend == Backend::kFloat) {
    Classifier c(tree, opt.config);
    r = detail::time_stream(c, stream, opt.iterations);
  } else {
    FixedClassifier c(tree, opt.config);
    r = detail::time_stream(c, stream, opt.iterations);
  }
  r.backend = opt.backend;
  r.tree_bytes = serialize_tree(*tree).size();
  std::array<std::size_t, kNumClasses> counts{};
  for (auto l : stream.labels) {
    if (auto c = trained_class(l)) ++counts[index(*c)];
  }
  const double n = static_cast<double>(stream.size());
  r.mix = {counts[0] / n, counts[1] / n, counts[2] / n, counts[4] / n};
  return r;
}

}  // namespace pact
