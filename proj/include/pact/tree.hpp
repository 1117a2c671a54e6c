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
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pact/activity.hpp"
#include "pact/error.hpp"
#include "pact/features.hpp"

namespace pact {

using LikelihoodVector = std::array<double, kNumClasses>;
using ClassCounts = std::array<std::uint64_t, kNumClasses>;

inline constexpr std::size_t kMaxTreeDepth = 7;
inline constexpr std::size_t kMaxTreeNodes = 255;

// Gini diversity index 1 - sum_c p_c^2, in [0, 1 - 1/5].
inline double gini_impurity(const ClassCounts& counts) {
  std::uint64_t total = 0, sum_sq = 0;
  for (auto c : counts) {
    total += c;
    sum_sq += c * c;
  }
  if (total == 0) throw InvalidInput("gini_impurity: all class counts are zero");
  // One rounding: (n^2 - sum c^2) / n^2.
  const double n2 = static_cast<double>(total) * static_cast<double>(total);
  return (n2 - static_cast<double>(sum_sq)) / n2;
}

// (count_c + 1) / (n + 5): never zero, so no filter is ever driven to 0.
inline LikelihoodVector laplace_likelihoods(const ClassCounts& counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  const double denom = static_cast<double>(total + kNumClasses);
  LikelihoodVector v{};
  for (std::size_t c = 0; c < kNumClasses; ++c) v[c] = static_cast<double>(counts[c] + 1) / denom;
  return v;
}

struct TrainingSample {
  std::array<double, kNumFeatures> x{};
  ActivityClass label = ActivityClass::kRest;

  double operator[](Feature f) const { return x[static_cast<std::size_t>(f)]; }

  static TrainingSample from(const FeatureVector& f, ActivityClass label) {
    return {{f.power, f.rhythmicity, f.freq_stability}, label};
  }
};

using TrainingSet = std::vector<TrainingSample>;

struct Split {
  Feature feature = Feature::kPower;
  double threshold = 0.0;
  double gain = 0.0;  // G(parent) - nL/n G(left) - nR/n G(right)

  friend bool operator==(const Split&, const Split&) = default;
};

namespace detail {

using u128 = unsigned __int128;

// Maximizing the Gini decrease is maximizing S = A/nL + B/nR with A, B the
// sums of squared class counts on each side. Candidates are compared as exact
// rationals so that ties are real ties.
struct SplitScore {
  std::uint64_t a = 0, n_left = 0, b = 0, n_right = 0;

  u128 numerator() const { return u128{a} * n_right + u128{b} * n_left; }
  u128 denominator() const { return u128{n_left} * n_right; }

  bool better_than(const SplitScore& o) const {
    return numerator() * o.denominator() > o.numerator() * denominator();
  }
  // S > parent_sq / n, i.e. the split strictly lowers impurity.
  bool improves(std::uint64_t parent_sq, std::uint64_t n) const {
    return numerator() * n > u128{parent_sq} * denominator();
  }
};

inline std::uint64_t sum_squares(const ClassCounts& c) {
  std::uint64_t s = 0;
  for (auto v : c) s += v * v;
  return s;
}

inline ClassCounts count_classes(std::span<const TrainingSample> samples,
                                 std::span<const std::uint32_t> idx) {
  ClassCounts c{};
  for (auto i : idx) ++c[index(samples[i].label)];
  return c;
}

inline std::optional<Split> best_split(std::span<const TrainingSample> samples,
                                       std::span<const std::uint32_t> idx) {
  const std::uint64_t n = idx.size();
  if (n < 2) return std::nullopt;
  const ClassCounts parent = count_classes(samples, idx);
  const std::uint64_t parent_sq = sum_squares(parent);

  std::optional<Split> best;
  SplitScore best_score;
  std::vector<std::pair<double, std::uint8_t>> order(n);
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto& s = samples[idx[k]];
      order[k] = {s.x[f], static_cast<std::uint8_t>(s.label)};
    }
    std::sort(order.begin(), order.end());
    ClassCounts left{};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      ++left[order[k].second];
      if (!(order[k].first < order[k + 1].first)) continue;
      ClassCounts right{};
      for (std::size_t c = 0; c < kNumClasses; ++c) right[c] = parent[c] - left[c];
      const SplitScore score{sum_squares(left), k + 1, sum_squares(right), n - k - 1};
      if (!score.improves(parent_sq, n)) continue;
      if (best && !score.better_than(best_score)) continue;
      const double g_parent = gini_impurity(parent);
      const double wl = static_cast<double>(k + 1) / static_cast<double>(n);
      const double wr = static_cast<double>(n - k - 1) / static_cast<double>(n);
      best = Split{static_cast<Feature>(f), (order[k].first + order[k + 1].first) / 2,
                   g_parent - wl * gini_impurity(left) - wr * gini_impurity(right)};
      best_score = score;
    }
  }
  return best;
}

}  // namespace detail

// Exhaustive CART split search over midpoints of consecutive distinct values.
// Ties go to the lower feature id, then the lower threshold. Returns nullopt
// when no split strictly decreases the impurity.
inline std::optional<Split> best_split(std::span<const TrainingSample> samples) {
  std::vector<std::uint32_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0u);
  return detail::best_split(samples, idx);
}

enum class NodeKind : std::uint8_t { kInternal = 0, kLeaf = 1 };

// For internal nodes `likelihoods` holds the smoothed class frequencies of the
// subtree; inference only reads leaves.
struct TreeNode {
  NodeKind kind = NodeKind::kLeaf;
  Feature feature = Feature::kPower;
  double threshold = 0.0;
  std::uint16_t left = 0;
  std::uint16_t right = 0;
  LikelihoodVector likelihoods{};

  bool is_leaf() const noexcept { return kind == NodeKind::kLeaf; }

  static TreeNode leaf(const LikelihoodVector& v) { return {NodeKind::kLeaf, Feature::kPower, 0.0, 0, 0, v}; }
  static TreeNode internal(Feature f, double threshold, std::uint16_t left, std::uint16_t right,
                           const LikelihoodVector& v = {}) {
    return {NodeKind::kInternal, f, threshold, left, right, v};
  }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class LikelihoodTree {
 public:
  // Tolerance on leaf likelihood sums; covers Q1.15 storage.
  static constexpr double kSumTolerance = 1.0 / 32768.0 + 1e-12;

  LikelihoodTree() : LikelihoodTree({TreeNode::leaf({0.2, 0.2, 0.2, 0.2, 0.2})}, 0) {}

  // Validates the node array; throws StructuralError.
  LikelihoodTree(std::vector<TreeNode> nodes, std::uint16_t root)
      : nodes_(std::move(nodes)), root_(root) {
    depth_ = validate();
  }

  // Skips validation. Only for exercising the evaluator's own checks.
  static LikelihoodTree unchecked(std::vector<TreeNode> nodes, std::uint16_t root) {
    LikelihoodTree t;
    t.nodes_ = std::move(nodes);
    t.root_ = root;
    t.depth_ = kMaxTreeDepth;
    return t;
  }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::uint16_t root() const noexcept { return root_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t depth() const noexcept { return depth_; }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  // Index of the leaf reached by x. Routes left when feature < threshold.
  template <typename Predictors>
  std::uint16_t route(const Predictors& x) const {
    std::size_t i = root_;
    for (std::size_t steps = 0; steps <= kMaxTreeDepth; ++steps) {
      if (i >= nodes_.size()) throw StructuralError("node index " + std::to_string(i) + " out of range");
      const TreeNode& node = nodes_[i];
      if (node.is_leaf()) return static_cast<std::uint16_t>(i);
      i = x[node.feature] < node.threshold ? node.left : node.right;
    }
    throw StructuralError("path longer than the maximum tree depth");
  }

  friend bool operator==(const LikelihoodTree&, const LikelihoodTree&) = default;

 private:
  std::size_t validate() const {
    if (nodes_.empty() || nodes_.size() > kMaxTreeNodes) {
      throw StructuralError("node count " + std::to_string(nodes_.size()) + " not in [1, 255]");
    }
    if (root_ >= nodes_.size()) throw StructuralError("root index out of range");
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root_, 0}};
    std::size_t max_depth = 0;
    while (!stack.empty()) {
      const auto [i, d] = stack.back();
      stack.pop_back();
      if (i >= nodes_.size()) throw StructuralError("child index " + std::to_string(i) + " out of range");
      if (seen[i]) throw StructuralError("node " + std::to_string(i) + " reachable twice");
      if (d > kMaxTreeDepth) throw StructuralError("depth exceeds 7");
      seen[i] = true;
      max_depth = std::max(max_depth, d);
      const TreeNode& n = nodes_[i];
      if (n.kind != NodeKind::kLeaf && n.kind != NodeKind::kInternal) {
        throw StructuralError("unknown node kind");
      }
      if (n.is_leaf()) {
        check_likelihoods(n.likelihoods, i);
        continue;
      }
      if (static_cast<std::size_t>(n.feature) >= kNumFeatures) throw StructuralError("unknown feature id");
      if (!std::isfinite(n.threshold)) throw StructuralError("non-finite threshold");
      stack.push_back({n.right, d + 1});
      stack.push_back({n.left, d + 1});
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw StructuralError("unreachable nodes in tree");
    }
    return max_depth;
  }

  static void check_likelihoods(const LikelihoodVector& v, std::size_t i) {
    double sum = 0.0;
    for (double p : v) {
      if (!(p >= 0.0 && p <= 1.0)) throw StructuralError("leaf " + std::to_string(i) + " likelihood outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw StructuralError("leaf " + std::to_string(i) + " likelihoods do not sum to 1");
    }
  }

  std::vector<TreeNode> nodes_;
  std::uint16_t root_ = 0;
  std::size_t depth_ = 0;
};

inline const LikelihoodVector& tree_eval(const LikelihoodTree& tree, const FeatureVector& f) {
  return tree.nodes()[tree.route(f)].likelihoods;
}

struct TrainOptions {
  std::size_t max_depth = kMaxTreeDepth;
  std::size_t min_leaf = 8;
};

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const TrainingSample> samples, const TrainOptions& opt)
      : samples_(samples), opt_(opt) {}

  std::uint16_t build(std::vector<std::uint32_t> idx, std::size_t depth) {
    const ClassCounts counts = count_classes(samples_, idx);
    const auto self = static_cast<std::uint16_t>(nodes_.size());
    nodes_.push_back(TreeNode::leaf(laplace_likelihoods(counts)));
    if (depth >= opt_.max_depth || idx.size() < 2 * opt_.min_leaf) return self;
    const auto split = detail::best_split(samples_, idx);
    if (!split) return self;

    std::vector<std::uint32_t> left, right;
    const auto f = static_cast<std::size_t>(split->feature);
    for (auto i : idx) (samples_[i].x[f] < split->threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    const std::uint16_t l = build(std::move(left), depth + 1);
    const std::uint16_t r = build(std::move(right), depth + 1);
    nodes_[self] = TreeNode::internal(split->feature, split->threshold, l, r, nodes_[self].likelihoods);
    return self;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

 private:
  std::span<const TrainingSample> samples_;
  TrainOptions opt_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

// Greedy recursive CART with the Gini criterion. A node is split while its
// depth is below max_depth, it holds at least 2 * min_leaf samples and some
// split strictly lowers the impurity. Leaves carry Laplace-smoothed class
// frequencies.
inline LikelihoodTree train_tree(std::span<const TrainingSample> samples,
                                 const TrainOptions& opt = {}) {
  if (samples.empty()) throw InvalidInput("train_tree: empty training set");
  if (opt.max_depth > kMaxTreeDepth) throw InvalidInput("train_tree: max_depth exceeds 7");
  std::vector<std::uint32_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0u);
  detail::TreeBuilder builder(samples, opt);
  const std::uint16_t root = builder.build(std::move(idx), 0);
  return LikelihoodTree(builder.take(), root);
}

// Most likely class of a likelihood vector; ties go to the lower index.
inline ActivityClass argmax_class(const LikelihoodVector& v) {
  return class_from_index(static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()));
}

inline double training_accuracy(const LikelihoodTree& tree, std::span<const TrainingSample> samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) {
    const auto& node = tree.nodes()[tree.route(s)];
    if (argmax_class(node.likelihoods) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace pact
