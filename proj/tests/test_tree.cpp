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

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace pact;
using pact::test::Rng;

namespace {

TrainingSample sample(double power, double rhythm, double stab, ActivityClass c) {
  return {{power, rhythm, stab}, c};
}

// Constraint list of every root-to-leaf path.
struct Constraint {
  Feature f;
  double t;
  bool less;
};
struct Path {
  std::vector<Constraint> cs;
  std::uint16_t leaf;
};

void enumerate(const LikelihoodTree& t, std::uint16_t i, std::vector<Constraint>& cur, std::vector<Path>& out) {
  const TreeNode& n = t.nodes()[i];
  if (n.is_leaf()) {
    out.push_back({cur, i});
    return;
  }
  cur.push_back({n.feature, n.threshold, true});
  enumerate(t, n.left, cur, out);
  cur.back().less = false;
  enumerate(t, n.right, cur, out);
  cur.pop_back();
}

std::uint16_t path_oracle(const std::vector<Path>& paths, const FeatureVector& f) {
  std::optional<std::uint16_t> hit;
  for (const auto& p : paths) {
    const bool ok = std::all_of(p.cs.begin(), p.cs.end(), [&](const Constraint& c) { return (f[c.f] < c.t) == c.less; });
    if (ok) {
      REQUIRE_FALSE(hit);
      hit = p.leaf;
    }
  }
  REQUIRE(hit);
  return *hit;
}

// Checks that every internal node of a trained tree strictly lowers the
// impurity of the training samples that reach it.
void check_splits_decrease_gini(const LikelihoodTree& tree, const TrainingSet& set) {
  std::vector<ClassCounts> reach(tree.size());
  for (const auto& s : set) {
    std::size_t i = tree.root();
    for (;;) {
      ++reach[i][index(s.label)];
      const TreeNode& n = tree.nodes()[i];
      if (n.is_leaf()) break;
      i = s[n.feature] < n.threshold ? n.left : n.right;
    }
  }
  auto total = [](const ClassCounts& c) { return static_cast<double>(std::accumulate(c.begin(), c.end(), std::uint64_t{0})); };
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.nodes()[i];
    if (n.is_leaf()) {
      double sum = 0.0;
      for (double p : n.likelihoods) sum += p;
      REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
      continue;
    }
    const double np = total(reach[i]), nl = total(reach[n.left]), nr = total(reach[n.right]);
    REQUIRE(nl > 0);
    REQUIRE(nr > 0);
    const double dg = test::gini_oracle(reach[i]) - nl / np * test::gini_oracle(reach[n.left]) -
                      nr / np * test::gini_oracle(reach[n.right]);
    REQUIRE(dg > 0.0);
  }
}

}  // namespace

TEST_CASE("gini unit values are exact") {
  CHECK(gini_impurity({10, 0, 0, 0, 0}) == 0.0);
  CHECK(gini_impurity({5, 5, 0, 0, 0}) == 0.5);
  CHECK(gini_impurity({2, 2, 2, 2, 2}) == 0.8);
  CHECK_THROWS_AS(gini_impurity({0, 0, 0, 0, 0}), InvalidInput);
}

TEST_CASE("gini stays in [0, 0.8] and is zero only for pure counts") {
  Rng rng(21);
  for (int k = 0; k < 10000; ++k) {
    ClassCounts c{};
    for (auto& v : c) v = rng.next() % (k % 3 == 0 ? 2 : 50);
    if (std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == 0) c[rng.next() % 5] = 1;
    const double g = gini_impurity(c);
    const auto nonzero = std::count_if(c.begin(), c.end(), [](auto v) { return v > 0; });
    REQUIRE(g >= 0.0);
    REQUIRE(g <= 0.8);
    REQUIRE((g == 0.0) == (nonzero == 1));
    REQUIRE(g == Catch::Approx(test::gini_oracle(c)).margin(1e-15));
  }
}

TEST_CASE("best split of a separable pair") {
  const TrainingSet s = {sample(0.1, 0, 0, ActivityClass::kRest), sample(0.9, 0, 0, ActivityClass::kWalk)};
  const auto split = best_split(s);
  REQUIRE(split);
  CHECK(split->feature == Feature::kPower);
  CHECK(split->threshold == 0.5);
  CHECK(split->gain == 0.5);
}

TEST_CASE("best split returns none without candidates or gain") {
  TrainingSet same(6, sample(0.3, 0.4, 0.5, ActivityClass::kRest));
  for (std::size_t i = 0; i < same.size(); i += 2) same[i].label = ActivityClass::kRun;
  CHECK_FALSE(best_split(same));
  const TrainingSet pure = {sample(0.1, 0, 0, ActivityClass::kBike), sample(0.9, 1, 1, ActivityClass::kBike)};
  CHECK_FALSE(best_split(pure));
  CHECK_FALSE(best_split(TrainingSet{sample(0.1, 0, 0, ActivityClass::kBike)}));
}

TEST_CASE("best split ties go to the lower feature, then the lower threshold") {
  // Power and rhythmicity separate equally well.
  const TrainingSet s = {sample(0.1, 0.1, 0, ActivityClass::kRest), sample(0.9, 0.9, 0, ActivityClass::kWalk)};
  CHECK(best_split(s)->feature == Feature::kPower);
  // Two equally good power thresholds.
  const TrainingSet t = {sample(0.0, 0, 0, ActivityClass::kRest), sample(1.0, 0, 0, ActivityClass::kWalk),
                         sample(2.0, 0, 0, ActivityClass::kRest), sample(3.0, 0, 0, ActivityClass::kWalk)};
  const auto split = best_split(t);
  REQUIRE(split);
  CHECK(split->threshold == test::best_split_oracle(t)->threshold);
}

TEST_CASE("best split matches a brute-force scan") {
  Rng rng(22);
  for (int k = 0; k < 2000; ++k) {
    const TrainingSet s = test::random_training_set(rng, 2 + rng.next() % 11, 2 + rng.next() % 4);
    const auto got = best_split(s);
    const auto want = test::best_split_oracle(s);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    REQUIRE(got->feature == want->feature);
    REQUIRE(got->threshold == want->threshold);
    REQUIRE(got->gain == Catch::Approx(want->gain).margin(1e-12));
  }
}

TEST_CASE("pure training set gives one Laplace leaf") {
  const std::size_t n = 40;
  const TrainingSet s(n, sample(0.2, 0.3, 0.4, ActivityClass::kRun));
  const LikelihoodTree t = train_tree(s);
  REQUIRE(t.size() == 1);
  CHECK(t.nodes()[0].likelihoods[index(ActivityClass::kRun)] == Catch::Approx((n + 1.0) / (n + 5.0)));
  CHECK(t.nodes()[0].likelihoods[index(ActivityClass::kRest)] == Catch::Approx(1.0 / (n + 5.0)));
  CHECK_THROWS_AS(train_tree(TrainingSet{}), InvalidInput);
}

TEST_CASE("separable 1-D set trains a depth-1 tree") {
  TrainingSet s;
  for (int i = 0; i < 20; ++i) s.push_back(sample(0.1, 0, 0, ActivityClass::kRest));
  for (int i = 0; i < 20; ++i) s.push_back(sample(0.9, 0, 0, ActivityClass::kWalk));
  const LikelihoodTree t = train_tree(s);
  CHECK(t.depth() == 1);
  CHECK(t.leaf_count() == 2);
  const TreeNode& root = t.nodes()[t.root()];
  CHECK(root.threshold == 0.5);
  CHECK(argmax_class(t.nodes()[root.left].likelihoods) == ActivityClass::kRest);
  CHECK(argmax_class(t.nodes()[root.right].likelihoods) == ActivityClass::kWalk);
  CHECK(t.nodes()[root.left].likelihoods[0] == Catch::Approx(21.0 / 25.0));
  CHECK(training_accuracy(t, s) == 1.0);
}

TEST_CASE("XOR layout needs two levels") {
  TrainingSet s;
  for (int i = 0; i < 12; ++i) s.push_back(sample(0.1, 0.1, 0, ActivityClass::kRest));
  for (int i = 0; i < 8; ++i) s.push_back(sample(0.9, 0.9, 0, ActivityClass::kRest));
  for (int i = 0; i < 10; ++i) s.push_back(sample(0.1, 0.9, 0, ActivityClass::kWalk));
  for (int i = 0; i < 10; ++i) s.push_back(sample(0.9, 0.1, 0, ActivityClass::kWalk));
  const LikelihoodTree t = train_tree(s);
  CHECK(t.depth() == 2);
  CHECK(training_accuracy(t, s) == 1.0);
}

TEST_CASE("max_depth and min_leaf are honoured") {
  Rng rng(23);
  const TrainingSet s = test::random_training_set(rng, 3000);
  for (std::size_t d = 0; d <= kMaxTreeDepth; ++d) CHECK(train_tree(s, {d, 1}).depth() <= d);
  CHECK(train_tree(s, {7, 2000}).size() == 1);
  CHECK_THROWS_AS(train_tree(s, {8, 1}), InvalidInput);
}

TEST_CASE("trained trees: depth bound, strict gain per split, normalized leaves") {
  Rng rng(24);
  for (int k = 0; k < 60; ++k) {
    TrainingSet s = test::random_training_set(rng, 50 + rng.next() % 2000);
    for (auto& x : s) x.x[rng.next() % 3] += rng.uniform(0.0, 0.1);
    const LikelihoodTree t = train_tree(s, {kMaxTreeDepth, 1 + rng.next() % 10});
    REQUIRE(t.depth() <= kMaxTreeDepth);
    check_splits_decrease_gini(t, s);
  }
}

TEST_CASE("trained tree is at least as accurate as its best single split") {
  Rng rng(25);
  for (int k = 0; k < 300; ++k) {
    TrainingSet s = test::random_training_set(rng, 1 + rng.next() % 200, 2 + rng.next() % 4);
    const TrainOptions opt{kMaxTreeDepth, 1 + rng.next() % 8};
    const double full = training_accuracy(train_tree(s, opt), s);
    const double stump = training_accuracy(train_tree(s, {1, opt.min_leaf}), s);
    REQUIRE(full >= stump);
  }
}

TEST_CASE("training is independent of input order") {
  Rng rng(26);
  TrainingSet s = test::random_training_set(rng, 800);
  const LikelihoodTree a = train_tree(s);
  for (std::size_t i = s.size() - 1; i > 0; --i) std::swap(s[i], s[rng.next() % (i + 1)]);
  CHECK(train_tree(s) == a);
}

TEST_CASE("tree_eval routing rule") {
  const LikelihoodVector v{0.1, 0.2, 0.3, 0.2, 0.2};
  const LikelihoodTree single({TreeNode::leaf(v)}, 0);
  Rng rng(27);
  for (int k = 0; k < 100; ++k) {
    CHECK(tree_eval(single, {rng.uniform(), rng.uniform(), rng.uniform(), std::nullopt}) == v);
  }

  const LikelihoodVector l{0.6, 0.1, 0.1, 0.1, 0.1}, r{0.1, 0.6, 0.1, 0.1, 0.1};
  const LikelihoodTree stump(
      {TreeNode::internal(Feature::kPower, 0.5, 1, 2, v), TreeNode::leaf(l), TreeNode::leaf(r)}, 0);
  CHECK(tree_eval(stump, {0.2, 0, 0, std::nullopt}) == l);
  CHECK(tree_eval(stump, {0.5, 0, 0, std::nullopt}) == r);
  CHECK(tree_eval(stump, {0.9, 0, 0, std::nullopt}) == r);
}

TEST_CASE("tree_eval equals path enumeration on random depth-7 trees") {
  Rng rng(28);
  for (int t = 0; t < 20; ++t) {
    const LikelihoodTree tree = test::random_tree(rng);
    std::vector<Path> paths;
    std::vector<Constraint> cur;
    enumerate(tree, tree.root(), cur, paths);
    for (int k = 0; k < 1000; ++k) {
      const FeatureVector f{rng.uniform(), rng.uniform(), rng.uniform(), std::nullopt};
      REQUIRE(tree.route(f) == path_oracle(paths, f));
      REQUIRE(&tree_eval(tree, f) == &tree.nodes()[path_oracle(paths, f)].likelihoods);
    }
  }
}

TEST_CASE("malformed trees are rejected with structural errors") {
  const LikelihoodVector v{0.2, 0.2, 0.2, 0.2, 0.2};
  const auto leaf = TreeNode::leaf(v);
  CHECK_THROWS_AS(LikelihoodTree({}, 0), StructuralError);
  CHECK_THROWS_AS(LikelihoodTree({leaf}, 1), StructuralError);
  CHECK_THROWS_AS(LikelihoodTree({TreeNode::internal(Feature::kPower, 0.5, 1, 5, v), leaf}, 0), StructuralError);
  CHECK_THROWS_AS(LikelihoodTree({TreeNode::internal(Feature::kPower, 0.5, 0, 1, v), leaf}, 0), StructuralError);
  CHECK_THROWS_AS(LikelihoodTree({TreeNode::internal(Feature::kPower, 0.5, 1, 1, v), leaf}, 0), StructuralError);
  CHECK_THROWS_AS(LikelihoodTree({leaf, leaf}, 0), StructuralError);
  CHECK_THROWS_AS(LikelihoodTree({TreeNode::leaf({0.5, 0.5, 0.5, 0, 0})}, 0), StructuralError);
  CHECK_THROWS_AS(LikelihoodTree({TreeNode::leaf({1.5, -0.5, 0, 0, 0})}, 0), StructuralError);
  CHECK_THROWS_AS(
      LikelihoodTree({TreeNode::internal(Feature::kPower, std::nan(""), 1, 2, v), leaf, leaf}, 0), StructuralError);

  // A chain of depth 8.
  std::vector<TreeNode> chain;
  for (std::uint16_t i = 0; i < 8; ++i) {
    chain.push_back(TreeNode::internal(Feature::kPower, 0.5, static_cast<std::uint16_t>(2 * i + 1),
                                       static_cast<std::uint16_t>(2 * i + 2), v));
    chain.push_back(leaf);
  }
  chain.back() = leaf;
  chain.push_back(leaf);
  CHECK_THROWS_AS(LikelihoodTree(chain, 0), StructuralError);
  chain.resize(15);
  chain[14] = leaf;
  CHECK(LikelihoodTree(chain, 0).depth() == 7);

  // The evaluator guards its own walk.
  const auto bad = LikelihoodTree::unchecked({TreeNode::internal(Feature::kPower, 0.5, 7, 7, v)}, 0);
  CHECK_THROWS_AS(tree_eval(bad, {}), StructuralError);
  const auto loop = LikelihoodTree::unchecked({TreeNode::internal(Feature::kPower, 0.5, 0, 0, v)}, 0);
  CHECK_THROWS_AS(tree_eval(loop, {}), StructuralError);
}
