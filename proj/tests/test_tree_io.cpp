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
using Bytes = std::vector<std::uint8_t>;

namespace {

void fix_crc(Bytes& b) {
  const std::uint32_t c = crc32(std::span(b).first(b.size() - 4));
  for (int i = 0; i < 4; ++i) b[b.size() - 4 + i] = static_cast<std::uint8_t>(c >> (8 * i));
}

ParseErrc code_of(const Bytes& b) {
  try {
    deserialize_tree(b);
  } catch (const ParseError& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ParseErrc::kTruncated;
}

void put16(Bytes& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v);
  b[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

LikelihoodTree stump() {
  return LikelihoodTree({TreeNode::internal(Feature::kRhythmicity, 0.625, 1, 2, {0.2, 0.2, 0.2, 0.2, 0.2}),
                         TreeNode::leaf({0.5, 0.125, 0.125, 0.125, 0.125}),
                         TreeNode::leaf({0.0625, 0.75, 0.0625, 0.0625, 0.0625})},
                        0);
}

}  // namespace

TEST_CASE("single leaf file is header, count/root, one record and the checksum") {
  const Bytes b = serialize_tree(LikelihoodTree({TreeNode::leaf({0.2, 0.2, 0.2, 0.2, 0.2})}, 0));
  CHECK(b.size() == 8 + 4 + 20 + 4);
  CHECK(b.size() == tree_file_size(1));
  CHECK(b[0] == 'P');
  CHECK(b[3] == 'T');
  CHECK(b[4] == 1);
  CHECK(b[6] == 1);
  CHECK(b[8] == 1);
  CHECK(b[12] == 1);  // leaf kind
}

TEST_CASE("byte layout of a stump") {
  const Bytes b = serialize_tree(stump());
  REQUIRE(b.size() == tree_file_size(3));
  // Root record: internal, rhythmicity, 0.625 in Q16.16 = 0xA000, children 1 and 2.
  CHECK(b[12] == 0);
  CHECK(b[13] == 1);
  CHECK(b[14] == 0x00);
  CHECK(b[15] == 0xA0);
  CHECK(b[16] == 0);
  CHECK(b[17] == 0);
  CHECK(b[18] == 1);
  CHECK(b[20] == 2);
  // Second record, first likelihood: 0.5 -> 16384.
  CHECK(b[32 + 10] == 0x00);
  CHECK(b[32 + 11] == 0x40);
  const std::uint32_t crc = crc32(std::span(b).first(b.size() - 4));
  CHECK(b[b.size() - 4] == (crc & 0xFF));
  CHECK(b[b.size() - 1] == crc >> 24);
  CHECK(deserialize_tree(b) == quantize_tree(stump()));
}

TEST_CASE("likelihood quantization sums to one exactly") {
  Rng rng(31);
  for (int k = 0; k < 20000; ++k) {
    LikelihoodVector v = test::random_likelihoods(rng);
    if (k % 4 == 0) v = {1.0, 0.0, 0.0, 0.0, 0.0};
    const auto q = quantize_likelihoods(v);
    std::uint32_t sum = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      REQUIRE(q[c] >= 1);
      REQUIRE(std::abs(q[c] / 32768.0 - v[c]) <= 5.0 / 32768.0);
      sum += q[c];
    }
    REQUIRE(sum == 32768);
  }
}

TEST_CASE("round trip of random trees") {
  Rng rng(32);
  for (int k = 0; k < 200; ++k) {
    const LikelihoodTree t = test::random_tree(rng, 1 + rng.next() % kMaxTreeDepth);
    const Bytes b = serialize_tree(t);
    const LikelihoodTree back = deserialize_tree(b);
    REQUIRE(back.size() == t.size());
    REQUIRE(back.root() == t.root());
    REQUIRE(back.depth() == t.depth());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const TreeNode& a = t.nodes()[i];
      const TreeNode& c = back.nodes()[i];
      REQUIRE(a.kind == c.kind);
      if (!a.is_leaf()) {
        REQUIRE(a.feature == c.feature);
        REQUIRE(a.left == c.left);
        REQUIRE(a.right == c.right);
        REQUIRE(std::abs(a.threshold - c.threshold) <= 0x1p-17);
      }
      for (std::size_t j = 0; j < kNumClasses; ++j) REQUIRE(std::abs(a.likelihoods[j] - c.likelihoods[j]) <= 5.0 / 32768.0);
    }
    // Quantized trees round-trip exactly.
    REQUIRE(serialize_tree(back) == b);
    REQUIRE(deserialize_tree(serialize_tree(back)) == back);
  }
}

TEST_CASE("distinct errors for each failure mode") {
  const Bytes good = serialize_tree(stump());

  CHECK(code_of(Bytes(good.begin(), good.begin() + 10)) == ParseErrc::kTruncated);
  CHECK(code_of(Bytes(good.begin(), good.end() - 1)) == ParseErrc::kTruncated);
  Bytes extra = good;
  extra.push_back(0);
  CHECK(code_of(extra) == ParseErrc::kTrailingBytes);

  Bytes b = good;
  b[0] = 'X';
  CHECK(code_of(b) == ParseErrc::kBadMagic);

  b = good;
  put16(b, 4, 2);
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kVersionMismatch);

  b = good;
  put16(b, 6, 0);
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kUnsupportedFlags);

  b = good;
  b[20] ^= 0x01;
  CHECK(code_of(b) == ParseErrc::kChecksumMismatch);

  b = good;
  put16(b, 10, 3);
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kBoundsViolation);

  b = good;
  put16(b, 12 + 8, 9);  // right child of the root
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kBoundsViolation);

  b = good;
  b[13] = 3;  // feature id
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kBoundsViolation);

  b = good;
  put16(b, 32 + 10, 20000);
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kBadLikelihoods);

  b = good;
  put16(b, 12 + 8, 0);  // root points at itself
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kMalformedTree);

  b = good;
  b[32] = 7;  // node kind
  fix_crc(b);
  CHECK(code_of(b) == ParseErrc::kMalformedTree);

  b = good;
  put16(b, 8, 0);
  CHECK(code_of(b) == ParseErrc::kBoundsViolation);
}

TEST_CASE("random bytes and mutated files never escape as anything but parse errors") {
  Rng rng(33);
  const Bytes good = serialize_tree(test::random_tree(rng, 5));
  for (int k = 0; k < 20000; ++k) {
    Bytes b;
    if (k % 2 == 0) {
      b.resize(rng.next() % 300);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng.next());
      if (k % 4 == 0 && b.size() >= 4) std::copy(kTreeMagic.begin(), kTreeMagic.end(), b.begin());
    } else {
      b = good;
      const int flips = 1 + static_cast<int>(rng.next() % 4);
      for (int f = 0; f < flips; ++f) b[rng.next() % (b.size() - 4)] = static_cast<std::uint8_t>(rng.next());
      fix_crc(b);
    }
    try {
      const LikelihoodTree t = deserialize_tree(b);
      REQUIRE(t.depth() <= kMaxTreeDepth);
      tree_eval(t, {rng.uniform(), rng.uniform(), rng.uniform(), std::nullopt});
    } catch (const ParseError&) {
    }
  }
}
