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
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "pact/byte_io.hpp"
#include "pact/fixed_point.hpp"
#include "pact/tree.hpp"

// Tree file layout, all little-endian:
//
//   offset  size  field
//   0       4     magic "PACT"
//   4       2     version = 1
//   6       2     flags; bit 0 set: likelihoods are Q1.15
//   8       2     node_count (1..255)
//   10      2     root_index
//   12      20*n  node records
//   ...     4     CRC-32 of every preceding byte
//
// Node record (20 bytes):
//   u8 kind (0 internal, 1 leaf), u8 feature_id, i32 threshold (Q16.16),
//   u16 left, u16 right, 5 x u16 likelihoods (Q1.15, 32768 == 1.0).
// Internal nodes store the smoothed class frequencies of their subtree.

namespace pact {

inline constexpr std::array<std::uint8_t, 4> kTreeMagic = {'P', 'A', 'C', 'T'};
inline constexpr std::uint16_t kTreeFormatVersion = 1;
inline constexpr std::uint16_t kTreeFlagQ15Likelihoods = 0x0001;
inline constexpr std::size_t kTreeHeaderBytes = 8;
inline constexpr std::size_t kTreeCountRootBytes = 4;
inline constexpr std::size_t kTreeRecordBytes = 20;
inline constexpr std::size_t kTreeCrcBytes = 4;
inline constexpr std::uint32_t kLikelihoodOne = 32768;

inline constexpr std::size_t tree_file_size(std::size_t node_count) {
  return kTreeHeaderBytes + kTreeCountRootBytes + node_count * kTreeRecordBytes + kTreeCrcBytes;
}

// Rounds a likelihood vector to Q1.15 codes summing to exactly 32768, with
// every class kept at one code or more (largest-remainder apportionment).
inline std::array<std::uint16_t, kNumClasses> quantize_likelihoods(const LikelihoodVector& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  std::array<std::int64_t, kNumClasses> q{};
  std::array<double, kNumClasses> rem{};
  std::int64_t sum = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double scaled = total > 0 ? v[c] / total * kLikelihoodOne : kLikelihoodOne / 5.0;
    q[c] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(scaled)));
    rem[c] = scaled - std::floor(scaled);
    sum += q[c];
  }
  std::array<std::size_t, kNumClasses> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable: equal remainders favor the lower class index.
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; sum < kLikelihoodOne; k = (k + 1) % kNumClasses, ++sum) ++q[order[k]];
  while (sum > kLikelihoodOne) {
    const auto it = std::max_element(q.begin(), q.end());
    --*it;
    --sum;
  }
  std::array<std::uint16_t, kNumClasses> out{};
  for (std::size_t c = 0; c < kNumClasses; ++c) out[c] = static_cast<std::uint16_t>(q[c]);
  return out;
}

inline std::vector<std::uint8_t> serialize_tree(const LikelihoodTree& tree) {
  ByteWriter w;
  for (auto b : kTreeMagic) w.u8(b);
  w.u16(kTreeFormatVersion);
  w.u16(kTreeFlagQ15Likelihoods);
  w.u16(static_cast<std::uint16_t>(tree.size()));
  w.u16(tree.root());
  for (const TreeNode& n : tree.nodes()) {
    w.u8(static_cast<std::uint8_t>(n.kind));
    if (n.is_leaf()) {
      w.u8(0);
      w.i32(0);
      w.u16(0);
      w.u16(0);
    } else {
      w.u8(static_cast<std::uint8_t>(n.feature));
      w.i32(fixed::Q16_16::from_double(n.threshold).raw);
      w.u16(n.left);
      w.u16(n.right);
    }
    for (auto q : quantize_likelihoods(n.likelihoods)) w.u16(q);
  }
  w.append_crc();
  return w.take();
}

inline LikelihoodTree deserialize_tree(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < tree_file_size(0)) {
    throw ParseError(ParseErrc::kTruncated, "tree file shorter than its fixed header");
  }
  if (!std::equal(kTreeMagic.begin(), kTreeMagic.end(), bytes.begin())) {
    throw ParseError(ParseErrc::kBadMagic, "expected \"PACT\"");
  }
  ByteReader r(bytes.subspan(4));
  if (const auto version = r.u16(); version != kTreeFormatVersion) {
    throw ParseError(ParseErrc::kVersionMismatch, "version " + std::to_string(version));
  }
  if (const auto flags = r.u16(); flags != kTreeFlagQ15Likelihoods) {
    throw ParseError(ParseErrc::kUnsupportedFlags, "flags " + std::to_string(flags));
  }
  const std::uint16_t count = r.u16();
  const std::uint16_t root = r.u16();
  if (count == 0 || count > kMaxTreeNodes) {
    throw ParseError(ParseErrc::kBoundsViolation, "node count " + std::to_string(count));
  }
  const std::size_t expected = tree_file_size(count);
  if (bytes.size() < expected) throw ParseError(ParseErrc::kTruncated, "node records cut short");
  if (bytes.size() > expected) throw ParseError(ParseErrc::kTrailingBytes, "data after checksum");
  verify_crc(bytes);
  if (root >= count) throw ParseError(ParseErrc::kBoundsViolation, "root index " + std::to_string(root));

  std::vector<TreeNode> nodes;
  nodes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string where = "node " + std::to_string(i);
    TreeNode n;
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw ParseError(ParseErrc::kMalformedTree, where + ": unknown kind");
    n.kind = static_cast<NodeKind>(kind);
    const std::uint8_t feature = r.u8();
    const std::int32_t threshold = r.i32();
    const std::uint16_t left = r.u16();
    const std::uint16_t right = r.u16();
    std::uint32_t sum = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const std::uint16_t q = r.u16();
      if (q > kLikelihoodOne) throw ParseError(ParseErrc::kBadLikelihoods, where + ": likelihood above 1");
      n.likelihoods[c] = static_cast<double>(q) / kLikelihoodOne;
      sum += q;
    }
    if (sum + 1 < kLikelihoodOne || sum > kLikelihoodOne + 1) {
      throw ParseError(ParseErrc::kBadLikelihoods, where + ": likelihoods sum to " + std::to_string(sum));
    }
    if (n.kind == NodeKind::kInternal) {
      if (feature >= kNumFeatures) throw ParseError(ParseErrc::kBoundsViolation, where + ": feature id");
      if (left >= count || right >= count) {
        throw ParseError(ParseErrc::kBoundsViolation, where + ": child index");
      }
      n.feature = static_cast<Feature>(feature);
      n.threshold = fixed::Q16_16{threshold}.to_double();
      n.left = left;
      n.right = right;
    }
    nodes.push_back(n);
  }
  try {
    return LikelihoodTree(std::move(nodes), root);
  } catch (const StructuralError& e) {
    throw ParseError(ParseErrc::kMalformedTree, e.what());
  }
}

// A tree as it reads back from its file: thresholds on the Q16.16 grid and
// likelihoods on the Q1.15 grid.
inline LikelihoodTree quantize_tree(const LikelihoodTree& tree) {
  return deserialize_tree(serialize_tree(tree));
}

// The file checksum. A CRC over the whole file, trailer included, is the same
// constant for every tree, so the body is hashed.
inline std::uint32_t tree_id(const LikelihoodTree& tree) {
  const auto b = serialize_tree(tree);
  return crc32(std::span(b).first(b.size() - 4));
}

}  // namespace pact
