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

template <typename Fn>
ParseError error_of(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError(ParseErrc::kTruncated, "");
}

}  // namespace

TEST_CASE("sample CSV with and without header") {
  const SampleStream a = read_samples_csv("sample_index,ax_g,ay_g,az_g\n0,0,0,1\n1,0.5,-0.25,7.99609375\n");
  REQUIRE(a.samples.size() == 2);
  CHECK(a.first_index == 0);
  CHECK(a.samples[0] == RawSample{0, 0, 256});
  CHECK(a.samples[1] == RawSample{128, -64, 2047});

  const SampleStream b = read_samples_csv("5, 0, 0, -8\r\n6,0,0,0\n\n");
  CHECK(b.first_index == 5);
  CHECK(b.samples[0].z == -2048);
  CHECK(read_samples_csv("").samples.empty());
  CHECK(read_samples_csv("sample_index,ax_g,ay_g,az_g\n").samples.empty());
}

TEST_CASE("sample CSV errors carry the line number") {
  auto e = error_of([] { read_samples_csv("0,0,0,1\n1,0,0\n"); });
  CHECK(e.code() == ParseErrc::kBadField);
  CHECK(e.line() == 2);
  e = error_of([] { read_samples_csv("0,0,0,1\n1,0,0,1,5\n"); });
  CHECK(e.code() == ParseErrc::kBadField);
  e = error_of([] { read_samples_csv("0,0,0,1\n\n1,0,x,1\n"); });
  CHECK(e.code() == ParseErrc::kBadField);
  CHECK(e.line() == 3);
  e = error_of([] { read_samples_csv("0,0,0,1\n2,0,0,1\n"); });
  CHECK(e.code() == ParseErrc::kNonSequentialIndex);
  CHECK(e.line() == 2);
  e = error_of([] { read_samples_csv("0,8.0,0,1\n"); });
  CHECK(e.code() == ParseErrc::kOutOfRange);
  CHECK(e.line() == 1);
  e = error_of([] { read_samples_csv("-1,0,0,1\n"); });
  CHECK(e.code() == ParseErrc::kBadField);
  e = error_of([] { read_samples_csv("0,nan,0,1\n"); });
  CHECK(e.line() == 1);
}

TEST_CASE("sample CSV round trip is exact") {
  Rng rng(61);
  std::vector<RawSample> s(5000);
  for (auto& x : s) x = test::random_raw(rng);
  const std::string text = write_samples_csv(s, 17);
  const SampleStream back = read_samples_csv(text);
  CHECK(back.first_index == 17);
  CHECK(back.samples == s);
}

TEST_CASE("raw binary round trip and layout") {
  const std::vector<RawSample> s = {{1, -1, 2047}, {-2048, 0, 256}};
  const auto b = write_samples_raw(s);
  REQUIRE(b.size() == 12);
  CHECK(b[0] == 1);
  CHECK(b[1] == 0);
  CHECK(b[2] == 0xFF);
  CHECK(b[3] == 0xFF);
  CHECK(b[4] == 0xFF);
  CHECK(b[5] == 0x07);
  CHECK(read_samples_raw(b) == s);
  CHECK(read_samples_raw({}).empty());
}

TEST_CASE("raw binary errors") {
  CHECK(error_of([] { read_samples_raw(std::vector<std::uint8_t>(7)); }).code() == ParseErrc::kTruncated);
  const std::vector<std::uint8_t> high = {0, 0, 0, 0x08, 0, 0};  // 2048
  CHECK(error_of([&] { read_samples_raw(high); }).code() == ParseErrc::kOutOfRange);
}

TEST_CASE("label CSV") {
  const LabelStream l = read_labels_csv("sample_index,label\n0,Rest\n1,-\n2,3\n3,XcSkiing\n4,XC\n5,Housework\n6,\n");
  REQUIRE(l.labels.size() == 7);
  CHECK(l.labels[0] == GroundTruth::kRest);
  CHECK(l.labels[1] == GroundTruth::kUnlabeled);
  CHECK(l.labels[2] == GroundTruth::kBike);
  CHECK(l.labels[3] == GroundTruth::kXcSkiing);
  CHECK(l.labels[4] == GroundTruth::kXcSkiing);
  CHECK(l.labels[5] == GroundTruth::kHousework);
  CHECK(l.labels[6] == GroundTruth::kUnlabeled);
  const auto e = error_of([] { read_labels_csv("0,Rest\n1,Swim\n"); });
  CHECK(e.code() == ParseErrc::kBadField);
  CHECK(e.line() == 2);

  std::vector<GroundTruth> all;
  for (int i = -1; i < static_cast<int>(kNumTruthLabels); ++i) all.push_back(static_cast<GroundTruth>(i));
  CHECK(read_labels_csv(write_labels_csv(all)).labels == all);
}

TEST_CASE("decision and feature rows") {
  std::string out;
  append_decision_row(out, 3, {{ActivityClass::kWalk, 0.75}, {0.1, 0.75, 0.0, 0.125, 0.2}});
  CHECK(out == "3,Walk,0.750000,0.100000,0.750000,0.000000,0.125000,0.200000\n");
  out.clear();
  append_feature_row(out, 0, {0.125, 1.0, 0.5, 16});
  append_feature_row(out, 1, {});
  CHECK(out == "0,0.125000,1.000000,0.500000,16\n1,0.000000,0.000000,0.000000,none\n");
}

TEST_CASE("text parsers only ever throw parse errors on random input") {
  Rng rng(62);
  const std::string alphabet = "0123456789,.-+eE \n\r\tnaXRestWalk";
  for (int k = 0; k < 30000; ++k) {
    std::string s(rng.next() % 120, ' ');
    for (char& c : s) c = k % 2 ? static_cast<char>(rng.next()) : alphabet[rng.next() % alphabet.size()];
    try {
      read_samples_csv(s);
    } catch (const ParseError&) {
    }
    try {
      read_labels_csv(s);
    } catch (const ParseError&) {
    }
    std::vector<std::uint8_t> b(s.begin(), s.end());
    try {
      for (const auto& r : read_samples_raw(b)) REQUIRE(is_valid(r));
    } catch (const ParseError&) {
    }
  }
}
