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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pact {

// Base class of every error thrown by the library. The CLI maps these to
// exit code 2 ("data error").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A raw sensor word outside the 12-bit signed range.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments to a numeric routine (e.g. Gini of an empty node).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A tree whose node array does not form a valid depth-bounded binary tree.
class StructuralError : public Error {
 public:
  using Error::Error;
};

enum class ParseErrc {
  kTruncated,
  kBadMagic,
  kVersionMismatch,
  kUnsupportedFlags,
  kBoundsViolation,
  kMalformedTree,
  kBadLikelihoods,
  kChecksumMismatch,
  kTrailingBytes,
  kBadField,
  kOutOfRange,
  kNonSequentialIndex,
  kLengthMismatch,
};

inline std::string_view to_string(ParseErrc e) {
  switch (e) {
    case ParseErrc::kTruncated: return "truncated input";
    case ParseErrc::kBadMagic: return "bad magic";
    case ParseErrc::kVersionMismatch: return "version mismatch";
    case ParseErrc::kUnsupportedFlags: return "unsupported flags";
    case ParseErrc::kBoundsViolation: return "bounds violation";
    case ParseErrc::kMalformedTree: return "malformed tree";
    case ParseErrc::kBadLikelihoods: return "bad likelihoods";
    case ParseErrc::kChecksumMismatch: return "checksum mismatch";
    case ParseErrc::kTrailingBytes: return "trailing bytes";
    case ParseErrc::kBadField: return "bad field";
    case ParseErrc::kOutOfRange: return "value out of range";
    case ParseErrc::kNonSequentialIndex: return "non-sequential sample index";
    case ParseErrc::kLengthMismatch: return "length mismatch";
  }
  return "unknown parse error";
}

// Structured failure from one of the file-format readers. `line` is 1-based
// for text formats and 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(ParseErrc code, std::string detail, std::size_t line = 0)
      : Error(format(code, detail, line)), code_(code), line_(line) {}

  ParseErrc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(ParseErrc code, const std::string& detail,
                            std::size_t line) {
    std::string msg(to_string(code));
    if (line != 0) msg += " at line " + std::to_string(line);
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  ParseErrc code_;
  std::size_t line_;
};

}  // namespace pact
