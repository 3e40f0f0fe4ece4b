// Copyright 2026 The labeldebate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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
#include <vector>

namespace labeldebate {

enum class ErrorCode {
  kInvalidArgument,
  // domain
  kDuplicateName,
  kEmptyList,
  kEmptyName,
  kMalformedRecord,
  kUnknownLabel,
  kDuplicateId,
  // catcot
  kMissingBlock,
  kMissingCategory,
  kVerdictParse,
  kConfidenceParse,
  kMissingConfidence,
  // confidence
  kOutOfDomain,
  kEmptyComponent,
  kEmptySequence,
  kCategoryMismatch,
  kScorerFailure,
  // agents
  kTransport,
  kBackendRefusal,
  kTimeout,
  kPartialFailure,
  kFixtureExhausted,
  // debate
  kPrecondition,
  kAnnotationFailed,
  // metrics
  kKeyMismatch,
  kLengthMismatch,
  kInconsistentRows,
  kDegenerate,
  // enrichment
  kPayloadMismatch,
  kMissingAnswer,
  kOutOfRange,
  kNonInteger,
  kInvalidLetter,
  kCoverage,
  // plumbing
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  // True for failures a caller may retry (transport, timeout).
  bool retryable() const noexcept;

 private:
  ErrorCode code_;
};

// Malformed input record; `line` is 1-based.
class RecordError : public Error {
 public:
  RecordError(ErrorCode code, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised by generate_samples when some of the requested completions failed.
class PartialFailureError : public Error {
 public:
  PartialFailureError(std::vector<std::size_t> failed_indices,
                      std::vector<std::string> messages);

  const std::vector<std::size_t>& failed_indices() const noexcept {
    return failed_indices_;
  }
  const std::vector<std::string>& messages() const noexcept {
    return messages_;
  }

 private:
  std::vector<std::size_t> failed_indices_;
  std::vector<std::string> messages_;
};

}  // namespace labeldebate
