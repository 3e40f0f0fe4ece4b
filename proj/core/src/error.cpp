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

#include "labeldebate/error.hpp"

#include <fmt/format.h>

#include <utility>

namespace labeldebate {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDuplicateName: return "duplicate-name";
    case ErrorCode::kEmptyList: return "empty-list";
    case ErrorCode::kEmptyName: return "empty-name";
    case ErrorCode::kMalformedRecord: return "malformed-record";
    case ErrorCode::kUnknownLabel: return "unknown-label";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kMissingBlock: return "missing-block";
    case ErrorCode::kMissingCategory: return "missing-category";
    case ErrorCode::kVerdictParse: return "verdict-parse";
    case ErrorCode::kConfidenceParse: return "confidence-parse";
    case ErrorCode::kMissingConfidence: return "missing-confidence";
    case ErrorCode::kOutOfDomain: return "out-of-domain";
    case ErrorCode::kEmptyComponent: return "empty-component";
    case ErrorCode::kEmptySequence: return "empty-sequence";
    case ErrorCode::kCategoryMismatch: return "category-mismatch";
    case ErrorCode::kScorerFailure: return "scorer-failure";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kBackendRefusal: return "backend-refusal";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kPartialFailure: return "partial-failure";
    case ErrorCode::kFixtureExhausted: return "fixture-exhausted";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kAnnotationFailed: return "annotation-failed";
    case ErrorCode::kKeyMismatch: return "key-mismatch";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kInconsistentRows: return "inconsistent-row-sum";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kPayloadMismatch: return "payload-mismatch";
    case ErrorCode::kMissingAnswer: return "missing-answer";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kNonInteger: return "non-integer";
    case ErrorCode::kInvalidLetter: return "invalid-letter";
    case ErrorCode::kCoverage: return "coverage";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)),
      code_(code) {}

bool Error::retryable() const noexcept {
  return code_ == ErrorCode::kTransport || code_ == ErrorCode::kTimeout;
}

RecordError::RecordError(ErrorCode code, std::size_t line,
                         const std::string& message)
    : Error(code, fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {

std::string describe_partial(const std::vector<std::size_t>& indices) {
  std::string out = "failed sample indices:";
  for (auto i : indices) out += fmt::format(" {}", i);
  return out;
}

}  // namespace

PartialFailureError::PartialFailureError(std::vector<std::size_t> failed_indices,
                                         std::vector<std::string> messages)
    : Error(ErrorCode::kPartialFailure, describe_partial(failed_indices)),
      failed_indices_(std::move(failed_indices)),
      messages_(std::move(messages)) {}

}  // namespace labeldebate
