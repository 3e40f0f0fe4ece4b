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

#include "labeldebate/confidence.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <memory>
#include <string>

namespace labeldebate {

struct NliServiceHealth {
  std::string status;
  std::string model_id;
  bool warmed = false;
};

struct RemoteScorerOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8090"
  std::size_t max_batch = 256;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds timeout{30000};
};

/// EntailmentScorer backed by the NLI HTTP service:
///   POST /entail        {premise, hypothesis}    -> {label, score, model_id}
///   POST /entail_batch  {requests: [...]}        -> {responses: [...]}
///   GET  /health                                 -> {status, model_id, warmed}
/// Thresholding stays on this side.
class RemoteEntailmentScorer final : public EntailmentScorer {
 public:
  explicit RemoteEntailmentScorer(RemoteScorerOptions options);
  ~RemoteEntailmentScorer() override;

  EntailmentVerdict score(std::string_view premise, std::string_view hypothesis) const override;
  std::vector<EntailmentVerdict> score_batch(std::span<const TextPair> pairs) const override;

  NliServiceHealth health() const;

 private:
  nlohmann::json post_json(const std::string& path, const nlohmann::json& body) const;

  RemoteScorerOptions options_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Wire helpers, exposed for contract tests.
nlohmann::json entail_request_json(std::string_view premise, std::string_view hypothesis);
EntailmentVerdict entail_response_from_json(const nlohmann::json& body);

}  // namespace labeldebate
