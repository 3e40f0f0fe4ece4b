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

#include "labeldebate/agents.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <mutex>
#include <optional>
#include <string>

namespace labeldebate {

enum class TopKMode { kAuto, kSend, kOmit };

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_delay{500};
  double backoff_factor = 2.0;
};

struct RemoteBackendOptions {
  // Full chat-completions URL, e.g. http://127.0.0.1:8000/v1/chat/completions
  std::string endpoint;
  std::string model;
  std::string api_key;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{120000};
  TopKMode top_k_mode = TopKMode::kAuto;
  int top_logprobs = 5;
  bool logprobs_supported = true;
};

/// Client for an OpenAI-compatible chat-completions server.
class RemoteChatBackend final : public Backend {
 public:
  explicit RemoteChatBackend(RemoteBackendOptions options);

  GenerationResult generate(const AgentHandle& agent, const PromptBundle& prompt,
                            const SamplingParams& params,
                            const GenerationRequest& request) override;

  bool supports_logprobs() const override { return options_.logprobs_supported; }

  // Request body for one completion; messages are copied byte-for-byte.
  nlohmann::json build_request(const PromptBundle& prompt, const SamplingParams& params,
                               bool include_top_k) const;
  static GenerationResult parse_reply(const nlohmann::json& body, bool want_logprobs);

  // Sends a one-token request carrying top_k and records whether the server
  // accepted it. Called lazily in kAuto mode.
  bool probe_top_k(int top_k);
  std::optional<bool> top_k_supported() const;

 private:
  bool include_top_k(const SamplingParams& params);

  RemoteBackendOptions options_;
  mutable std::mutex probe_mutex_;
  std::optional<bool> top_k_supported_;
};

}  // namespace labeldebate
