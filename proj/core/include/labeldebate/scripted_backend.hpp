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

#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace labeldebate {

/// Replays queued responses keyed by (agent_id, stage_key). Each read
/// consumes one entry.
///
/// Fixture file format, either
///   {"responses": [{"agent_id", "stage_key", "text", "token_distributions"?}, ...]}
/// or the shorthand
///   {"<agent_id>": {"<stage_key>": "text" | ["text", ...]}}.
class ScriptedBackend final : public Backend {
 public:
  ScriptedBackend() = default;

  static std::shared_ptr<ScriptedBackend> from_json(const nlohmann::json& fixture);
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  void push(const std::string& agent_id, const std::string& stage_key, std::string text,
            std::optional<std::vector<TokenDistribution>> distributions = std::nullopt);

  // Returns and consumes the next queued text; fixture-exhausted otherwise.
  std::string scripted_next(const std::string& agent_id, const std::string& stage_key);

  std::size_t remaining(const std::string& agent_id, const std::string& stage_key) const;

  GenerationResult generate(const AgentHandle& agent, const PromptBundle& prompt,
                            const SamplingParams& params,
                            const GenerationRequest& request) override;

  bool supports_logprobs() const override;

 private:
  struct Entry {
    std::string text;
    std::optional<std::vector<TokenDistribution>> distributions;
  };
  Entry next_entry(const std::string& agent_id, const std::string& stage_key);

  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::deque<Entry>> queues_;
  bool has_distributions_ = false;
};

}  // namespace labeldebate
