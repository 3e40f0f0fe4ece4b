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

#include "labeldebate/catcot.hpp"
#include "labeldebate/confidence.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace labeldebate {

struct SamplingParams {
  double temperature = 0.7;
  int top_k = 20;  // 0 disables
  double top_p = 0.8;
  int max_tokens = 2048;
  bool want_logprobs = false;

  void validate() const;
};

enum class BackendKind { kRemote, kScripted, kSimulator };

const char* to_string(BackendKind kind) noexcept;

struct AgentHandle {
  std::string agent_id;
  std::string display_name;
  BackendKind backend = BackendKind::kScripted;
  SamplingParams params;
};

enum class FinishReason { kStop, kLength, kOther };

struct GenerationResult {
  std::string text;
  std::optional<std::vector<TokenDistribution>> token_distributions;
  FinishReason finish_reason = FinishReason::kStop;
  std::vector<std::string> warnings;
};

/// Identifies one generation call within a run. Scripted fixtures and the
/// simulator key their output on it, which keeps results independent of
/// scheduling.
struct GenerationRequest {
  std::string post_id;
  std::string stage;  // "r0", "r1", ..., "judge", "sc", "downstream"
  int index = 0;      // 0 = primary generation, i >= 1 = i-th sample
  int attempt = 0;    // parse retries

  // "<post>/<stage>" or "<post>/<stage>/s<index>".
  std::string stage_key() const;
};

/// Text-in/text-out generation backend. Implementations must accept
/// concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual GenerationResult generate(const AgentHandle& agent, const PromptBundle& prompt,
                                    const SamplingParams& params,
                                    const GenerationRequest& request) = 0;

  virtual bool supports_logprobs() const = 0;
};

struct Agent {
  AgentHandle handle;
  std::shared_ptr<Backend> backend;

  const std::string& id() const noexcept { return handle.agent_id; }
};

/// One completion. Adds a capability warning when logprobs were requested
/// from a backend that cannot provide them.
GenerationResult generate(const Agent& agent, const PromptBundle& prompt,
                          const SamplingParams& params, const GenerationRequest& request);

/// n independent completions with request indices 1..n, returned in index
/// order. Throws PartialFailureError naming the failed positions.
std::vector<GenerationResult> generate_samples(const Agent& agent, const PromptBundle& prompt,
                                               int n, const SamplingParams& params,
                                               const GenerationRequest& base);

}  // namespace labeldebate
