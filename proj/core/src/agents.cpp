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

#include "labeldebate/agents.hpp"

#include "labeldebate/error.hpp"

#include <fmt/format.h>

namespace labeldebate {

void SamplingParams::validate() const {
  if (!(temperature >= 0.0)) throw Error(ErrorCode::kConfig, "temperature must be >= 0");
  if (top_k < 0) throw Error(ErrorCode::kConfig, "top_k must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::kConfig, "top_p must be in (0, 1]");
  if (max_tokens <= 0) throw Error(ErrorCode::kConfig, "max_tokens must be positive");
}

const char* to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::kRemote: return "remote";
    case BackendKind::kScripted: return "scripted";
    case BackendKind::kSimulator: return "simulator";
  }
  return "unknown";
}

std::string GenerationRequest::stage_key() const {
  if (index == 0) return fmt::format("{}/{}", post_id, stage);
  return fmt::format("{}/{}/s{}", post_id, stage, index);
}

GenerationResult generate(const Agent& agent, const PromptBundle& prompt,
                          const SamplingParams& params, const GenerationRequest& request) {
  if (!agent.backend) {
    throw Error(ErrorCode::kConfig, fmt::format("agent '{}' has no backend", agent.id()));
  }
  auto result = agent.backend->generate(agent.handle, prompt, params, request);
  if (params.want_logprobs && !result.token_distributions) {
    result.warnings.push_back(fmt::format("agent '{}': backend returned no token probabilities",
                                          agent.id()));
  }
  return result;
}

std::vector<GenerationResult> generate_samples(const Agent& agent, const PromptBundle& prompt,
                                               int n, const SamplingParams& params,
                                               const GenerationRequest& base) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 0");
  std::vector<GenerationResult> out;
  out.reserve(static_cast<std::size_t>(n));
  std::vector<std::size_t> failed;
  std::vector<std::string> messages;
  for (int i = 0; i < n; ++i) {
    GenerationRequest req = base;
    req.index = i + 1;
    try {
      out.push_back(generate(agent, prompt, params, req));
    } catch (const Error& e) {
      failed.push_back(static_cast<std::size_t>(req.index));
      messages.emplace_back(e.what());
      out.emplace_back();
    }
  }
  if (!failed.empty()) throw PartialFailureError(std::move(failed), std::move(messages));
  return out;
}

}  // namespace labeldebate
