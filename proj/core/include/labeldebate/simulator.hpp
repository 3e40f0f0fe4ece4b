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
#include "labeldebate/rng.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>

namespace labeldebate {

enum class ConfidenceModel { kCalibrated, kOverconfident, kUnderconfident, kConstant };
// How a simulated agent revises in a debate round.
enum class DebatePolicy { kKeep, kFollowConfident };
// How a simulated judge picks among agents.
enum class JudgePolicy { kConfidenceOracle, kFirstPresented };

const char* to_string(ConfidenceModel m) noexcept;

/// Behaviour of one simulated annotator.
struct SimulatorProfile {
  // Per-category probability of emitting the wrong verdict.
  std::map<std::string, double> flip_prob;
  double default_flip_prob = 0.0;
  ConfidenceModel confidence_model = ConfidenceModel::kCalibrated;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  DebatePolicy debate_policy = DebatePolicy::kFollowConfident;
  JudgePolicy judge_policy = JudgePolicy::kConfidenceOracle;

  double flip(const std::string& category) const;
  void validate() const;
};

SimulatorProfile simulator_profile_from_json(const nlohmann::json& doc);

// Boilerplate reasoning the simulator writes for a verdict.
std::string simulated_reasoning(const std::string& category, bool verdict);

/// Fabricates a Cat-CoT output for a post with gold labels `gold`: each
/// verdict is flipped with the category's flip probability; confidences (in
/// self-verbalised mode) follow the profile's confidence model.
std::string simulate_response(const LabelSet& gold, const CategorySet& categories,
                              const SimulatorProfile& profile, RandomStream& stream,
                              ConfidenceMode mode = ConfidenceMode::kSelfVerbalised);

/// Corpus of `n_posts` placeholder posts ("p0001", ...) whose gold sets hold
/// each non-none category independently with probability `label_prior`;
/// empty sets become the none label.
Corpus synthetic_corpus(const CategorySet& categories, std::size_t n_posts, double label_prior,
                        std::uint64_t seed);

struct DownstreamGold {
  std::optional<int> wellbeing;
  std::optional<RiskLevel> risk;
};

/// Backend fabricating outputs from gold labels it is given up front. Each
/// agent id maps to a profile; all randomness derives from
/// (profile seed, agent id, post id, stage, index, attempt).
class SimulatorBackend final : public Backend {
 public:
  SimulatorBackend(CategorySet categories, std::map<std::string, SimulatorProfile> profiles,
                   std::map<std::string, LabelSet> gold,
                   std::map<std::string, DownstreamGold> downstream = {});

  GenerationResult generate(const AgentHandle& agent, const PromptBundle& prompt,
                            const SamplingParams& params,
                            const GenerationRequest& request) override;

  bool supports_logprobs() const override { return true; }

 private:
  const SimulatorProfile& profile_for(const std::string& agent_id) const;
  std::string debate_reply(const SimulatorProfile& profile, const PromptBundle& prompt) const;
  std::string judge_reply(const SimulatorProfile& profile, const PromptBundle& prompt) const;
  std::string downstream_reply(const SimulatorProfile& profile, const PromptBundle& prompt,
                               const std::string& post_id, RandomStream& stream) const;

  CategorySet categories_;
  std::map<std::string, SimulatorProfile> profiles_;
  std::map<std::string, LabelSet> gold_;
  std::map<std::string, DownstreamGold> downstream_;
};

}  // namespace labeldebate
