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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace labeldebate {

enum class DebateConfidenceMode {
  kNone,
  kCoarseSelf,
  kCoarseSampling,
  kCoarseEntropy,
  kFineSelf,
  kFineSampling,
};

const char* to_string(DebateConfidenceMode mode) noexcept;
std::optional<DebateConfidenceMode> parse_debate_confidence_mode(std::string_view s) noexcept;

// How confidence is shown to other agents and the judge.
enum class Annotation { kNone, kCoarse, kFine };

Annotation annotation_for(DebateConfidenceMode mode) noexcept;
// True for modes whose initial prompt asks for self-verbalised confidence.
bool uses_self_verbalised(DebateConfidenceMode mode) noexcept;
bool uses_sampling(DebateConfidenceMode mode) noexcept;

/// Responses of all agents in one round.
struct RoundRecord {
  int round = 0;
  // Agent ids in configuration order.
  std::vector<std::string> agent_order;
  std::map<std::string, AgentResponse> responses;
  // Present only for agents that have a confidence estimate.
  std::map<std::string, ConfidenceVector> confidences;
  // Raw mean token entropy (entropy mode, round 0).
  std::map<std::string, double> entropies;
  // Agents whose output failed to parse and kept their prior response.
  std::set<std::string> carried_forward;

  const ConfidenceVector* confidence(const std::string& agent_id) const;
};

namespace markers {

inline constexpr std::string_view kOwnSolution = "Your original solution:\n";
inline constexpr std::string_view kPeerSolution = "One agent solution:\n";
inline constexpr std::string_view kDebateQuestion = "Based on your and other agents' opinions";
inline constexpr std::string_view kOverallConfidence = "Overall confidence: ";
inline constexpr std::string_view kTranscript = "Transcript of the Debate:\n";
inline constexpr std::string_view kTranscriptEnd = "\n\n---\n\n";

}  // namespace markers

// "two", "three", ... up to ten; digits beyond.
std::string number_word(std::size_t n);

/// A response as shown to other agents: coarse mode prefixes an
/// "Overall confidence: X" line, fine mode attaches per-category and
/// per-label confidences. Throws missing-confidence when `conf` lacks what
/// the annotation needs.
std::string annotate_response(const AgentResponse& response, const ConfidenceVector* conf,
                              Annotation annotation, const CategorySet& categories);

/// Conversation for one agent's debate turn: its initial prompt, its own
/// round-0 response, then the structured debate instructions.
PromptBundle build_debate_prompt(const TaskSpec& task, const Post& post,
                                 const AgentResponse& self, const ConfidenceVector* self_conf,
                                 const std::vector<std::pair<const AgentResponse*,
                                                             const ConfidenceVector*>>& peers,
                                 DebateConfidenceMode mode);

/// Judge prompt over every round, agents presented in `order`. Confidence
/// annotations are attached to round-0 responses when mode is not kNone.
PromptBundle build_judge_prompt(const TaskSpec& task, const Post& post,
                                const std::vector<RoundRecord>& rounds,
                                const std::vector<std::string>& order, DebateConfidenceMode mode);

}  // namespace labeldebate
