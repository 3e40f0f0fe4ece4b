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

#include "labeldebate/debate_prompts.hpp"

#include "labeldebate/error.hpp"
#include "labeldebate/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>

namespace labeldebate {

const char* to_string(DebateConfidenceMode mode) noexcept {
  switch (mode) {
    case DebateConfidenceMode::kNone: return "none";
    case DebateConfidenceMode::kCoarseSelf: return "coarse_self";
    case DebateConfidenceMode::kCoarseSampling: return "coarse_sampling";
    case DebateConfidenceMode::kCoarseEntropy: return "coarse_entropy";
    case DebateConfidenceMode::kFineSelf: return "fine_self";
    case DebateConfidenceMode::kFineSampling: return "fine_sampling";
  }
  return "none";
}

std::optional<DebateConfidenceMode> parse_debate_confidence_mode(std::string_view s) noexcept {
  for (auto m : {DebateConfidenceMode::kNone, DebateConfidenceMode::kCoarseSelf,
                 DebateConfidenceMode::kCoarseSampling, DebateConfidenceMode::kCoarseEntropy,
                 DebateConfidenceMode::kFineSelf, DebateConfidenceMode::kFineSampling}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

Annotation annotation_for(DebateConfidenceMode mode) noexcept {
  switch (mode) {
    case DebateConfidenceMode::kNone: return Annotation::kNone;
    case DebateConfidenceMode::kFineSelf:
    case DebateConfidenceMode::kFineSampling: return Annotation::kFine;
    default: return Annotation::kCoarse;
  }
}

bool uses_self_verbalised(DebateConfidenceMode mode) noexcept {
  return mode == DebateConfidenceMode::kCoarseSelf || mode == DebateConfidenceMode::kFineSelf;
}

bool uses_sampling(DebateConfidenceMode mode) noexcept {
  return mode == DebateConfidenceMode::kCoarseSampling ||
         mode == DebateConfidenceMode::kFineSampling;
}

const ConfidenceVector* RoundRecord::confidence(const std::string& agent_id) const {
  auto it = confidences.find(agent_id);
  return it == confidences.end() ? nullptr : &it->second;
}

std::string number_word(std::size_t n) {
  static constexpr std::array<const char*, 11> kWords = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
  return n < kWords.size() ? kWords[n] : std::to_string(n);
}

std::string annotate_response(const AgentResponse& response, const ConfidenceVector* conf,
                              Annotation annotation, const CategorySet& categories) {
  switch (annotation) {
    case Annotation::kNone:
      return render_response(response, categories, ConfidenceMode::kOff);
    case Annotation::kCoarse:
      if (!conf || !conf->overall) {
        throw Error(ErrorCode::kMissingConfidence,
                    fmt::format("no overall confidence for agent '{}'", response.agent_id));
      }
      return fmt::format("{}{}\n{}", markers::kOverallConfidence, text::format_score(*conf->overall),
                         render_response(response, categories, ConfidenceMode::kOff));
    case Annotation::kFine: {
      if (!conf) {
        throw Error(ErrorCode::kMissingConfidence,
                    fmt::format("no confidence vector for agent '{}'", response.agent_id));
      }
      AgentResponse copy = response;
      for (auto& j : copy.judgements) {
        auto it = conf->per_category.find(j.category);
        if (it == conf->per_category.end()) {
          throw Error(ErrorCode::kMissingConfidence,
                      fmt::format("no confidence for category '{}'", j.category));
        }
        j.reasoning_confidence = it->second;
      }
      copy.answer_confidences.clear();
      for (const auto& label : copy.answer.labels()) {
        auto it = conf->per_answer.find(label);
        if (it == conf->per_answer.end()) {
          throw Error(ErrorCode::kMissingConfidence,
                      fmt::format("no confidence for answer label '{}'", label));
        }
        copy.answer_confidences[label] = it->second;
      }
      return render_response(copy, categories, ConfidenceMode::kSelfVerbalised);
    }
  }
  return {};
}

PromptBundle build_debate_prompt(
    const TaskSpec& task, const Post& post, const AgentResponse& self,
    const ConfidenceVector* self_conf,
    const std::vector<std::pair<const AgentResponse*, const ConfidenceVector*>>& peers,
    DebateConfidenceMode mode) {
  if (peers.empty()) throw Error(ErrorCode::kPrecondition, "debate prompt needs at least one peer");
  const auto& cs = task.category_set;
  const auto ann = annotation_for(mode);
  const auto initial_mode =
      uses_self_verbalised(mode) ? ConfidenceMode::kSelfVerbalised : ConfidenceMode::kOff;

  PromptBundle bundle = build_catcot_prompt(task, post, initial_mode);
  bundle.purpose = PromptPurpose::kDebate;
  AgentResponse shown = self;
  if (initial_mode == ConfidenceMode::kOff) {
    for (auto& j : shown.judgements) j.reasoning_confidence.reset();
    shown.answer_confidences.clear();
  }
  bundle.messages.push_back({Role::kAssistant, render_response(shown, cs, initial_mode)});

  std::string p;
  switch (ann) {
    case Annotation::kNone:
      p += "These are solutions provided by you and the other agents for the given problem.";
      break;
    case Annotation::kCoarse:
      p += "These are solutions and confidence scores (1 to 10, where higher means more "
           "confident) provided by you and the other agents for the given problem. Each "
           "solution has a single overall confidence score. ";
      break;
    case Annotation::kFine:
      p += "These are solutions and confidence scores (1 to 10, where higher means more "
           "confident) provided by you and the other agents for the given problem. Each "
           "category includes an explanation with its own confidence score, and each final "
           "selected answer has a single overall confidence score. ";
      break;
  }
  p += "\n\n";
  p += markers::kOwnSolution;
  p += annotate_response(self, self_conf, ann, cs);
  for (const auto& [resp, conf] : peers) {
    p += "\n\n";
    p += markers::kPeerSolution;
    p += annotate_response(*resp, conf, ann, cs);
  }
  p += "\n\n";
  p += markers::kDebateQuestion;
  p += ann == Annotation::kNone ? ", can you provide an updated response?"
                                : " and confidence levels, can you provide an updated response?";
  p += "\n\nBefore you update your answer, carefully think through the following steps for each "
       "category:\n\n"
       "1. Reflect on Your Original Analysis: Briefly restate your original reasoning, "
       "conclusion, and the key evidence supporting it.\n\n"
       "2. Critically Evaluate External Opinions: Analyze the explanations provided by the "
       "other agents. Identify any strengths, weaknesses, or potential biases in their "
       "reasoning. Point out any evidence or details you think are missing or "
       "overemphasized.\n\n"
       "3. Synthesize and Update: Considering both your original analysis and the external "
       "opinions, provide a comprehensive and objective reasoning that explains whether you "
       "should adjust your original conclusion or retain it. Ensure that you discuss both sides "
       "before arriving at your final decision. \n\n\n";
  p += ann == Annotation::kNone
           ? "Please strictly follow the output format exactly as shown below. Do not include "
             "bold text, markdown, or additional explanation.\n\n"
           : "Please strictly follow the output format exactly as shown below. Do not output "
             "your confidence scores. Do not include bold text, markdown, or additional "
             "explanation.\n\n";
  p += "Explanation:\n";
  p += templates::explanation_format(
      cs, "Include your critical reasoning with reference to both your view and others' input");
  p += "\n\nAnswer:\n";
  p += task.answer_instructions();
  bundle.messages.push_back({Role::kUser, std::move(p)});
  return bundle;
}

PromptBundle build_judge_prompt(const TaskSpec& task, const Post& post,
                                const std::vector<RoundRecord>& rounds,
                                const std::vector<std::string>& order,
                                DebateConfidenceMode mode) {
  if (rounds.empty()) throw Error(ErrorCode::kPrecondition, "judge prompt needs a round");
  {
    auto a = order;
    auto b = rounds.front().agent_order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw Error(ErrorCode::kPrecondition, "judge order is not a permutation of agents");
  }
  const auto& cs = task.category_set;
  const auto ann = annotation_for(mode);

  std::string p;
  p += fmt::format(
      "You are a judge tasked with evaluating a debate between {} agents about whether a given "
      "post reflects one or more predefined {} categories.\n\n",
      number_word(order.size()), task.indicator);
  p += "For each category, analyze and compare the agents' arguments for accuracy and "
       "relevance. Judge whether their reasoning is well supported by the post content and "
       "whether it aligns with the given category definitions.\n\n";
  if (ann != Annotation::kNone) {
    p += "When comparing agents, treat confidence scores as secondary signals. Base your "
         "decision primarily on the strength and clarity of evidence in the post. High "
         "confidence without explicit textual support should be treated as weak reasoning.\n\n";
  }
  p += "Then, based on this comparison, decide whether the category applies and explain your "
       "reasoning.\n\n---\n\n";
  p += task.task_definition();
  p += "\n\n---\n\n";
  if (!task.few_shot.empty()) {
    p += "Below are some examples:\n";
    p += templates::few_shot_block(task);
    p += "\n\n";
  }
  p += "Post to Analyze:\n";
  p += templates::quoted_post(post);
  p += "\n\n";
  p += markers::kTranscript;
  bool first = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (const auto& round : rounds) {
      auto it = round.responses.find(order[k]);
      if (it == round.responses.end()) continue;
      if (!first) p += "\n\n";
      first = false;
      const auto* conf = round.round == 0 ? round.confidence(order[k]) : nullptr;
      const auto a = round.round == 0 ? ann : Annotation::kNone;
      p += fmt::format("Agent {} (Round {}):\n", k + 1, round.round + 1);
      p += annotate_response(it->second, conf, a, cs);
    }
  }
  p += markers::kTranscriptEnd;
  p += "Please follow the exact format below.\n\nOutput Format:\nExplanation:\n";
  p += templates::explanation_format(cs, "Compare, explain, and conclude");
  p += "\n\nAnswer:\n";
  p += task.answer_instructions();

  PromptBundle bundle;
  bundle.purpose = PromptPurpose::kJudge;
  bundle.messages.push_back({Role::kUser, std::move(p)});
  return bundle;
}

}  // namespace labeldebate
