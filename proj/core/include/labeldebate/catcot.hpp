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

#include "labeldebate/domain.hpp"
#include "labeldebate/task_spec.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labeldebate {

enum class Role { kSystem, kUser, kAssistant };
enum class PromptPurpose { kInitial, kInitialConfidence, kDebate, kJudge, kDownstream };

const char* to_string(Role role) noexcept;
const char* to_string(PromptPurpose purpose) noexcept;

struct Message {
  Role role;
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct PromptBundle {
  std::vector<Message> messages;
  PromptPurpose purpose = PromptPurpose::kInitial;

  // Content of the last user message; the text a template produced.
  const std::string& last_user_text() const;
  // Appends text to the last user message (format reminders on retry).
  void append_to_last_user(std::string_view extra);
};

enum class ConfidenceMode { kOff, kSelfVerbalised };

struct CategoryJudgement {
  std::string category;
  std::string reasoning;
  bool verdict = false;
  std::optional<double> reasoning_confidence;

  friend bool operator==(const CategoryJudgement&, const CategoryJudgement&) = default;
};

/// One parsed Cat-CoT output.
struct AgentResponse {
  // One per category, in CategorySet order.
  std::vector<CategoryJudgement> judgements;
  LabelSet answer;
  std::map<std::string, double> answer_confidences;
  std::string raw_text;
  std::string agent_id;
  int round = 0;
  std::vector<std::string> warnings;

  const CategoryJudgement* judgement(std::string_view category) const;
  // Categories with a yes verdict.
  LabelSet yes_verdicts() const;
};

using StepList = std::vector<std::string>;

// Verbatim reminder appended to a prompt when a response failed to parse.
extern const char* const kFormatReminder;

PromptBundle build_catcot_prompt(const TaskSpec& task, const Post& post,
                                 ConfidenceMode mode);

AgentResponse parse_catcot_response(std::string_view text, const CategorySet& categories,
                                    ConfidenceMode mode);

/// Splits a category's reasoning into sentences, stopping at the
/// "so the answer is" terminator.
StepList segment_steps(std::string_view reasoning);

std::string render_response(const AgentResponse& response, const CategorySet& categories,
                            ConfidenceMode mode);

// Template pieces shared with the debate and judge prompts.
namespace templates {

std::string few_shot_block(const TaskSpec& task);
// "- Name: [placeholder]. So the answer is yes (or is no)." per category.
std::string explanation_format(const CategorySet& categories, std::string_view placeholder,
                               std::string_view suffix = {});
std::string quoted_post(const Post& post);

}  // namespace templates

}  // namespace labeldebate
