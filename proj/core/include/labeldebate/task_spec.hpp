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

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace labeldebate {

struct FewShotExample {
  std::string post;
  std::string output;  // exemplar Cat-CoT output text
};

/// Everything a prompt builder needs to know about one annotation task.
struct TaskSpec {
  std::string task_id;
  // Noun used in the instructions, e.g. "life event" or "symptom".
  std::string indicator = "label";
  // First line of the annotation prompt; derived from `indicator` when empty.
  std::string preamble;
  std::string definition_text;
  CategorySet category_set;
  std::vector<FewShotExample> few_shot;
  // Text under "Answer:"; derived from the category names when empty.
  std::string output_instructions;

  std::string intro_line() const;
  std::string answer_instructions() const;
  // "- Name: definition" per category.
  std::string categories_definition() const;
  // definition_text followed by the category definitions.
  std::string task_definition() const;
};

// Parses {task_id, definition_text, categories, few_shot, output_instructions,
// indicator?, preamble?, none_label?} and validates the few-shot outputs.
TaskSpec parse_task_spec(const nlohmann::json& document);
TaskSpec load_task_spec(const std::filesystem::path& path);
nlohmann::json task_spec_to_json(const TaskSpec& task);

// Throws when a few-shot output does not parse as Cat-CoT for the task.
void validate_task_spec(const TaskSpec& task);

}  // namespace labeldebate
