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

#include <labeldebate/catcot.hpp>
#include <labeldebate/debate.hpp>
#include <labeldebate/rng.hpp>
#include <labeldebate/scripted_backend.hpp>
#include <labeldebate/task_spec.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace testing_support {

std::filesystem::path data_dir();
std::filesystem::path golden_dir();
std::string read_file(const std::filesystem::path& path);

labeldebate::TaskSpec load_task(const std::string& name);

// Two-category task {Target, None}.
labeldebate::TaskSpec binary_task();

// A short sentence of random words; never contains parentheses or the
// verdict phrase.
std::string random_sentence(labeldebate::RandomStream& rng, std::size_t min_words = 3,
                            std::size_t max_words = 8);

// A parse-stable response: judgements in taxonomy order, answer equal to the
// normalized yes verdicts, confidences with two decimals in self mode.
labeldebate::AgentResponse random_response(const labeldebate::CategorySet& categories,
                                           labeldebate::RandomStream& rng,
                                           labeldebate::ConfidenceMode mode);

struct FixtureSpec {
  std::vector<std::string> agents = {"alpha", "beta"};
  std::string judge = "judge";
  int n_samples = 5;
  std::uint64_t seed = 1;
  double flip = 0.25;
  labeldebate::ConfidenceMode mode = labeldebate::ConfidenceMode::kSelfVerbalised;
};

// Scripted responses for every stage a one-round debate can request.
std::shared_ptr<labeldebate::ScriptedBackend> scripted_fixture(
    const labeldebate::Corpus& corpus, const labeldebate::CategorySet& categories,
    const FixtureSpec& spec);

}  // namespace testing_support
