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

#include "fixtures.hpp"

#include <labeldebate/domain.hpp>
#include <labeldebate/simulator.hpp>

#include <fmt/format.h>

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace testing_support {

using namespace labeldebate;

std::filesystem::path data_dir() { return LABELDEBATE_DATA_DIR; }
std::filesystem::path golden_dir() { return LABELDEBATE_GOLDEN_DIR; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TaskSpec load_task(const std::string& name) {
  return load_task_spec(data_dir() / "tasks" / (name + ".json"));
}

TaskSpec binary_task() {
  TaskSpec t;
  t.task_id = "binary";
  t.indicator = "target";
  t.definition_text = "Decide whether the post describes the target.";
  t.category_set = CategorySet::validate(
      {{"Target", "The post describes the target."}, {"None", "No target is described."}});
  return t;
}

std::string random_sentence(RandomStream& rng, std::size_t min_words, std::size_t max_words) {
  static constexpr std::array<const char*, 24> kWords = {
      "post",   "author", "mentions", "family", "work",   "school", "evidence", "clear",
      "recent", "change", "describes", "loss",  "health", "stress", "friend",   "moved",
      "job",    "new",    "strong",   "weak",   "signal", "event",  "sleep",    "money"};
  const auto n = min_words + rng.index(max_words - min_words + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w = kWords[rng.index(kWords.size())];
    if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (i > 0) s += ' ';
    s += w;
  }
  return s + ".";
}

AgentResponse random_response(const CategorySet& categories, RandomStream& rng,
                              ConfidenceMode mode) {
  AgentResponse r;
  std::vector<std::string> yes;
  for (const auto& c : categories.categories()) {
    CategoryJudgement j;
    j.category = c.name;
    const auto sentences = 1 + rng.index(3);
    for (std::size_t i = 0; i < sentences; ++i) {
      if (i > 0) j.reasoning += ' ';
      j.reasoning += random_sentence(rng);
    }
    j.verdict = rng.bernoulli(0.4);
    if (mode == ConfidenceMode::kSelfVerbalised) {
      j.reasoning_confidence = std::round((1.0 + 9.0 * rng.uniform()) * 100.0) / 100.0;
    }
    if (j.verdict) yes.push_back(c.name);
    r.judgements.push_back(std::move(j));
  }
  r.answer = normalize_label_set(yes, categories);
  if (r.answer.empty() && categories.none_label()) r.answer = LabelSet{*categories.none_label()};
  if (mode == ConfidenceMode::kSelfVerbalised) {
    for (const auto& label : r.answer.labels()) {
      r.answer_confidences[label] = std::round((1.0 + 9.0 * rng.uniform()) * 100.0) / 100.0;
    }
  }
  return r;
}

std::shared_ptr<ScriptedBackend> scripted_fixture(const Corpus& corpus,
                                                  const CategorySet& categories,
                                                  const FixtureSpec& spec) {
  auto backend = std::make_shared<ScriptedBackend>();
  SimulatorProfile profile;
  profile.default_flip_prob = spec.flip;
  for (const auto& post : corpus.posts) {
    const auto& gold = *post.gold_labels;
    for (const auto& agent : spec.agents) {
      RandomStream rng(derive_seed(spec.seed, {agent, post.id}));
      backend->push(agent, post.id + "/r0", simulate_response(gold, categories, profile, rng, spec.mode));
      for (int s = 1; s <= spec.n_samples; ++s) {
        backend->push(agent, fmt::format("{}/r0/s{}", post.id, s),
                      simulate_response(gold, categories, profile, rng, spec.mode));
      }
      backend->push(agent, post.id + "/r1",
                    simulate_response(gold, categories, profile, rng, ConfidenceMode::kOff));
    }
    RandomStream rng(derive_seed(spec.seed, {spec.judge, post.id}));
    backend->push(spec.judge, post.id + "/judge",
                  simulate_response(gold, categories, profile, rng, ConfidenceMode::kOff));
  }
  return backend;
}

}  // namespace testing_support
