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

#include <doctest.h>

#include "fixtures.hpp"

#include <labeldebate/debate.hpp>
#include <labeldebate/error.hpp>
#include <labeldebate/simulator.hpp>

#include <filesystem>
#include <sstream>

using namespace labeldebate;
using nlohmann::json;

namespace {

std::vector<DebateTranscript> sample_transcripts(const TaskSpec& task, DebateConfidenceMode mode,
                                                 Method method = Method::kDebate) {
  const auto corpus = synthetic_corpus(task.category_set, 8, 0.4, 21);
  testing_support::FixtureSpec spec;
  spec.seed = 4;
  spec.flip = 0.3;
  auto backend = testing_support::scripted_fixture(corpus, task.category_set, spec);
  static LexicalEntailmentScorer scorer;
  DebateSetup setup;
  setup.task = &task;
  for (const auto& id : spec.agents) {
    Agent a;
    a.handle.agent_id = id;
    a.backend = backend;
    setup.agents.push_back(a);
  }
  Agent judge;
  judge.handle.agent_id = spec.judge;
  judge.backend = backend;
  setup.judge = judge;
  setup.scorer = &scorer;
  setup.config.method = method;
  setup.config.confidence_mode = mode;
  setup.config.decision = DecisionProtocol::kJudge;
  return run_pipeline(corpus, setup).transcripts;
}

std::string dump(const std::vector<DebateTranscript>& ts, const CategorySet& cs) {
  std::ostringstream out;
  write_transcripts(out, ts, cs);
  return out.str();
}

}  // namespace

TEST_CASE("transcripts round-trip through JSON lines") {
  const auto task = testing_support::load_task("life_events");
  for (auto mode : {DebateConfidenceMode::kNone, DebateConfidenceMode::kFineSelf,
                    DebateConfidenceMode::kCoarseSelf}) {
    CAPTURE(to_string(mode));
    const auto ts = sample_transcripts(task, mode);
    REQUIRE(ts.size() == 8);
    const auto text = dump(ts, task.category_set);
    std::istringstream in(text);
    const auto back = read_transcripts(in, task.category_set);
    CHECK(dump(back, task.category_set) == text);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CHECK(back[i].final == ts[i].final);
      CHECK(back[i].rounds.size() == ts[i].rounds.size());
      CHECK(back[i].decision.order_swapped == ts[i].decision.order_swapped);
    }
  }
}

TEST_CASE("single responses and confidence vectors round-trip") {
  const auto task = testing_support::load_task("symptoms");
  RandomStream rng(8);
  const auto r = testing_support::random_response(task.category_set, rng,
                                                  ConfidenceMode::kSelfVerbalised);
  const auto back = response_from_json(response_to_json(r, task.category_set), task.category_set);
  CHECK(back.judgements == r.judgements);
  CHECK(back.answer == r.answer);
  CHECK(back.answer_confidences == r.answer_confidences);

  ConfidenceVector v;
  v.per_category = {{"Detachment", 3.5}};
  v.per_answer = {{"Detachment", 9.0}};
  v.overall = 6.25;
  v.provenance = ConfidenceProvenance::kEntropy;
  CHECK(confidence_from_json(confidence_to_json(v)) == v);
}

TEST_CASE("files on disk") {
  const auto task = testing_support::load_task("life_events");
  const auto ts = sample_transcripts(task, DebateConfidenceMode::kFineSelf);
  const auto dir = std::filesystem::temp_directory_path() / "labeldebate_transcript_io";
  std::filesystem::create_directories(dir);
  save_transcripts(dir / "t.jsonl", ts, task.category_set);
  CHECK(dump(load_transcripts(dir / "t.jsonl", task.category_set), task.category_set) ==
        dump(ts, task.category_set));

  std::map<std::string, LabelSet> annotations;
  for (const auto& t : ts) annotations[t.post_id] = t.final;
  save_annotations(dir / "a.jsonl", annotations, task.category_set);
  CHECK(load_annotations(dir / "a.jsonl", task.category_set) == annotations);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_transcripts(dir / "t.jsonl", task.category_set), Error);
}

TEST_CASE("malformed transcript lines are rejected") {
  const auto task = testing_support::load_task("life_events");
  std::istringstream garbage("{\"post_id\": 3}\n");
  CHECK_THROWS_AS(read_transcripts(garbage, task.category_set), Error);
  const auto ts = sample_transcripts(task, DebateConfidenceMode::kNone);
  auto doc = transcript_to_json(ts.front(), task.category_set);
  doc["final"] = json::array({"Banana"});
  CHECK_THROWS_AS(transcript_from_json(doc, task.category_set), Error);
}
