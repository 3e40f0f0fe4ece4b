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

#include <labeldebate/catcot.hpp>
#include <labeldebate/error.hpp>
#include <labeldebate/rng.hpp>

#include <string>

using namespace labeldebate;

namespace {

const TaskSpec& life() {
  static const TaskSpec task = testing_support::load_task("life_events");
  return task;
}

// One line per category; `yes` lists the categories answered yes.
std::string response_text(const std::set<std::string>& yes, bool confident,
                          const std::string& answer) {
  std::string out = "Explanation:\n";
  for (const auto& c : life().category_set.categories()) {
    const bool v = yes.count(c.name) > 0;
    out += "- " + c.name + ": " + (v ? "The poster describes a diagnosis." : "No evidence.") +
           " So the answer is " + (v ? "yes." : "no.");
    if (confident) out += v ? " (Confidence: 7)" : " (Confidence: 9)";
    out += "\n";
  }
  return out + "Answer:\n" + answer;
}

Post sample_post() {
  Post p;
  p.id = "p1";
  p.text = "I was diagnosed with depression last week.";
  return p;
}

ErrorCode parse_error(const std::string& text, ConfidenceMode mode) {
  try {
    parse_catcot_response(text, life().category_set, mode);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("prompt format block") {
  const auto off = build_catcot_prompt(life(), sample_post(), ConfidenceMode::kOff);
  REQUIRE(off.messages.size() == 1);
  CHECK(off.purpose == PromptPurpose::kInitial);
  const auto& text = off.last_user_text();
  CHECK(text.find("- Mental Health: [reason]. So the answer is yes (or is no).\n") !=
        std::string::npos);
  CHECK(text.find("Confidence") == std::string::npos);
  CHECK(text.find("\"I was diagnosed with depression last week.\"") != std::string::npos);
  CHECK(text.find("Example 1:") != std::string::npos);

  const auto self = build_catcot_prompt(life(), sample_post(), ConfidenceMode::kSelfVerbalised);
  CHECK(self.purpose == PromptPurpose::kInitialConfidence);
  const auto& st = self.last_user_text();
  CHECK(st.find("- Mental Health: [reason]. So the answer is yes (or is no). (Confidence: X)\n") !=
        std::string::npos);
  CHECK(st.find("- None: [reason]. So the answer is yes (or is no). (Confidence: X)\n") !=
        std::string::npos);
}

TEST_CASE("zero-shot prompt omits the example section") {
  auto task = life();
  task.few_shot.clear();
  const auto text = build_catcot_prompt(task, sample_post(), ConfidenceMode::kOff).last_user_text();
  CHECK(text.find("Below are some examples") == std::string::npos);
  CHECK(text.find("Example 1") == std::string::npos);
}

TEST_CASE("format reminder is appended to the user turn") {
  auto bundle = build_catcot_prompt(life(), sample_post(), ConfidenceMode::kOff);
  const auto before = bundle.last_user_text();
  bundle.append_to_last_user(kFormatReminder);
  CHECK(bundle.last_user_text() == before + kFormatReminder);
}

TEST_CASE("parse a plain response") {
  const auto r = parse_catcot_response(response_text({"Mental Health"}, false, "Mental Health"),
                                       life().category_set, ConfidenceMode::kOff);
  REQUIRE(r.judgements.size() == life().category_set.size());
  CHECK(r.judgement("Mental Health")->verdict);
  CHECK_FALSE(r.judgement("Physical Health")->verdict);
  CHECK(r.judgement("Mental Health")->reasoning == "The poster describes a diagnosis.");
  CHECK(r.answer == LabelSet{"Mental Health"});
  CHECK(r.warnings.empty());
}

TEST_CASE("parse self-verbalised confidences") {
  const auto r = parse_catcot_response(
      response_text({"Mental Health"}, true, "Mental Health (Confidence: 8)"),
      life().category_set, ConfidenceMode::kSelfVerbalised);
  CHECK(r.judgement("Mental Health")->reasoning_confidence == 7.0);
  CHECK(r.judgement("None")->reasoning_confidence == 9.0);
  CHECK(r.answer_confidences == std::map<std::string, double>{{"Mental Health", 8.0}});
}

TEST_CASE("parse tolerates bold markers and case") {
  auto text = response_text({"Career & Education"}, false, "career & education");
  text = "**Explanation:**\n" + text.substr(std::string("Explanation:\n").size());
  const auto r = parse_catcot_response(text, life().category_set, ConfidenceMode::kOff);
  CHECK(r.answer == LabelSet{"Career & Education"});
}

TEST_CASE("parse errors") {
  const auto good = response_text({"Mental Health"}, false, "Mental Health");
  SUBCASE("no answer block") {
    CHECK(parse_error(good.substr(0, good.find("Answer:")), ConfidenceMode::kOff) ==
          ErrorCode::kMissingBlock);
  }
  SUBCASE("no explanation block") {
    CHECK(parse_error("Answer:\nMental Health", ConfidenceMode::kOff) == ErrorCode::kMissingBlock);
  }
  SUBCASE("missing category") {
    auto text = good;
    const auto at = text.find("- Physical Health");
    text.erase(at, text.find('\n', at) - at + 1);
    CHECK(parse_error(text, ConfidenceMode::kOff) == ErrorCode::kMissingCategory);
  }
  SUBCASE("missing verdict") {
    auto text = good;
    const auto at = text.find("No evidence. So the answer is no.");
    text.replace(at, std::string("No evidence. So the answer is no.").size(), "No evidence.");
    CHECK(parse_error(text, ConfidenceMode::kOff) == ErrorCode::kVerdictParse);
  }
  SUBCASE("missing confidence in self mode") {
    CHECK(parse_error(good, ConfidenceMode::kSelfVerbalised) == ErrorCode::kConfidenceParse);
  }
  SUBCASE("confidence outside the band") {
    auto text = response_text({"Mental Health"}, true, "Mental Health (Confidence: 11)");
    CHECK(parse_error(text, ConfidenceMode::kSelfVerbalised) == ErrorCode::kConfidenceParse);
  }
  SUBCASE("unknown answer label") {
    CHECK(parse_error(response_text({}, false, "Banana"), ConfidenceMode::kOff) ==
          ErrorCode::kUnknownLabel);
  }
}

TEST_CASE("answer block wins over verdicts with a warning") {
  const auto r = parse_catcot_response(response_text({"Mental Health"}, false, "Physical Health"),
                                       life().category_set, ConfidenceMode::kOff);
  CHECK(r.answer == LabelSet{"Physical Health"});
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("empty answer becomes the none label") {
  const auto r = parse_catcot_response(response_text({}, false, ""), life().category_set,
                                       ConfidenceMode::kOff);
  CHECK(r.answer == LabelSet{"None"});
}

TEST_CASE("segment_steps") {
  CHECK(segment_steps("The post mentions a job loss. This impacts the poster directly. So the "
                      "answer is yes.") ==
        StepList{"The post mentions a job loss.", "This impacts the poster directly."});
  CHECK(segment_steps("So the answer is no.").empty());
  CHECK(segment_steps("No evidence found") == StepList{"No evidence found"});
  CHECK(segment_steps("Version 2.5 is out! Really? yes") ==
        StepList{"Version 2.5 is out!", "Really?", "yes"});
}

TEST_CASE("render") {
  AgentResponse r;
  for (const auto& c : life().category_set.categories()) {
    const bool yes = c.name == "Career & Education";
    r.judgements.push_back({c.name, "Reason here.", yes, 6.0});
  }
  r.answer = LabelSet{"Career & Education"};
  r.answer_confidences["Career & Education"] = 9.0;
  const auto text = render_response(r, life().category_set, ConfidenceMode::kSelfVerbalised);
  CHECK(text.starts_with("Explanation:\n- "));
  CHECK(text.ends_with("Answer:\nCareer & Education (Confidence: 9)"));
  const auto plain = render_response(r, life().category_set, ConfidenceMode::kOff);
  CHECK(plain.find("Confidence") == std::string::npos);

  r.answer_confidences.clear();
  CHECK_THROWS_AS(render_response(r, life().category_set, ConfidenceMode::kSelfVerbalised),
                  Error);
}

TEST_CASE("random responses survive a render-parse round trip") {
  RandomStream rng(99);
  for (auto mode : {ConfidenceMode::kOff, ConfidenceMode::kSelfVerbalised}) {
    for (int i = 0; i < 50; ++i) {
      const auto r = testing_support::random_response(life().category_set, rng, mode);
      const auto back =
          parse_catcot_response(render_response(r, life().category_set, mode), life().category_set, mode);
      CHECK(back.judgements == r.judgements);
      CHECK(back.answer == r.answer);
      CHECK(back.answer_confidences == r.answer_confidences);
    }
  }
}
