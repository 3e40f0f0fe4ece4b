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

#include <labeldebate/domain.hpp>
#include <labeldebate/error.hpp>
#include <labeldebate/task_spec.hpp>

#include <filesystem>
#include <functional>
#include <sstream>

using namespace labeldebate;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

CategorySet symptoms() { return testing_support::load_task("symptoms").category_set; }

}  // namespace

TEST_CASE("category set detects the none label by name") {
  auto cs = CategorySet::validate({{"A", "a"}, {"B", "b"}, {"None", "none"}});
  CHECK(cs.size() == 3);
  REQUIRE(cs.none_label());
  CHECK(*cs.none_label() == "None");
  CHECK(cs.names() == std::vector<std::string>{"A", "B", "None"});
}

TEST_CASE("category set rejects bad input") {
  CHECK(code_of([] { CategorySet::validate({{"A", "x"}, {"a", "y"}}); }) ==
        ErrorCode::kDuplicateName);
  CHECK(code_of([] { CategorySet::validate({}); }) == ErrorCode::kEmptyList);
  CHECK(code_of([] { CategorySet::validate({{"A", "x"}}); }) == ErrorCode::kEmptyList);
  CHECK(code_of([] { CategorySet::validate({{"  ", "x"}, {"B", "y"}}); }) ==
        ErrorCode::kEmptyName);
  CHECK(code_of([] { CategorySet::validate({{"A", "x"}, {"B", "y"}}, "Zed"); }) ==
        ErrorCode::kUnknownLabel);
}

TEST_CASE("resolve is trimmed and case-insensitive") {
  auto cs = symptoms();
  CHECK(cs.resolve("  detachment ") == std::optional<std::string>("Detachment"));
  CHECK_FALSE(cs.resolve("Detach"));
  CHECK(cs.index_of("Detachment") == std::optional<std::size_t>(4));
}

TEST_CASE("normalize_label_set") {
  auto life = testing_support::load_task("life_events").category_set;
  CHECK(normalize_label_set({"mental health ", "Mental Health"}, life) ==
        LabelSet{"Mental Health"});
  CHECK(normalize_label_set({"None", "Detachment"}, symptoms()) == LabelSet{"Detachment"});
  CHECK(normalize_label_set({"None"}, symptoms()) == LabelSet{"None"});
  CHECK(code_of([&] { normalize_label_set({"Banana"}, life); }) == ErrorCode::kUnknownLabel);
}

TEST_CASE("label sets compare without order and list in taxonomy order") {
  auto cs = symptoms();
  LabelSet a{"Detachment", "Fear and Distress"};
  LabelSet b{"Fear and Distress", "Detachment"};
  CHECK(a == b);
  CHECK(a.ordered(cs) == std::vector<std::string>{"Fear and Distress", "Detachment"});
}

TEST_CASE("corpus parsing") {
  auto cs = symptoms();
  SUBCASE("two records") {
    std::istringstream in(
        "{\"id\":\"p1\",\"text\":\"hello\",\"gold_labels\":[\"Detachment\"]}\n"
        "\n"
        "{\"id\":\"p2\",\"text\":\"world\",\"wellbeing\":7,\"risk\":\"B\",\"source\":\"x\"}\n");
    auto corpus = parse_corpus(in, cs, "symptoms");
    REQUIRE(corpus.posts.size() == 2);
    CHECK(corpus.posts[0].gold_labels == LabelSet{"Detachment"});
    CHECK(corpus.posts[1].wellbeing == 7);
    CHECK(corpus.posts[1].risk == RiskLevel::kB);
    CHECK(corpus.posts[1].extra["source"] == "x");
    CHECK(corpus.find("p2") == &corpus.posts[1]);
    CHECK(corpus.find("p3") == nullptr);
  }
  SUBCASE("unknown label reports its line") {
    std::istringstream in(
        "{\"id\":\"p1\",\"text\":\"a\"}\n{\"id\":\"p2\",\"text\":\"b\",\"gold_labels\":[\"Xyz\"]}\n");
    try {
      parse_corpus(in, cs);
      FAIL("expected an error");
    } catch (const RecordError& e) {
      CHECK(e.code() == ErrorCode::kUnknownLabel);
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("duplicate ids") {
    std::istringstream in("{\"id\":\"p1\",\"text\":\"a\"}\n{\"id\":\"p1\",\"text\":\"b\"}\n");
    CHECK(code_of([&] { parse_corpus(in, cs); }) == ErrorCode::kDuplicateId);
  }
  SUBCASE("malformed records") {
    std::istringstream missing_text("{\"id\":\"p1\"}\n");
    CHECK(code_of([&] { parse_corpus(missing_text, cs); }) == ErrorCode::kMalformedRecord);
    std::istringstream not_json("{oops\n");
    CHECK(code_of([&] { parse_corpus(not_json, cs); }) == ErrorCode::kMalformedRecord);
    std::istringstream bad_risk("{\"id\":\"p1\",\"text\":\"a\",\"risk\":\"E\"}\n");
    CHECK(code_of([&] { parse_corpus(bad_risk, cs); }) == ErrorCode::kMalformedRecord);
  }
  SUBCASE("empty corpus") {
    std::istringstream in("\n");
    CHECK(code_of([&] { parse_corpus(in, cs); }) == ErrorCode::kEmptyList);
  }
}

TEST_CASE("corpus round-trips through disk") {
  auto cs = symptoms();
  Corpus corpus;
  corpus.task_id = "symptoms";
  Post p;
  p.id = "p9";
  p.text = "A line with \"quotes\" and unicode \xE2\x80\x99.";
  p.gold_labels = LabelSet{"Detachment", "Fear and Distress"};
  p.wellbeing = 3;
  corpus.posts.push_back(p);
  const auto path = std::filesystem::temp_directory_path() / "labeldebate_corpus_test.jsonl";
  save_corpus(path, corpus, cs);
  CHECK(load_corpus(path, cs, "symptoms") == corpus);
  std::filesystem::remove(path);
  CHECK(code_of([&] { load_corpus(path, cs); }) == ErrorCode::kIo);
}

TEST_CASE("bundled task specs validate") {
  for (const auto* name : {"life_events", "symptoms", "risky_behaviours"}) {
    CAPTURE(name);
    auto task = testing_support::load_task(name);
    CHECK_NOTHROW(validate_task_spec(task));
    CHECK(task.category_set.none_label());
    CHECK(task.few_shot.size() == 1);
  }
}

TEST_CASE("task spec text helpers") {
  auto task = testing_support::binary_task();
  CHECK(task.categories_definition() ==
        "- Target: The post describes the target.\n- None: No target is described.");
  CHECK(task.task_definition().starts_with(task.definition_text + "\n\n- Target"));
  auto doc = task_spec_to_json(task);
  auto back = parse_task_spec(doc);
  CHECK(back.category_set == task.category_set);
  CHECK(back.definition_text == task.definition_text);
}
