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

#include "mock_server.hpp"

#include <labeldebate/confidence.hpp>
#include <labeldebate/error.hpp>
#include <labeldebate/nli_client.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <vector>

using namespace labeldebate;
using nlohmann::json;

namespace {

// The mock service answers with the lexical rule so results are checkable.
json verdict_json(const json& request) {
  const auto v = lexical_entailment(request.at("premise").get<std::string>(),
                                    request.at("hypothesis").get<std::string>());
  return {{"label", to_string(v.label)}, {"score", v.score}};
}

struct NliMock {
  testing_support::MockServer mock;
  std::atomic<int> batch_calls{0};
  std::atomic<std::size_t> largest_batch{0};
  std::atomic<bool> element_error{false};

  NliMock() {
    auto& s = mock.server();
    s.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok","model_id":"mock-nli","warmed":true})", "application/json");
    });
    s.Post("/entail", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(verdict_json(json::parse(req.body)).dump(), "application/json");
    });
    s.Post("/entail_batch", [this](const httplib::Request& req, httplib::Response& res) {
      ++batch_calls;
      const auto body = json::parse(req.body);
      const auto n = body.at("requests").size();
      if (n > largest_batch) largest_batch = n;
      json out{{"responses", json::array()}};
      for (const auto& r : body.at("requests")) {
        if (element_error) {
          out["responses"].push_back({{"error", "too long"}});
        } else {
          out["responses"].push_back(verdict_json(r));
        }
      }
      res.set_content(out.dump(), "application/json");
    });
    mock.start();
  }
};

RemoteScorerOptions options_for(const std::string& url) {
  RemoteScorerOptions o;
  o.base_url = url;
  o.max_batch = 3;
  o.attempts = 2;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::milliseconds(2000);
  return o;
}

}  // namespace

TEST_CASE("wire format helpers") {
  CHECK(entail_request_json("a", "b") == json{{"premise", "a"}, {"hypothesis", "b"}});
  const auto v = entail_response_from_json(json{{"label", "contradiction"}, {"score", 0.7}});
  CHECK(v.label == EntailmentLabel::kContradiction);
  CHECK(v.score == 0.7);
  CHECK_THROWS_AS(entail_response_from_json(json{{"label", "maybe"}, {"score", 0.7}}), Error);
  CHECK_THROWS_AS(entail_response_from_json(json{{"label", "neutral"}, {"score", 1.7}}), Error);
  CHECK_THROWS_AS(entail_response_from_json(json{{"score", 0.7}}), Error);
}

TEST_CASE("remote scorer talks to the service") {
  NliMock nli;
  RemoteEntailmentScorer scorer(options_for(nli.mock.base_url()));

  const auto health = scorer.health();
  CHECK(health.warmed);
  CHECK(health.model_id == "mock-nli");

  const auto single = scorer.score("the cat sat", "the cat sat");
  CHECK(single.label == EntailmentLabel::kEntailment);
  CHECK(single.score == 1.0);

  std::vector<TextPair> pairs;
  for (int i = 0; i < 7; ++i) {
    pairs.push_back({"word " + std::to_string(i), i % 2 ? "word " + std::to_string(i) : "other"});
  }
  const auto batch = scorer.score_batch(pairs);
  REQUIRE(batch.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto expected = lexical_entailment(pairs[i].premise, pairs[i].hypothesis);
    CHECK(batch[i].label == expected.label);
    CHECK(batch[i].score == doctest::Approx(expected.score));
  }
  CHECK(nli.batch_calls.load() == 3);
  CHECK(nli.largest_batch.load() == 3);

  nli.element_error = true;
  try {
    scorer.score_batch(pairs);
    FAIL("expected a scorer failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kScorerFailure);
  }
}

TEST_CASE("remote scorer reports an unreachable service") {
  std::string url;
  {
    NliMock nli;
    url = nli.mock.base_url();
  }
  RemoteEntailmentScorer scorer(options_for(url));
  try {
    scorer.score("a", "b");
    FAIL("expected a scorer failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kScorerFailure);
  }
  CHECK_THROWS_AS(RemoteEntailmentScorer(RemoteScorerOptions{}), Error);
}
