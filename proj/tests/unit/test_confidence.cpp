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

#include "confidence_oracles.hpp"
#include "fixtures.hpp"

#include <labeldebate/confidence.hpp>
#include <labeldebate/error.hpp>

#include <cmath>
#include <map>
#include <utility>

using namespace labeldebate;

namespace {

// Scores pairs from a lookup table; anything else is neutral.
class TableScorer final : public EntailmentScorer {
 public:
  std::map<std::pair<std::string, std::string>, EntailmentVerdict> table;

  EntailmentVerdict score(std::string_view p, std::string_view h) const override {
    auto it = table.find({std::string(p), std::string(h)});
    return it == table.end() ? EntailmentVerdict{EntailmentLabel::kNeutral, 0.0} : it->second;
  }
};

class ReflexiveScorer final : public EntailmentScorer {
 public:
  EntailmentVerdict score(std::string_view p, std::string_view h) const override {
    return p == h ? EntailmentVerdict{EntailmentLabel::kEntailment, 1.0}
                  : EntailmentVerdict{EntailmentLabel::kNeutral, 0.0};
  }
};

AgentResponse one_category(const std::string& category, const std::string& reasoning) {
  AgentResponse r;
  r.judgements.push_back({category, reasoning, false, std::nullopt});
  return r;
}

}  // namespace

TEST_CASE("semantic_equiv") {
  ReflexiveScorer reflexive;
  CHECK(semantic_equiv("The cat sat.", "The cat sat.", reflexive, 0.5) == 1);

  TableScorer t;
  t.table[{"a", "b"}] = {EntailmentLabel::kEntailment, 0.49};
  t.table[{"a", "c"}] = {EntailmentLabel::kContradiction, 0.99};
  t.table[{"a", "d"}] = {EntailmentLabel::kEntailment, 0.5};
  CHECK(semantic_equiv("a", "b", t, 0.5) == 0);
  CHECK(semantic_equiv("a", "c", t, 0.5) == 0);
  CHECK(semantic_equiv("a", "d", t, 0.5) == 1);
  CHECK_THROWS_AS(semantic_equiv("a", "d", t, 1.0), Error);
}

TEST_CASE("agreement_score") {
  ReflexiveScorer reflexive;
  const StepList two = {"One step.", "Two step."};
  CHECK(agreement_score(two, two, reflexive, 0.5) == 1.0);
  CHECK(agreement_score({}, two, reflexive, 0.5) == 0.0);
  CHECK(agreement_score(two, {}, reflexive, 0.5) == 0.0);
  CHECK(agreement_score({}, {}, reflexive, 0.5) == 1.0);

  TableScorer t;
  t.table[{"p1", "q1"}] = {EntailmentLabel::kEntailment, 0.9};
  CHECK(agreement_score({"p1", "p2"}, {"q1", "q2"}, t, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("agreement_score matches the f-matrix oracle for every small matrix") {
  // Every 0/1 matrix up to 3 x 3 through a table scorer.
  for (std::size_t P = 1; P <= 3; ++P) {
    for (std::size_t Q = 1; Q <= 3; ++Q) {
      const auto cells = P * Q;
      for (unsigned mask = 0; mask < (1u << cells); ++mask) {
        TableScorer t;
        oracle::FMatrix f(P, std::vector<int>(Q, 0));
        StepList ps, qs;
        for (std::size_t i = 0; i < P; ++i) ps.push_back("p" + std::to_string(i));
        for (std::size_t j = 0; j < Q; ++j) qs.push_back("q" + std::to_string(j));
        for (std::size_t c = 0; c < cells; ++c) {
          if (!(mask & (1u << c))) continue;
          f[c / Q][c % Q] = 1;
          t.table[{ps[c / Q], qs[c % Q]}] = {EntailmentLabel::kEntailment, 0.8};
        }
        CHECK(agreement_score(ps, qs, t, 0.5) == oracle::agr(f, P, Q));
      }
    }
  }
}

TEST_CASE("explanation_confidence") {
  ConfidenceConfig cfg;
  cfg.n_samples = 2;
  TableScorer t;
  t.table[{"A one.", "A one."}] = {EntailmentLabel::kEntailment, 1.0};
  t.table[{"A two.", "A two."}] = {EntailmentLabel::kEntailment, 1.0};
  const auto original = one_category("X", "A one. A two.");
  // Identical (AGR 1.0) and one matched pair of two (AGR 0.5).
  const std::vector<AgentResponse> samples = {one_category("X", "A one. A two."),
                                              one_category("X", "A one. B other.")};
  const auto conf = explanation_confidence(original, samples, t, cfg);
  CHECK(conf.at("X") == doctest::Approx(0.75));

  ReflexiveScorer reflexive;
  const std::vector<AgentResponse> same = {original, original};
  CHECK(explanation_confidence(original, same, reflexive, cfg).at("X") == 1.0);

  const std::vector<AgentResponse> short_list = {original};
  CHECK_THROWS_AS(explanation_confidence(original, short_list, reflexive, cfg), Error);
}

TEST_CASE("answer_confidence") {
  const std::vector<LabelSet> samples = {{"A"}, {"A", "B"}, {"B"}, {"A", "B"}, {"A"}};
  const auto conf = answer_confidence(LabelSet{"A", "B"}, samples, 5);
  CHECK(conf.at("A") == doctest::Approx(0.8));
  CHECK(conf.at("B") == doctest::Approx(0.6));

  const std::vector<LabelSet> all_a(5, LabelSet{"A"});
  CHECK(answer_confidence(LabelSet{"A"}, all_a, 5).at("A") == 1.0);
  const std::vector<LabelSet> none_a(5, LabelSet{"B"});
  CHECK(answer_confidence(LabelSet{"A"}, none_a, 5).at("A") == 0.0);
  CHECK_THROWS_AS(answer_confidence(LabelSet{"A"}, none_a, 4), Error);
}

TEST_CASE("scale_unit_to_band") {
  CHECK(scale_unit_to_band(0.0) == 1.0);
  CHECK(scale_unit_to_band(1.0) == 10.0);
  CHECK(scale_unit_to_band(0.5) == 5.5);
  CHECK(scale_unit_to_band(0.8) == doctest::Approx(8.2));
  CHECK_THROWS_AS(scale_unit_to_band(1.01), Error);
  CHECK_THROWS_AS(scale_unit_to_band(-0.1), Error);
}

TEST_CASE("coarse_from_fine") {
  ConfidenceVector v;
  v.per_category = {{"a", 8.0}, {"b", 8.0}};
  v.per_answer = {{"a", 6.0}};
  CHECK(coarse_from_fine(v) == 7.0);
  v.per_category = {{"a", 10.0}};
  v.per_answer = {{"a", 10.0}};
  CHECK(coarse_from_fine(v) == 10.0);
  v.per_category = {{"a", 4.0}, {"b", 6.0}};
  v.per_answer = {{"a", 9.0}};
  CHECK(coarse_from_fine(v) == 7.0);
  v.per_answer.clear();
  CHECK_THROWS_AS(coarse_from_fine(v), Error);
  v.overall = 3.0;
  CHECK(coarse_confidence(v) == 3.0);
}

TEST_CASE("extract_self_verbalised") {
  AgentResponse r;
  r.judgements.push_back({"A", "x", true, 7.0});
  r.judgements.push_back({"B", "y", false, 9.0});
  r.answer = LabelSet{"A"};
  r.answer_confidences["A"] = 8.0;
  const auto v = extract_self_verbalised(r);
  CHECK(v.provenance == ConfidenceProvenance::kSelfVerbalised);
  CHECK(v.per_category == std::map<std::string, double>{{"A", 7.0}, {"B", 9.0}});
  CHECK(v.per_answer == std::map<std::string, double>{{"A", 8.0}});
  r.judgements[1].reasoning_confidence.reset();
  try {
    extract_self_verbalised(r);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingConfidence);
  }
}

TEST_CASE("mean_token_entropy") {
  const std::vector<TokenDistribution> certain = {{1.0}, {1.0}};
  CHECK(mean_token_entropy(certain) == 0.0);
  const std::vector<TokenDistribution> coin = {{0.5, 0.5}, {0.5, 0.5}};
  CHECK(mean_token_entropy(coin) == doctest::Approx(std::log(2.0)));
  const std::vector<TokenDistribution> mixed = {{0.7, 0.2, 0.1}, {1.0}, {0.25, 0.25, 0.25, 0.25}};
  double direct = 0.0;
  for (const auto& tok : mixed) {
    for (double p : tok) direct += -p * std::log(p);
  }
  CHECK(mean_token_entropy(mixed) == doctest::Approx(direct / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(mean_token_entropy(std::span<const TokenDistribution>{}), Error);
  const std::vector<TokenDistribution> bad = {{0.9, 0.9}};
  CHECK_THROWS_AS(mean_token_entropy(bad), Error);
}

TEST_CASE("entropy_to_band") {
  const std::vector<double> ends = {0.0, std::log(2.0)};
  CHECK(entropy_to_band(ends) == std::vector<double>{10.0, 1.0});
  const std::vector<double> flat = {0.3, 0.3};
  CHECK(entropy_to_band(flat) == std::vector<double>{5.5, 5.5});
  const std::vector<double> line = {0.0, 0.35, 0.7};
  const auto banded = entropy_to_band(line);
  CHECK(banded[0] == 10.0);
  CHECK(banded[1] == doctest::Approx(5.5));
  CHECK(banded[2] == 1.0);
}

TEST_CASE("lexical_entailment") {
  auto v = lexical_entailment("the cat sat", "the cat sat");
  CHECK(v.label == EntailmentLabel::kEntailment);
  CHECK(v.score == 1.0);
  v = lexical_entailment("a b c d", "a b x y");
  CHECK(v.label == EntailmentLabel::kNeutral);
  CHECK(v.score == doctest::Approx(2.0 / 6.0));
  v = lexical_entailment("", "x");
  CHECK(v.label == EntailmentLabel::kNeutral);
  CHECK(v.score == 0.0);
  v = lexical_entailment("The Cat, sat!", "the cat sat");
  CHECK(v.label == EntailmentLabel::kEntailment);
}

TEST_CASE("sampling_confidence scales both components") {
  ConfidenceConfig cfg;
  cfg.n_samples = 2;
  LexicalEntailmentScorer lexical;
  AgentResponse original = one_category("X", "The post mentions work.");
  original.answer = LabelSet{"X"};
  AgentResponse other = one_category("X", "Something different entirely.");
  other.answer = LabelSet{"Y"};
  const std::vector<AgentResponse> samples = {original, other};
  const auto v = sampling_confidence(original, samples, lexical, cfg);
  CHECK(v.provenance == ConfidenceProvenance::kSampling);
  CHECK(v.per_category.at("X") == doctest::Approx(5.5));
  CHECK(v.per_answer.at("X") == doctest::Approx(5.5));
}
