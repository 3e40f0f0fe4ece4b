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

#include "labeldebate/debate.hpp"
#include "labeldebate/error.hpp"
#include "labeldebate/text.hpp"

#include <fmt/format.h>

#include <fstream>

namespace labeldebate {

using nlohmann::json;

namespace {

json labels_json(const LabelSet& s, const CategorySet& categories) {
  return s.ordered(categories);
}

LabelSet labels_from(const json& doc, const CategorySet& categories) {
  return normalize_label_set(doc.get<std::vector<std::string>>(), categories);
}

template <typename F>
auto wrap_json(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, fmt::format("{}: {}", what, e.what()));
  }
}

}  // namespace

json response_to_json(const AgentResponse& r, const CategorySet& categories) {
  json judgements = json::array();
  for (const auto& j : r.judgements) {
    json item{{"category", j.category}, {"reasoning", j.reasoning}, {"verdict", j.verdict}};
    if (j.reasoning_confidence) item["confidence"] = *j.reasoning_confidence;
    judgements.push_back(std::move(item));
  }
  return json{{"agent_id", r.agent_id},
              {"round", r.round},
              {"judgements", std::move(judgements)},
              {"answer", labels_json(r.answer, categories)},
              {"answer_confidences", r.answer_confidences},
              {"raw_text", r.raw_text},
              {"warnings", r.warnings}};
}

AgentResponse response_from_json(const json& doc, const CategorySet& categories) {
  return wrap_json("agent response", [&] {
    AgentResponse r;
    r.agent_id = doc.value("agent_id", "");
    r.round = doc.value("round", 0);
    for (const auto& j : doc.at("judgements")) {
      CategoryJudgement cj;
      cj.category = j.at("category").get<std::string>();
      cj.reasoning = j.at("reasoning").get<std::string>();
      cj.verdict = j.at("verdict").get<bool>();
      if (j.contains("confidence")) cj.reasoning_confidence = j["confidence"].get<double>();
      r.judgements.push_back(std::move(cj));
    }
    r.answer = labels_from(doc.at("answer"), categories);
    r.answer_confidences =
        doc.value("answer_confidences", json::object()).get<std::map<std::string, double>>();
    r.raw_text = doc.value("raw_text", "");
    r.warnings = doc.value("warnings", json::array()).get<std::vector<std::string>>();
    return r;
  });
}

json confidence_to_json(const ConfidenceVector& v) {
  json out{{"provenance", to_string(v.provenance)},
           {"per_category", v.per_category},
           {"per_answer", v.per_answer}};
  if (v.overall) out["overall"] = *v.overall;
  return out;
}

ConfidenceVector confidence_from_json(const json& doc) {
  return wrap_json("confidence vector", [&] {
    ConfidenceVector v;
    auto p = parse_provenance(doc.at("provenance").get<std::string>());
    if (!p) throw Error(ErrorCode::kMalformedRecord, "unknown confidence provenance");
    v.provenance = *p;
    v.per_category = doc.value("per_category", json::object()).get<std::map<std::string, double>>();
    v.per_answer = doc.value("per_answer", json::object()).get<std::map<std::string, double>>();
    if (doc.contains("overall")) v.overall = doc["overall"].get<double>();
    return v;
  });
}

namespace {

json round_to_json(const RoundRecord& r, const CategorySet& categories) {
  json responses = json::object();
  for (const auto& [id, resp] : r.responses) responses[id] = response_to_json(resp, categories);
  json confidences = json::object();
  for (const auto& [id, v] : r.confidences) confidences[id] = confidence_to_json(v);
  return json{{"round", r.round},
              {"agent_order", r.agent_order},
              {"responses", std::move(responses)},
              {"confidences", std::move(confidences)},
              {"entropies", r.entropies},
              {"carried_forward", r.carried_forward}};
}

RoundRecord round_from_json(const json& doc, const CategorySet& categories) {
  RoundRecord r;
  r.round = doc.at("round").get<int>();
  r.agent_order = doc.at("agent_order").get<std::vector<std::string>>();
  for (const auto& [id, resp] : doc.at("responses").items()) {
    r.responses[id] = response_from_json(resp, categories);
  }
  const auto confidences = doc.value("confidences", json::object());
  for (const auto& [id, v] : confidences.items()) {
    r.confidences[id] = confidence_from_json(v);
  }
  r.entropies = doc.value("entropies", json::object()).get<std::map<std::string, double>>();
  r.carried_forward = doc.value("carried_forward", json::array()).get<std::set<std::string>>();
  return r;
}

json decision_to_json(const DecisionRecord& d, const CategorySet& categories) {
  json out{{"kind", to_string(d.kind)}, {"judge_fallback", d.judge_fallback}};
  if (d.chosen_agent) out["chosen_agent"] = *d.chosen_agent;
  if (d.judge_response) out["judge_response"] = response_to_json(*d.judge_response, categories);
  if (d.order_swapped) out["order_swapped"] = *d.order_swapped;
  if (d.rng_draw) out["rng_draw"] = *d.rng_draw;
  return out;
}

DecisionRecord decision_from_json(const json& doc, const CategorySet& categories) {
  DecisionRecord d;
  const auto kind = doc.at("kind").get<std::string>();
  bool known = false;
  for (auto k : {DecisionKind::kSingle, DecisionKind::kConsensus, DecisionKind::kRandomTiebreak,
                 DecisionKind::kJudge, DecisionKind::kMajorityVote}) {
    if (kind == to_string(k)) {
      d.kind = k;
      known = true;
    }
  }
  if (!known) throw Error(ErrorCode::kMalformedRecord, fmt::format("unknown decision '{}'", kind));
  d.judge_fallback = doc.value("judge_fallback", false);
  if (doc.contains("chosen_agent")) d.chosen_agent = doc["chosen_agent"].get<std::string>();
  if (doc.contains("judge_response")) {
    d.judge_response = response_from_json(doc["judge_response"], categories);
  }
  if (doc.contains("order_swapped")) d.order_swapped = doc["order_swapped"].get<bool>();
  if (doc.contains("rng_draw")) d.rng_draw = doc["rng_draw"].get<double>();
  return d;
}

}  // namespace

json transcript_to_json(const DebateTranscript& t, const CategorySet& categories) {
  json rounds = json::array();
  for (const auto& r : t.rounds) rounds.push_back(round_to_json(r, categories));
  json samples = json::array();
  for (const auto& s : t.samples) samples.push_back(response_to_json(s, categories));
  return json{{"schema_version", DebateTranscript::kSchemaVersion},
              {"post_id", t.post_id},
              {"config", t.config},
              {"rounds", std::move(rounds)},
              {"decision", decision_to_json(t.decision, categories)},
              {"final", labels_json(t.final, categories)},
              {"samples", std::move(samples)},
              {"warnings", t.warnings}};
}

DebateTranscript transcript_from_json(const json& doc, const CategorySet& categories) {
  return wrap_json("transcript", [&] {
    const int version = doc.at("schema_version").get<int>();
    if (version != DebateTranscript::kSchemaVersion) {
      throw Error(ErrorCode::kMalformedRecord,
                  fmt::format("unsupported transcript schema version {}", version));
    }
    DebateTranscript t;
    t.post_id = doc.at("post_id").get<std::string>();
    t.config = doc.value("config", json::object());
    for (const auto& r : doc.at("rounds")) t.rounds.push_back(round_from_json(r, categories));
    t.decision = decision_from_json(doc.at("decision"), categories);
    t.final = labels_from(doc.at("final"), categories);
    for (const auto& s : doc.value("samples", json::array())) {
      t.samples.push_back(response_from_json(s, categories));
    }
    t.warnings = doc.value("warnings", json::array()).get<std::vector<std::string>>();
    return t;
  });
}

void write_transcripts(std::ostream& out, const std::vector<DebateTranscript>& transcripts,
                       const CategorySet& categories) {
  for (const auto& t : transcripts) out << transcript_to_json(t, categories).dump() << '\n';
}

std::vector<DebateTranscript> read_transcripts(std::istream& in, const CategorySet& categories) {
  std::vector<DebateTranscript> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(transcript_from_json(json::parse(line), categories));
    } catch (const json::parse_error& e) {
      throw RecordError(ErrorCode::kMalformedRecord, n, e.what());
    } catch (const Error& e) {
      throw RecordError(e.code(), n, e.what());
    }
  }
  return out;
}

void save_transcripts(const std::filesystem::path& path,
                      const std::vector<DebateTranscript>& transcripts,
                      const CategorySet& categories) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  write_transcripts(out, transcripts, categories);
}

std::vector<DebateTranscript> load_transcripts(const std::filesystem::path& path,
                                               const CategorySet& categories) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read {}", path.string()));
  return read_transcripts(in, categories);
}

void save_annotations(const std::filesystem::path& path,
                      const std::map<std::string, LabelSet>& annotations,
                      const CategorySet& categories) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  for (const auto& [id, labels] : annotations) {
    out << json{{"id", id}, {"labels", labels_json(labels, categories)}}.dump() << '\n';
  }
}

std::map<std::string, LabelSet> load_annotations(const std::filesystem::path& path,
                                                 const CategorySet& categories) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read {}", path.string()));
  std::map<std::string, LabelSet> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      auto doc = json::parse(line);
      auto id = doc.at("id").get<std::string>();
      if (out.count(id)) throw RecordError(ErrorCode::kDuplicateId, n, fmt::format("id '{}'", id));
      out[id] = labels_from(doc.at("labels"), categories);
    } catch (const json::exception& e) {
      throw RecordError(ErrorCode::kMalformedRecord, n, e.what());
    } catch (const RecordError&) {
      throw;
    } catch (const Error& e) {
      throw RecordError(e.code(), n, e.what());
    }
  }
  return out;
}

}  // namespace labeldebate
