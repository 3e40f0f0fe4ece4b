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

#include "labeldebate/enrichment.hpp"

#include "labeldebate/error.hpp"
#include "labeldebate/text.hpp"

#include <fmt/format.h>

#include <cctype>
#include <fstream>
#include <mutex>

namespace labeldebate {

using nlohmann::json;

const char* to_string(StrategyKind k) noexcept {
  switch (k) {
    case StrategyKind::kBaseline: return "baseline";
    case StrategyKind::kGoldLabels: return "gold_labels";
    case StrategyKind::kScLabels: return "sc_labels";
    case StrategyKind::kScReasoning: return "sc_reasoning";
    case StrategyKind::kCfdLabelsRandom: return "cfd_labels_random";
    case StrategyKind::kCfdTranscriptsRandom: return "cfd_transcripts_random";
    case StrategyKind::kCfdLabelsJudge: return "cfd_labels_judge";
    case StrategyKind::kCfdTranscriptsJudge: return "cfd_transcripts_judge";
  }
  return "baseline";
}

const std::vector<StrategyKind>& all_strategies() {
  static const std::vector<StrategyKind> kAll = {
      StrategyKind::kBaseline,          StrategyKind::kGoldLabels,
      StrategyKind::kScLabels,          StrategyKind::kScReasoning,
      StrategyKind::kCfdLabelsRandom,   StrategyKind::kCfdTranscriptsRandom,
      StrategyKind::kCfdLabelsJudge,    StrategyKind::kCfdTranscriptsJudge};
  return kAll;
}

std::optional<StrategyKind> parse_strategy(std::string_view s) noexcept {
  for (auto k : all_strategies()) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

bool uses_labels(StrategyKind k) noexcept {
  return k == StrategyKind::kGoldLabels || k == StrategyKind::kScLabels ||
         k == StrategyKind::kCfdLabelsRandom || k == StrategyKind::kCfdLabelsJudge;
}

bool uses_responses(StrategyKind k) noexcept {
  return k == StrategyKind::kScReasoning || k == StrategyKind::kCfdTranscriptsRandom ||
         k == StrategyKind::kCfdTranscriptsJudge;
}

const char* to_string(DownstreamKind k) noexcept {
  return k == DownstreamKind::kWellbeing ? "wellbeing" : "sharenting_risk";
}

std::optional<DownstreamKind> parse_downstream_kind(std::string_view s) noexcept {
  if (s == "wellbeing") return DownstreamKind::kWellbeing;
  if (s == "sharenting_risk") return DownstreamKind::kSharentingRisk;
  return std::nullopt;
}

const char* const kSharentingDefinition =
    "Sharenting is when someone shares personal or sensitive information about a specific "
    "child (under 18). It also includes posts that might cause harm to the child or to the "
    "child's family's reputation. Self-disclosure about oneself, even when under 18, is not "
    "considered sharenting.\n"
    "If the age of the person whose information is being shared is unknown but familial or "
    "social roles are mentioned that signal they are a child (e.g., son, daughter, sibling, "
    "nephew, niece, grandchild, schoolchild), assume they are children. If they are aged "
    "between 18 and 24 (inclusive), sharenting applies only when they are described in a child "
    "role within the family or social context.\n\n"
    "Sharenting Risk Levels: \n"
    "A. High risk:\n"
    "Any explicit disclosure of personal data (as defined by GDPR) about a child or any "
    "disclosure that allows inference of health status (e.g., through the disclosure of "
    "medication used, treatments engaged in, or involvement with specific intervention "
    "teams).\n"
    "B. Moderate risk:\n"
    "Disclosure of damaging information that could cause significant damage to the reputation "
    "of a child or family, or disclosure of speculative, generic, or non-specific data relating "
    "to a child that would otherwise be considered GDPR special category data if it were "
    "complete or explicit.\n"
    "C. Low risk:\n"
    "A specific child is mentioned, but no GDPR-protected data is disclosed (except for partial "
    "data on age or location). It also includes disclosures about the child or home life that "
    "are unlikely to cause significant damage to the reputation of the child or family.\n"
    "D. No risk:\n"
    "No sharenting risk about a specific child. For example, posts might be general advice (not "
    "related to a specific child), spam, adverts, or news items.";

const char* const kSharentingLogic =
    "Follow this order strictly:\n"
    "1. Check for any A \xE2\x86\x92 output \"A\".\n"
    "2. If not, check for any B \xE2\x86\x92 output \"B\".\n"
    "3. If not, check for any C \xE2\x86\x92 output \"C\".\n"
    "4. Otherwise output \"D\".\n"
    "5. Use the highest applicable level if multiple apply.\n"
    "6. Except that, if the person being disclosed is 18-24 years old and described in a child "
    "role, classify directly as C (Low risk), regardless of other disclosures (even if A or B "
    "indicators are present).";

const char* const kAuxiliaryHeader =
    "Auxiliary information relevant to the post (do not output this):";

namespace {

constexpr const char* kWellbeingInstructions =
    "Analyze the post carefully and assign a well-being score. Give an explanation before your "
    "final answer.";
constexpr const char* kSharentingInstructions =
    "Analyse the post carefully and assign a sharenting risk level (A, B, C, or D). Give an "
    "explanation before your final answer.";
constexpr const char* kReasoningFormat =
    "Please follow the exact format below.\n\nOutput Format:\nExplanation:\n- Provide "
    "step-by-step reasoning to justify the final decision. Do not skip to the answer "
    "directly.\nAnswer:\n";
constexpr const char* kDownstreamReminder =
    "\n\nYour previous response did not follow the required output format. End with "
    "\"Answer:\" followed by the answer only.";

}  // namespace

DownstreamTask DownstreamTask::wellbeing(std::string scale_text) {
  DownstreamTask t;
  t.kind = DownstreamKind::kWellbeing;
  t.definition_text = std::move(scale_text);
  return t;
}

DownstreamTask DownstreamTask::sharenting() {
  DownstreamTask t;
  t.kind = DownstreamKind::kSharentingRisk;
  t.definition_text = kSharentingDefinition;
  return t;
}

DownstreamTask parse_downstream_task(const json& doc) {
  try {
    auto kind = parse_downstream_kind(doc.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::kConfig, "downstream kind must be wellbeing or sharenting_risk");
    DownstreamTask t = *kind == DownstreamKind::kWellbeing
                           ? DownstreamTask::wellbeing(doc.at("definition_text").get<std::string>())
                           : DownstreamTask::sharenting();
    if (*kind == DownstreamKind::kSharentingRisk && doc.contains("definition_text")) {
      t.definition_text = doc["definition_text"].get<std::string>();
    }
    t.instructions = doc.value("instructions", "");
    t.classification_logic = doc.value("classification_logic", "");
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("downstream task: {}", e.what()));
  }
}

DownstreamTask load_downstream_task(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read {}", path.string()));
  try {
    return parse_downstream_task(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {

std::string baseline_text(const DownstreamTask& task, const Post& post) {
  std::string p;
  if (task.kind == DownstreamKind::kWellbeing) {
    p += "Your goal is to analyze and score the following social media post according to the "
         "well-being scale below.\n\nWell-being Scale:\n";
    p += task.definition_text;
    p += "\n\nInstructions:\n";
    p += task.instructions.empty() ? kWellbeingInstructions : task.instructions;
    p += "\n\nPost:\n";
    p += templates::quoted_post(post);
    p += "\n\n";
    p += kReasoningFormat;
    p += "<score only> ";
    return p;
  }
  p += "You are a Sharenting Risk Classifier. Given a post, classify it into one of four risk "
       "levels \xE2\x80\x94 A, B, C, or D \xE2\x80\x94 based on the degree of information "
       "disclosed about a specific child.\n\n";
  p += task.definition_text;
  p += "\n\nInstructions:\n";
  p += task.instructions.empty() ? kSharentingInstructions : task.instructions;
  p += "\n\nPost:\n";
  p += templates::quoted_post(post);
  p += "\n\nClassification Logic:\n";
  p += task.classification_logic.empty() ? kSharentingLogic : task.classification_logic;
  p += "\n\n";
  p += kReasoningFormat;
  p += "Output only the risk level letter (A, B, C, or D).";
  return p;
}

void check_payload(StrategyKind strategy, const EnrichmentPayload& payload) {
  const bool want_labels = uses_labels(strategy);
  const bool want_responses = uses_responses(strategy);
  if (payload.labels.has_value() != want_labels ||
      payload.responses.has_value() != want_responses) {
    throw Error(ErrorCode::kPayloadMismatch,
                fmt::format("strategy {} needs {}", to_string(strategy),
                            want_labels      ? "labels only"
                            : want_responses ? "response texts only"
                                             : "an empty payload"));
  }
  if ((want_labels || want_responses) && payload.indicator_name.empty()) {
    throw Error(ErrorCode::kPayloadMismatch, "enriched strategies need an indicator name");
  }
}

}  // namespace

PromptBundle build_downstream_prompt(const DownstreamTask& task, const Post& post,
                                     StrategyKind strategy, const EnrichmentPayload& payload) {
  check_payload(strategy, payload);
  std::string p = baseline_text(task, post);
  if (strategy != StrategyKind::kBaseline) {
    p += "\n\n";
    p += kAuxiliaryHeader;
    p += '\n';
    if (payload.labels) {
      std::vector<std::string> names(payload.labels->labels().begin(),
                                     payload.labels->labels().end());
      p += fmt::format("Labels for possible {}: {}", payload.indicator_name,
                       names.empty() ? std::string("none") : text::join(names, ", "));
    } else {
      p += strategy == StrategyKind::kScReasoning
               ? fmt::format("Reasoning on possible {}:\n", payload.indicator_name)
               : fmt::format("Debate transcript on possible {}:\n", payload.indicator_name);
      p += text::join(*payload.responses, "\n\n");
    }
  }
  PromptBundle bundle;
  bundle.purpose = PromptPurpose::kDownstream;
  bundle.messages.push_back({Role::kUser, std::move(p)});
  return bundle;
}

namespace {

// Text of the last "Answer:" block: the inline remainder or the next
// non-empty line.
std::string extract_answer(std::string_view raw) {
  const auto cleaned = text::strip_markdown_bold(raw);
  const auto lines = text::split_lines(cleaned);
  std::optional<std::string> found;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = text::trim(lines[i]);
    while (!line.empty() && line.front() == '#') line = text::trim(line.substr(1));
    if (text::istarts_with(line, "final ")) line = text::trim(line.substr(6));
    if (!text::istarts_with(line, "answer")) continue;
    auto rest = text::trim(line.substr(6));
    if (!rest.empty() && rest.front() != ':') continue;
    if (!rest.empty()) rest = text::trim(rest.substr(1));
    if (!rest.empty()) {
      found = std::string(rest);
      continue;
    }
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      auto next = text::trim(lines[j]);
      if (!next.empty()) {
        found = std::string(next);
        break;
      }
    }
  }
  if (!found) throw Error(ErrorCode::kMissingAnswer, "no 'Answer:' block");
  return *found;
}

std::string strip_decoration(std::string_view s) {
  s = text::trim(s);
  auto junk = [](char c) { return c == '.' || c == '"' || c == '\'' || c == '`' || c == '*'; };
  while (!s.empty() && junk(s.front())) s.remove_prefix(1);
  while (!s.empty() && junk(s.back())) s.remove_suffix(1);
  return std::string(text::trim(s));
}

}  // namespace

int parse_wellbeing(std::string_view raw) {
  const auto answer = strip_decoration(extract_answer(raw));
  if (answer.empty()) throw Error(ErrorCode::kMissingAnswer, "empty answer");
  std::size_t i = 0;
  if (answer[0] == '+' || answer[0] == '-') i = 1;
  if (i == answer.size() ||
      !std::all_of(answer.begin() + static_cast<long>(i), answer.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw Error(ErrorCode::kNonInteger, fmt::format("well-being answer '{}' is not an integer", answer));
  }
  if (answer.size() - i > 3) {
    throw Error(ErrorCode::kOutOfRange, fmt::format("well-being score {} outside [1, 10]", answer));
  }
  const int v = std::stoi(answer);
  if (v < 1 || v > 10) {
    throw Error(ErrorCode::kOutOfRange, fmt::format("well-being score {} outside [1, 10]", v));
  }
  return v;
}

RiskLevel parse_risk(std::string_view raw) {
  const auto answer = strip_decoration(extract_answer(raw));
  if (answer.empty()) throw Error(ErrorCode::kMissingAnswer, "empty answer");
  // "B", "b.", "B (Moderate risk)" and "B. Moderate risk" all name B.
  const bool single = answer.size() == 1 || !std::isalpha(static_cast<unsigned char>(answer[1]));
  if (single) {
    if (auto level = parse_risk_letter(answer[0])) return *level;
  }
  throw Error(ErrorCode::kInvalidLetter, fmt::format("risk answer '{}' is not A, B, C or D", answer));
}

EnrichmentPayload payload_from_transcript(StrategyKind strategy, const DebateTranscript& t,
                                          std::string indicator_name) {
  EnrichmentPayload p;
  p.indicator_name = std::move(indicator_name);
  if (uses_labels(strategy)) {
    p.labels = t.final;
    return p;
  }
  if (!uses_responses(strategy)) return p;
  std::vector<std::string> texts;
  if (strategy == StrategyKind::kScReasoning) {
    for (const auto& s : t.samples) texts.push_back(s.raw_text);
  } else {
    const auto& order = t.rounds.empty() ? std::vector<std::string>{} : t.rounds.front().agent_order;
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (const auto& round : t.rounds) {
        auto it = round.responses.find(order[k]);
        if (it == round.responses.end()) continue;
        texts.push_back(fmt::format("Agent {} (Round {}):\n{}", k + 1, round.round + 1,
                                    it->second.raw_text));
      }
    }
    if (t.decision.judge_response) {
      texts.push_back(fmt::format("Judge:\n{}", t.decision.judge_response->raw_text));
    }
  }
  p.responses = std::move(texts);
  return p;
}

MetricReport evaluate_downstream(const std::map<std::string, DownstreamOutcome>& preds,
                                 const std::map<std::string, DownstreamOutcome>& golds,
                                 DownstreamKind kind, const std::set<std::string>& exclusions) {
  std::vector<std::string> uncovered;
  std::map<std::string, DownstreamOutcome> p;
  std::map<std::string, DownstreamOutcome> g;
  for (const auto& [id, v] : preds) {
    if (exclusions.count(id)) continue;
    auto it = golds.find(id);
    if (it == golds.end()) {
      uncovered.push_back(id);
      continue;
    }
    p.emplace(id, v);
    g.emplace(id, it->second);
  }
  if (!uncovered.empty()) {
    throw Error(ErrorCode::kCoverage,
                fmt::format("{} predictions have no gold value (first: '{}')", uncovered.size(),
                            uncovered.front()));
  }
  if (p.empty()) throw Error(ErrorCode::kCoverage, "no posts left to evaluate");

  MetricReport report;
  if (kind == DownstreamKind::kWellbeing) {
    std::map<std::string, double> pv;
    std::map<std::string, double> gv;
    for (const auto& [id, v] : p) {
      if (!std::holds_alternative<int>(v) || !std::holds_alternative<int>(g.at(id))) {
        throw Error(ErrorCode::kPayloadMismatch, "well-being outcomes must be integer scores");
      }
      pv[id] = std::get<int>(v);
      gv[id] = std::get<int>(g.at(id));
    }
    report.mse = mse(pv, gv);
    report.counts["posts"] = static_cast<long long>(pv.size());
  } else {
    std::map<std::string, LabelSet> pl;
    std::map<std::string, LabelSet> gl;
    auto as_set = [](const DownstreamOutcome& o) {
      if (!std::holds_alternative<RiskLevel>(o)) {
        throw Error(ErrorCode::kPayloadMismatch, "sharenting outcomes must be risk levels");
      }
      return LabelSet{std::string(1, to_char(std::get<RiskLevel>(o)))};
    };
    for (const auto& [id, v] : p) {
      pl[id] = as_set(v);
      gl[id] = as_set(g.at(id));
    }
    report = macro_f1_over(pl, gl, {"A", "B", "C", "D"});
  }
  report.counts["excluded"] = static_cast<long long>(exclusions.size());
  report.counts["unmatched_gold"] = static_cast<long long>(golds.size() - g.size());
  return report;
}

json downstream_record_to_json(const DownstreamRecord& r) {
  json parsed = nullptr;
  if (r.parsed) {
    if (std::holds_alternative<int>(*r.parsed)) {
      parsed = std::get<int>(*r.parsed);
    } else {
      parsed = std::string(1, to_char(std::get<RiskLevel>(*r.parsed)));
    }
  }
  return json{{"id", r.id},
              {"strategy", to_string(r.strategy)},
              {"run_seed", r.run_seed},
              {"raw_text", r.raw_text},
              {"parsed", parsed}};
}

DownstreamRun run_downstream(const std::vector<Post>& posts, const DownstreamTask& task,
                             StrategyKind strategy,
                             const std::map<std::string, EnrichmentPayload>& payloads,
                             const Agent& agent, std::uint64_t run_seed, int run_index,
                             int parallelism) {
  std::vector<DownstreamRecord> records(posts.size());
  std::vector<std::optional<std::string>> errors(posts.size());
  const EnrichmentPayload empty;
  parallel_for(posts.size(), parallelism, [&](std::size_t i) {
    const auto& post = posts[i];
    auto& rec = records[i];
    rec.id = post.id;
    rec.strategy = strategy;
    rec.run_seed = run_seed;
    try {
      const EnrichmentPayload* payload = &empty;
      if (strategy != StrategyKind::kBaseline) {
        auto it = payloads.find(post.id);
        if (it == payloads.end()) {
          throw Error(ErrorCode::kPayloadMismatch, fmt::format("no payload for '{}'", post.id));
        }
        payload = &it->second;
      }
      auto prompt = build_downstream_prompt(task, post, strategy, *payload);
      for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) prompt.append_to_last_user(kDownstreamReminder);
        auto result = generate(agent, prompt, agent.handle.params,
                               {post.id, "downstream", run_index, attempt});
        rec.raw_text = result.text;
        try {
          if (task.kind == DownstreamKind::kWellbeing) {
            rec.parsed = parse_wellbeing(result.text);
          } else {
            rec.parsed = parse_risk(result.text);
          }
          return;
        } catch (const Error& e) {
          errors[i] = e.what();
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfig) throw;
      errors[i] = e.what();
    }
  });
  DownstreamRun run;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (!records[i].parsed) run.failures.push_back({posts[i].id, errors[i].value_or("no output")});
    run.records.push_back(std::move(records[i]));
  }
  std::sort(run.records.begin(), run.records.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return run;
}

}  // namespace labeldebate
