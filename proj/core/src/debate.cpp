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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace labeldebate {

using nlohmann::json;

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::kSingle: return "single";
    case Method::kSelfConsistency: return "self_consistency";
    case Method::kEnsemble: return "ensemble";
    case Method::kDebate: return "debate";
  }
  return "debate";
}

const char* to_string(DecisionProtocol d) noexcept {
  return d == DecisionProtocol::kJudge ? "judge" : "random";
}

std::optional<Method> parse_method(std::string_view s) noexcept {
  for (auto m : {Method::kSingle, Method::kSelfConsistency, Method::kEnsemble, Method::kDebate}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<DecisionProtocol> parse_decision(std::string_view s) noexcept {
  if (s == "random") return DecisionProtocol::kRandom;
  if (s == "judge") return DecisionProtocol::kJudge;
  return std::nullopt;
}

const char* to_string(DecisionKind k) noexcept {
  switch (k) {
    case DecisionKind::kSingle: return "single";
    case DecisionKind::kConsensus: return "consensus";
    case DecisionKind::kRandomTiebreak: return "random_tiebreak";
    case DecisionKind::kJudge: return "judge";
    case DecisionKind::kMajorityVote: return "majority_vote";
  }
  return "consensus";
}

void DebateConfig::validate() const {
  if (rounds < 1) throw Error(ErrorCode::kConfig, "rounds must be >= 1");
  if (parallelism < 1) throw Error(ErrorCode::kConfig, "parallelism must be >= 1");
  if (parse_retries < 0) throw Error(ErrorCode::kConfig, "parse_retries must be >= 0");
  if (self_consistency_k < 1) throw Error(ErrorCode::kConfig, "self_consistency_k must be >= 1");
  confidence.validate();
}

json DebateConfig::snapshot() const {
  return json{{"method", to_string(method)},
              {"rounds", rounds},
              {"confidence_mode", to_string(confidence_mode)},
              {"decision", to_string(decision)},
              {"seed", seed},
              {"parse_retries", parse_retries},
              {"self_consistency_k", self_consistency_k},
              {"n_samples", confidence.n_samples},
              {"entailment_threshold", confidence.entailment_threshold}};
}

void DebateSetup::validate() const {
  if (!task) throw Error(ErrorCode::kConfig, "no task spec");
  config.validate();
  if (agents.empty()) throw Error(ErrorCode::kConfig, "no agents configured");
  std::set<std::string> ids;
  for (const auto& a : agents) {
    if (!a.backend) throw Error(ErrorCode::kConfig, fmt::format("agent '{}' has no backend", a.id()));
    if (!ids.insert(a.id()).second) {
      throw Error(ErrorCode::kConfig, fmt::format("duplicate agent id '{}'", a.id()));
    }
    a.handle.params.validate();
  }
  const bool multi = config.method == Method::kEnsemble || config.method == Method::kDebate;
  if (multi && agents.size() < 2) {
    throw Error(ErrorCode::kConfig, fmt::format("method {} needs at least two agents",
                                                to_string(config.method)));
  }
  if (multi && config.decision == DecisionProtocol::kJudge && !judge) {
    throw Error(ErrorCode::kConfig, "judge decision protocol needs a judge agent");
  }
  if (uses_sampling(config.confidence_mode) && !scorer) {
    throw Error(ErrorCode::kConfig, "sampling confidence needs an entailment scorer");
  }
}

std::optional<AgentResponse> generate_parsed(
    const Agent& agent, PromptBundle prompt, GenerationRequest request,
    const CategorySet& categories, ConfidenceMode mode, int parse_retries,
    std::vector<std::string>& warnings, bool want_logprobs,
    std::optional<std::vector<TokenDistribution>>* distributions) {
  auto params = agent.handle.params;
  params.want_logprobs = want_logprobs;
  for (int attempt = 0; attempt <= parse_retries; ++attempt) {
    request.attempt = attempt;
    if (attempt == 1) prompt.append_to_last_user(kFormatReminder);
    GenerationResult result;
    try {
      result = generate(agent, prompt, params, request);
    } catch (const Error& e) {
      warnings.push_back(fmt::format("{} {}: {}", agent.id(), request.stage_key(), e.what()));
      if (e.code() == ErrorCode::kConfig) throw;
      return std::nullopt;
    }
    for (auto& w : result.warnings) {
      warnings.push_back(fmt::format("{} {}: {}", agent.id(), request.stage_key(), w));
    }
    try {
      auto r = parse_catcot_response(result.text, categories, mode);
      r.agent_id = agent.id();
      if (distributions) *distributions = std::move(result.token_distributions);
      return r;
    } catch (const Error& e) {
      warnings.push_back(fmt::format("{} {} attempt {}: {}", agent.id(), request.stage_key(),
                                     attempt, e.what()));
    }
  }
  return std::nullopt;
}

namespace {

const Agent& agent_by_id(const DebateSetup& setup, const std::string& id) {
  for (const auto& a : setup.agents) {
    if (a.id() == id) return a;
  }
  throw Error(ErrorCode::kConfig, fmt::format("unknown agent '{}'", id));
}

// Overall score of a fine vector; the category mean when the answer is empty.
double overall_of(const ConfidenceVector& v) {
  if (v.per_answer.empty() && !v.per_category.empty()) {
    double s = 0.0;
    for (const auto& [c, x] : v.per_category) s += x;
    return s / static_cast<double>(v.per_category.size());
  }
  return coarse_from_fine(v);
}

std::vector<AgentResponse> sample_responses(const Agent& agent, const PromptBundle& prompt,
                                            const Post& post, const DebateSetup& setup,
                                            std::vector<std::string>& warnings) {
  const auto& cs = setup.task->category_set;
  const int n = setup.config.confidence.n_samples;
  std::vector<AgentResponse> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    auto r = generate_parsed(agent, prompt, {post.id, "r0", i, 0}, cs, ConfidenceMode::kOff,
                             setup.config.parse_retries, warnings);
    out.push_back(r ? std::move(*r) : AgentResponse{});
  }
  return out;
}

// Confidence vector whose answer entries cover `response`'s answer. Labels
// added after round 0 borrow their category's reasoning confidence.
ConfidenceVector carry_confidence(const ConfidenceVector& v, const AgentResponse& response) {
  ConfidenceVector out = v;
  if (v.per_category.empty()) return out;
  out.per_answer.clear();
  for (const auto& label : response.answer.labels()) {
    if (auto it = v.per_answer.find(label); it != v.per_answer.end()) {
      out.per_answer[label] = it->second;
    } else if (auto c = v.per_category.find(label); c != v.per_category.end()) {
      out.per_answer[label] = c->second;
    }
  }
  return out;
}

}  // namespace

RoundRecord initial_round(const DebateSetup& setup, const Post& post,
                          std::vector<std::string>& warnings) {
  const auto& cfg = setup.config;
  const auto& cs = setup.task->category_set;
  const auto mode = cfg.confidence_mode;
  const auto parse_mode =
      uses_self_verbalised(mode) ? ConfidenceMode::kSelfVerbalised : ConfidenceMode::kOff;
  const bool entropy = mode == DebateConfidenceMode::kCoarseEntropy;
  const auto prompt = build_catcot_prompt(*setup.task, post, parse_mode);

  RoundRecord rec;
  rec.round = 0;
  for (const auto& agent : setup.agents) {
    rec.agent_order.push_back(agent.id());
    std::optional<std::vector<TokenDistribution>> dist;
    auto r = generate_parsed(agent, prompt, {post.id, "r0", 0, 0}, cs, parse_mode,
                             cfg.parse_retries, warnings, entropy, &dist);
    if (!r) {
      throw Error(ErrorCode::kAnnotationFailed,
                  fmt::format("agent '{}' produced no parseable response for post '{}'",
                              agent.id(), post.id));
    }
    r->round = 0;
    switch (mode) {
      case DebateConfidenceMode::kNone: break;
      case DebateConfidenceMode::kFineSelf:
      case DebateConfidenceMode::kCoarseSelf: {
        auto v = extract_self_verbalised(*r);
        if (mode == DebateConfidenceMode::kCoarseSelf) v.overall = overall_of(v);
        rec.confidences[agent.id()] = std::move(v);
        break;
      }
      case DebateConfidenceMode::kFineSampling:
      case DebateConfidenceMode::kCoarseSampling: {
        const auto samples = sample_responses(agent, prompt, post, setup, warnings);
        auto v = sampling_confidence(*r, samples, *setup.scorer, cfg.confidence);
        if (mode == DebateConfidenceMode::kCoarseSampling) v.overall = overall_of(v);
        rec.confidences[agent.id()] = std::move(v);
        break;
      }
      case DebateConfidenceMode::kCoarseEntropy:
        if (dist && !dist->empty()) {
          rec.entropies[agent.id()] = mean_token_entropy(*dist);
        } else {
          warnings.push_back(fmt::format("{}: no token probabilities for entropy", agent.id()));
        }
        break;
    }
    rec.responses[agent.id()] = std::move(*r);
  }
  return rec;
}

void apply_entropy_bands(std::vector<RoundRecord*> records, const ConfidenceBand& band) {
  std::vector<std::pair<RoundRecord*, std::string>> keys;
  std::vector<double> values;
  for (auto* rec : records) {
    for (const auto& [agent, e] : rec->entropies) {
      keys.emplace_back(rec, agent);
      values.push_back(e);
    }
  }
  if (values.empty()) return;
  const auto banded = entropy_to_band(values, band);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    ConfidenceVector v;
    v.provenance = ConfidenceProvenance::kEntropy;
    v.overall = banded[i];
    keys[i].first->confidences[keys[i].second] = std::move(v);
  }
}

bool consensus(const RoundRecord& record) {
  if (record.responses.empty()) return false;
  const auto& first = record.responses.begin()->second.answer;
  return std::all_of(record.responses.begin(), record.responses.end(),
                     [&](const auto& kv) { return kv.second.answer == first; });
}

RoundRecord debate_round(const std::vector<RoundRecord>& history, const DebateSetup& setup,
                         const Post& post, std::vector<std::string>& warnings) {
  if (history.empty()) throw Error(ErrorCode::kPrecondition, "debate round needs a prior round");
  const auto& prior = history.back();
  const auto& first = history.front();
  if (consensus(prior)) {
    throw Error(ErrorCode::kPrecondition, "agents already agree; no debate round is needed");
  }
  const auto& cs = setup.task->category_set;
  const auto mode = setup.config.confidence_mode;

  // Round-0 confidences, re-keyed onto the prior round's answers.
  std::map<std::string, ConfidenceVector> carried;
  for (const auto& id : prior.agent_order) {
    if (const auto* v = first.confidence(id)) carried[id] = carry_confidence(*v, prior.responses.at(id));
  }
  auto conf_of = [&](const std::string& id) -> const ConfidenceVector* {
    auto it = carried.find(id);
    return it == carried.end() ? nullptr : &it->second;
  };

  RoundRecord rec;
  rec.round = prior.round + 1;
  rec.agent_order = prior.agent_order;
  const auto stage = fmt::format("r{}", rec.round);
  for (const auto& id : prior.agent_order) {
    const auto& agent = agent_by_id(setup, id);
    const auto& own = prior.responses.at(id);
    std::vector<std::pair<const AgentResponse*, const ConfidenceVector*>> peers;
    for (const auto& other : prior.agent_order) {
      if (other != id) peers.emplace_back(&prior.responses.at(other), conf_of(other));
    }
    const auto prompt = build_debate_prompt(*setup.task, post, own, conf_of(id), peers, mode);
    auto r = generate_parsed(agent, prompt, {post.id, stage, 0, 0}, cs, ConfidenceMode::kOff,
                             setup.config.parse_retries, warnings);
    if (r) {
      r->round = rec.round;
      rec.responses[id] = std::move(*r);
    } else {
      AgentResponse kept = own;
      kept.round = rec.round;
      rec.responses[id] = std::move(kept);
      rec.carried_forward.insert(id);
      warnings.push_back(fmt::format("{} {}: carried forward its round-{} response", id, stage,
                                     prior.round));
    }
  }
  return rec;
}

std::pair<LabelSet, DecisionRecord> random_tiebreak(const RoundRecord& final_round,
                                                    RandomStream& stream) {
  std::set<LabelSet> distinct;
  for (const auto& [id, r] : final_round.responses) distinct.insert(r.answer);
  if (distinct.empty()) throw Error(ErrorCode::kPrecondition, "no answers to choose from");
  const std::vector<LabelSet> candidates(distinct.begin(), distinct.end());
  const double u = stream.uniform();
  const auto idx = std::min(candidates.size() - 1,
                            static_cast<std::size_t>(std::floor(u * static_cast<double>(candidates.size()))));
  DecisionRecord rec;
  rec.kind = DecisionKind::kRandomTiebreak;
  rec.rng_draw = u;
  for (const auto& id : final_round.agent_order) {
    auto it = final_round.responses.find(id);
    if (it != final_round.responses.end() && it->second.answer == candidates[idx]) {
      rec.chosen_agent = id;
      break;
    }
  }
  return {candidates[idx], std::move(rec)};
}

std::pair<LabelSet, DecisionRecord> decide(const std::vector<RoundRecord>& rounds,
                                           const DebateSetup& setup, const Post& post,
                                           RandomStream& stream,
                                           std::vector<std::string>& warnings) {
  if (rounds.empty()) throw Error(ErrorCode::kPrecondition, "no rounds to decide on");
  const auto& last = rounds.back();
  if (consensus(last)) {
    DecisionRecord rec;
    rec.kind = DecisionKind::kConsensus;
    return {last.responses.begin()->second.answer, rec};
  }
  if (setup.config.decision == DecisionProtocol::kRandom) return random_tiebreak(last, stream);
  if (!setup.judge) throw Error(ErrorCode::kConfig, "judge decision protocol needs a judge agent");

  const double u = stream.uniform();
  const bool swapped = u < 0.5;
  auto order = last.agent_order;
  if (swapped) std::reverse(order.begin(), order.end());
  const auto prompt =
      build_judge_prompt(*setup.task, post, rounds, order, setup.config.confidence_mode);
  auto r = generate_parsed(*setup.judge, prompt, {post.id, "judge", 0, 0},
                           setup.task->category_set, ConfidenceMode::kOff,
                           setup.config.parse_retries, warnings);
  if (!r) {
    auto fallback = random_tiebreak(last, stream);
    fallback.second.judge_fallback = true;
    warnings.push_back("judge output unusable; decided by random tie-break");
    return fallback;
  }
  r->round = last.round + 1;
  DecisionRecord rec;
  rec.kind = DecisionKind::kJudge;
  rec.chosen_agent = setup.judge->id();
  rec.order_swapped = swapped;
  rec.rng_draw = u;
  LabelSet final = r->answer;
  rec.judge_response = std::move(*r);
  return {std::move(final), std::move(rec)};
}

LabelSet majority_vote(const std::vector<LabelSet>& answers, int k,
                       const CategorySet& categories) {
  std::map<std::string, int> counts;
  for (const auto& a : answers) {
    for (const auto& label : a.labels()) ++counts[label];
  }
  std::vector<std::string> kept;
  for (const auto& [label, n] : counts) {
    if (2 * n > k) kept.push_back(label);
  }
  auto out = normalize_label_set(kept, categories);
  if (out.empty() && categories.none_label()) out = LabelSet{*categories.none_label()};
  return out;
}

std::pair<LabelSet, std::vector<AgentResponse>> self_consistency_annotate(
    const Agent& agent, const TaskSpec& task, const Post& post, int k, const DebateConfig& config,
    std::vector<std::string>& warnings) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "self-consistency needs k >= 1");
  const auto prompt = build_catcot_prompt(task, post, ConfidenceMode::kOff);
  std::vector<AgentResponse> parsed;
  for (int i = 1; i <= k; ++i) {
    auto r = generate_parsed(agent, prompt, {post.id, "sc", i, 0}, task.category_set,
                             ConfidenceMode::kOff, config.parse_retries, warnings);
    if (r) parsed.push_back(std::move(*r));
  }
  if (parsed.empty()) {
    throw Error(ErrorCode::kAnnotationFailed,
                fmt::format("no parseable self-consistency sample for post '{}'", post.id));
  }
  std::vector<LabelSet> answers;
  for (const auto& r : parsed) answers.push_back(r.answer);
  return {majority_vote(answers, k, task.category_set), std::move(parsed)};
}

std::pair<LabelSet, DecisionRecord> ensemble_annotate(const DebateSetup& setup, const Post& post,
                                                      RandomStream& stream,
                                                      std::vector<std::string>& warnings) {
  auto r0 = initial_round(setup, post, warnings);
  if (setup.config.confidence_mode == DebateConfidenceMode::kCoarseEntropy) {
    apply_entropy_bands({&r0}, setup.config.confidence.band);
  }
  return decide({r0}, setup, post, stream, warnings);
}

}  // namespace labeldebate
