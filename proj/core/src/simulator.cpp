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

#include "labeldebate/simulator.hpp"

#include "labeldebate/debate_prompts.hpp"
#include "labeldebate/error.hpp"
#include "labeldebate/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace labeldebate {

using nlohmann::json;

const char* to_string(ConfidenceModel m) noexcept {
  switch (m) {
    case ConfidenceModel::kCalibrated: return "calibrated";
    case ConfidenceModel::kOverconfident: return "overconfident";
    case ConfidenceModel::kUnderconfident: return "underconfident";
    case ConfidenceModel::kConstant: return "constant";
  }
  return "calibrated";
}

double SimulatorProfile::flip(const std::string& category) const {
  auto it = flip_prob.find(category);
  return it == flip_prob.end() ? default_flip_prob : it->second;
}

void SimulatorProfile::validate() const {
  auto check = [](double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kConfig, fmt::format("flip probability for {} outside [0, 1]", what));
    }
  };
  check(default_flip_prob, "default");
  for (const auto& [c, p] : flip_prob) check(p, fmt::format("'{}'", c));
  if (!(noise_sd >= 0.0)) throw Error(ErrorCode::kConfig, "noise_sd must be >= 0");
}

SimulatorProfile simulator_profile_from_json(const json& doc) {
  SimulatorProfile p;
  try {
    if (doc.contains("flip_prob")) {
      const auto& f = doc.at("flip_prob");
      if (f.is_number()) {
        p.default_flip_prob = f.get<double>();
      } else {
        p.flip_prob = f.get<std::map<std::string, double>>();
      }
    }
    p.default_flip_prob = doc.value("default_flip_prob", p.default_flip_prob);
    p.noise_sd = doc.value("noise_sd", 0.0);
    p.seed = doc.value("seed", std::uint64_t{0});
    const auto model = doc.value("confidence_model", std::string("calibrated"));
    if (model == "calibrated") {
      p.confidence_model = ConfidenceModel::kCalibrated;
    } else if (model == "overconfident") {
      p.confidence_model = ConfidenceModel::kOverconfident;
    } else if (model == "underconfident") {
      p.confidence_model = ConfidenceModel::kUnderconfident;
    } else if (model == "constant") {
      p.confidence_model = ConfidenceModel::kConstant;
    } else {
      throw Error(ErrorCode::kConfig, fmt::format("unknown confidence_model '{}'", model));
    }
    const auto debate = doc.value("debate_policy", std::string("follow_confident"));
    if (debate == "follow_confident") {
      p.debate_policy = DebatePolicy::kFollowConfident;
    } else if (debate == "keep") {
      p.debate_policy = DebatePolicy::kKeep;
    } else {
      throw Error(ErrorCode::kConfig, fmt::format("unknown debate_policy '{}'", debate));
    }
    const auto judge = doc.value("judge_policy", std::string("confidence_oracle"));
    if (judge == "confidence_oracle") {
      p.judge_policy = JudgePolicy::kConfidenceOracle;
    } else if (judge == "first_presented") {
      p.judge_policy = JudgePolicy::kFirstPresented;
    } else {
      throw Error(ErrorCode::kConfig, fmt::format("unknown judge_policy '{}'", judge));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("simulator profile: {}", e.what()));
  }
  p.validate();
  return p;
}

std::string simulated_reasoning(const std::string& category, bool verdict) {
  if (verdict) {
    return fmt::format("The post contains explicit evidence that supports {} for the author.",
                       category);
  }
  return fmt::format("Nothing in the post indicates {} as described in the definition.",
                     category);
}

namespace {

double emitted_confidence(const SimulatorProfile& profile, double eps, RandomStream& stream) {
  double c = scale_unit_to_band(1.0 - eps);
  switch (profile.confidence_model) {
    case ConfidenceModel::kCalibrated: break;
    case ConfidenceModel::kOverconfident: c += 2.0; break;
    case ConfidenceModel::kUnderconfident: c -= 2.0; break;
    case ConfidenceModel::kConstant: return 5.5;
  }
  if (profile.noise_sd > 0.0) c += profile.noise_sd * stream.normal();
  c = std::clamp(c, 1.0, 10.0);
  // Emitted text carries two decimals; keep the value consistent with it.
  return std::round(c * 100.0) / 100.0;
}

LabelSet answer_from_verdicts(const std::vector<CategoryJudgement>& judgements,
                              const CategorySet& categories) {
  std::vector<std::string> yes;
  for (const auto& j : judgements) {
    if (j.verdict) yes.push_back(j.category);
  }
  auto answer = normalize_label_set(yes, categories);
  if (answer.empty() && categories.none_label()) answer = LabelSet{*categories.none_label()};
  return answer;
}

AgentResponse response_from_verdicts(std::vector<CategoryJudgement> judgements,
                                     const CategorySet& categories) {
  AgentResponse r;
  r.judgements = std::move(judgements);
  r.answer = answer_from_verdicts(r.judgements, categories);
  return r;
}

std::optional<double> parse_number(std::string_view s) {
  s = text::trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) return std::nullopt;
  return v;
}

// One solution section of a debate or judge prompt.
struct ShownSolution {
  AgentResponse response;
  std::optional<double> overall;
};

ShownSolution parse_shown(std::string_view section, const CategorySet& categories) {
  ShownSolution out;
  section = text::trim(section);
  if (section.starts_with(markers::kOverallConfidence)) {
    auto eol = section.find('\n');
    out.overall = parse_number(section.substr(markers::kOverallConfidence.size(),
                                              eol - markers::kOverallConfidence.size()));
    section = eol == std::string_view::npos ? std::string_view{} : section.substr(eol + 1);
  }
  out.response = parse_catcot_response(section, categories, ConfidenceMode::kOff);
  return out;
}

std::optional<double> category_confidence(const ShownSolution& s, const std::string& category) {
  if (const auto* j = s.response.judgement(category); j && j->reasoning_confidence) {
    return j->reasoning_confidence;
  }
  return s.overall;
}

// Single score for a shown solution: the overall line, else the coarse
// collapse of its fine-grained annotations.
std::optional<double> coarse_of(const ShownSolution& s) {
  if (s.overall) return s.overall;
  ConfidenceVector v;
  for (const auto& j : s.response.judgements) {
    if (!j.reasoning_confidence) return std::nullopt;
    v.per_category[j.category] = *j.reasoning_confidence;
  }
  v.per_answer = s.response.answer_confidences;
  if (v.per_category.empty() || v.per_answer.empty()) return std::nullopt;
  return coarse_from_fine(v);
}

}  // namespace

std::string simulate_response(const LabelSet& gold, const CategorySet& categories,
                              const SimulatorProfile& profile, RandomStream& stream,
                              ConfidenceMode mode) {
  std::vector<CategoryJudgement> judgements;
  judgements.reserve(categories.size());
  for (const auto& c : categories.categories()) {
    const double eps = profile.flip(c.name);
    const bool truth = gold.contains(c.name);
    const bool verdict = stream.bernoulli(eps) ? !truth : truth;
    CategoryJudgement j{c.name, simulated_reasoning(c.name, verdict), verdict, std::nullopt};
    const double conf = emitted_confidence(profile, eps, stream);
    if (mode == ConfidenceMode::kSelfVerbalised) j.reasoning_confidence = conf;
    judgements.push_back(std::move(j));
  }
  auto r = response_from_verdicts(std::move(judgements), categories);
  if (mode == ConfidenceMode::kSelfVerbalised) {
    for (const auto& label : r.answer.labels()) {
      r.answer_confidences[label] = *r.judgement(label)->reasoning_confidence;
    }
  }
  return render_response(r, categories, mode);
}

SimulatorBackend::SimulatorBackend(CategorySet categories,
                                   std::map<std::string, SimulatorProfile> profiles,
                                   std::map<std::string, LabelSet> gold,
                                   std::map<std::string, DownstreamGold> downstream)
    : categories_(std::move(categories)),
      profiles_(std::move(profiles)),
      gold_(std::move(gold)),
      downstream_(std::move(downstream)) {
  for (const auto& [id, p] : profiles_) p.validate();
}

const SimulatorProfile& SimulatorBackend::profile_for(const std::string& agent_id) const {
  auto it = profiles_.find(agent_id);
  if (it == profiles_.end()) {
    throw Error(ErrorCode::kConfig, fmt::format("no simulator profile for agent '{}'", agent_id));
  }
  return it->second;
}

GenerationResult SimulatorBackend::generate(const AgentHandle& agent, const PromptBundle& prompt,
                                            const SamplingParams& params,
                                            const GenerationRequest& request) {
  const auto& profile = profile_for(agent.agent_id);
  RandomStream stream(derive_seed(
      profile.seed, {agent.agent_id, request.post_id, request.stage,
                     std::to_string(request.index), std::to_string(request.attempt)}));
  GenerationResult out;
  switch (prompt.purpose) {
    case PromptPurpose::kDebate:
      out.text = debate_reply(profile, prompt);
      return out;
    case PromptPurpose::kJudge:
      out.text = judge_reply(profile, prompt);
      return out;
    case PromptPurpose::kDownstream:
      out.text = downstream_reply(profile, prompt, request.post_id, stream);
      return out;
    case PromptPurpose::kInitial:
    case PromptPurpose::kInitialConfidence:
      break;
  }
  auto g = gold_.find(request.post_id);
  if (g == gold_.end()) {
    throw Error(ErrorCode::kConfig,
                fmt::format("simulator has no gold labels for post '{}'", request.post_id));
  }
  const auto mode = prompt.purpose == PromptPurpose::kInitialConfidence
                        ? ConfidenceMode::kSelfVerbalised
                        : ConfidenceMode::kOff;
  out.text = simulate_response(g->second, categories_, profile, stream, mode);
  if (params.want_logprobs) {
    // One decision token per category; its spread follows the flip rate.
    std::vector<TokenDistribution> tokens;
    for (const auto& c : categories_.categories()) {
      const double eps = profile.flip(c.name);
      if (eps <= 0.0 || eps >= 1.0) {
        tokens.push_back({1.0});
      } else {
        tokens.push_back({1.0 - eps, eps});
      }
    }
    out.token_distributions = std::move(tokens);
  }
  return out;
}

std::string SimulatorBackend::debate_reply(const SimulatorProfile& profile,
                                           const PromptBundle& prompt) const {
  const std::string_view p = prompt.last_user_text();
  auto own_at = p.find(markers::kOwnSolution);
  auto end_at = p.find(std::string("\n\n").append(markers::kDebateQuestion));
  if (own_at == std::string_view::npos || end_at == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "simulator: unrecognised debate prompt");
  }
  const std::string peer_sep = std::string("\n\n").append(markers::kPeerSolution);
  std::vector<std::string_view> sections;
  auto from = own_at + markers::kOwnSolution.size();
  while (true) {
    auto next = p.find(peer_sep, from);
    if (next == std::string_view::npos || next > end_at) {
      sections.push_back(p.substr(from, end_at - from));
      break;
    }
    sections.push_back(p.substr(from, next - from));
    from = next + peer_sep.size();
  }
  std::vector<ShownSolution> shown;
  for (auto s : sections) shown.push_back(parse_shown(s, categories_));
  const auto& own = shown.front();

  std::vector<CategoryJudgement> judgements;
  for (const auto& c : categories_.categories()) {
    bool verdict = own.response.judgement(c.name)->verdict;
    if (profile.debate_policy == DebatePolicy::kFollowConfident) {
      const auto mine = category_confidence(own, c.name);
      std::optional<double> best;
      for (std::size_t i = 1; i < shown.size(); ++i) {
        const auto* j = shown[i].response.judgement(c.name);
        const auto theirs = category_confidence(shown[i], c.name);
        if (j->verdict == verdict || !mine || !theirs || *theirs <= *mine) continue;
        if (!best || *theirs > *best) best = theirs;
      }
      if (best) verdict = !verdict;
    }
    judgements.push_back({c.name, simulated_reasoning(c.name, verdict), verdict, std::nullopt});
  }
  return render_response(response_from_verdicts(std::move(judgements), categories_), categories_,
                         ConfidenceMode::kOff);
}

std::string SimulatorBackend::judge_reply(const SimulatorProfile& profile,
                                          const PromptBundle& prompt) const {
  const std::string_view p = prompt.last_user_text();
  auto begin = p.find(markers::kTranscript);
  if (begin == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "simulator: unrecognised judge prompt");
  }
  begin += markers::kTranscript.size();
  auto end = p.find(markers::kTranscriptEnd, begin);
  const auto transcript = p.substr(begin, end - begin);

  struct Block {
    int agent = 0;
    int round = 0;
    std::string body;
  };
  std::vector<Block> blocks;
  for (auto line : text::split_lines(transcript)) {
    int agent = 0;
    int round = 0;
    if (line.starts_with("Agent ") && line.ends_with("):") &&
        std::sscanf(std::string(line).c_str(), "Agent %d (Round %d):", &agent, &round) == 2) {
      blocks.push_back({agent, round, {}});
      continue;
    }
    if (blocks.empty()) continue;
    blocks.back().body.append(line).push_back('\n');
  }
  if (blocks.empty()) throw Error(ErrorCode::kInvalidArgument, "simulator: empty transcript");

  // Presented order, first and last rounds per agent.
  std::vector<int> order;
  std::map<int, const Block*> first;
  std::map<int, const Block*> last;
  for (const auto& b : blocks) {
    if (!first.count(b.agent)) {
      order.push_back(b.agent);
      first[b.agent] = &b;
    }
    last[b.agent] = &b;
  }
  int chosen = order.front();
  if (profile.judge_policy == JudgePolicy::kConfidenceOracle) {
    std::optional<double> best;
    for (int a : order) {
      const auto c = coarse_of(parse_shown(first[a]->body, categories_));
      if (c && (!best || *c > *best)) {
        best = c;
        chosen = a;
      }
    }
  }
  auto pick = parse_shown(last[chosen]->body, categories_).response;
  for (auto& j : pick.judgements) j.reasoning_confidence.reset();
  pick.answer_confidences.clear();
  return render_response(pick, categories_, ConfidenceMode::kOff);
}

std::string SimulatorBackend::downstream_reply(const SimulatorProfile& profile,
                                               const PromptBundle& prompt,
                                               const std::string& post_id,
                                               RandomStream& stream) const {
  const auto& p = prompt.last_user_text();
  DownstreamGold gold;
  if (auto it = downstream_.find(post_id); it != downstream_.end()) gold = it->second;
  const double err = profile.default_flip_prob;
  if (p.find("Well-being Scale") != std::string::npos) {
    int score = gold.wellbeing.value_or(5);
    if (stream.bernoulli(err)) {
      const int step = 1 + static_cast<int>(stream.index(2));
      score += stream.bernoulli(0.5) ? step : -step;
    }
    score = std::clamp(score, 1, 10);
    return fmt::format(
        "Explanation:\n- The post was compared against each level of the scale.\nAnswer:\n{}",
        score);
  }
  static constexpr char kLetters[] = {'A', 'B', 'C', 'D'};
  int level = gold.risk ? static_cast<int>(*gold.risk) : 3;
  if (stream.bernoulli(err)) level = (level + 1 + static_cast<int>(stream.index(3))) % 4;
  return fmt::format(
      "Explanation:\n- The post was checked against each risk level in order.\nAnswer:\n{}",
      kLetters[level]);
}

Corpus synthetic_corpus(const CategorySet& categories, std::size_t n_posts, double label_prior,
                        std::uint64_t seed) {
  if (!(label_prior >= 0.0 && label_prior <= 1.0)) {
    throw Error(ErrorCode::kConfig, "label_prior must lie in [0, 1]");
  }
  Corpus corpus;
  corpus.task_id = "synthetic";
  RandomStream stream(derive_seed(seed, {"synthetic-corpus"}));
  for (std::size_t i = 0; i < n_posts; ++i) {
    std::vector<std::string> labels;
    for (const auto& c : categories.categories()) {
      if (categories.none_label() && c.name == *categories.none_label()) continue;
      if (stream.bernoulli(label_prior)) labels.push_back(c.name);
    }
    Post post;
    post.id = fmt::format("p{:04d}", i + 1);
    post.text = fmt::format("Synthetic post number {}.", i + 1);
    post.gold_labels = normalize_label_set(labels, categories);
    if (post.gold_labels->empty() && categories.none_label()) {
      post.gold_labels = LabelSet{*categories.none_label()};
    }
    corpus.posts.push_back(std::move(post));
  }
  return corpus;
}

}  // namespace labeldebate
