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

#include "labeldebate/confidence.hpp"

#include "labeldebate/error.hpp"
#include "labeldebate/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

namespace labeldebate {

const char* to_string(EntailmentLabel label) noexcept {
  switch (label) {
    case EntailmentLabel::kEntailment: return "entailment";
    case EntailmentLabel::kNeutral: return "neutral";
    case EntailmentLabel::kContradiction: return "contradiction";
  }
  return "neutral";
}

std::optional<EntailmentLabel> parse_entailment_label(std::string_view s) noexcept {
  if (text::iequals(s, "entailment")) return EntailmentLabel::kEntailment;
  if (text::iequals(s, "neutral")) return EntailmentLabel::kNeutral;
  if (text::iequals(s, "contradiction")) return EntailmentLabel::kContradiction;
  return std::nullopt;
}

std::vector<EntailmentVerdict> EntailmentScorer::score_batch(
    std::span<const TextPair> pairs) const {
  std::vector<EntailmentVerdict> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(score(p.premise, p.hypothesis));
  return out;
}

namespace {

std::set<std::string> word_set(std::string_view s) {
  std::set<std::string> words;
  std::string current;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      words.insert(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.insert(std::move(current));
  return words;
}

}  // namespace

EntailmentVerdict lexical_entailment(std::string_view premise, std::string_view hypothesis) {
  const auto a = word_set(premise);
  const auto b = word_set(hypothesis);
  if (a.empty() && b.empty()) return {EntailmentLabel::kNeutral, 0.0};
  std::size_t shared = 0;
  for (const auto& w : a) shared += b.count(w);
  const double jaccard =
      static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
  return {jaccard >= 0.5 ? EntailmentLabel::kEntailment : EntailmentLabel::kNeutral, jaccard};
}

void ConfidenceConfig::validate() const {
  if (n_samples < 1) throw Error(ErrorCode::kConfig, "n_samples must be >= 1");
  if (!(entailment_threshold > 0.0 && entailment_threshold < 1.0)) {
    throw Error(ErrorCode::kConfig, "entailment_threshold must lie in (0, 1)");
  }
  if (!(band.low < band.high)) throw Error(ErrorCode::kConfig, "band low must be below high");
}

const char* to_string(ConfidenceProvenance p) noexcept {
  switch (p) {
    case ConfidenceProvenance::kSelfVerbalised: return "self_verbalised";
    case ConfidenceProvenance::kSampling: return "sampling";
    case ConfidenceProvenance::kEntropy: return "entropy";
  }
  return "sampling";
}

std::optional<ConfidenceProvenance> parse_provenance(std::string_view s) noexcept {
  if (s == "self_verbalised") return ConfidenceProvenance::kSelfVerbalised;
  if (s == "sampling") return ConfidenceProvenance::kSampling;
  if (s == "entropy") return ConfidenceProvenance::kEntropy;
  return std::nullopt;
}

int semantic_equiv(std::string_view original_step, std::string_view sampled_step,
                   const EntailmentScorer& scorer, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "entailment threshold must lie in (0, 1)");
  }
  const auto v = scorer.score(original_step, sampled_step);
  return v.label == EntailmentLabel::kEntailment && v.score >= threshold ? 1 : 0;
}

double agreement_score(const StepList& original, const StepList& sampled,
                       const EntailmentScorer& scorer, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "entailment threshold must lie in (0, 1)");
  }
  const auto p_count = original.size();
  const auto q_count = sampled.size();
  if (p_count == 0 && q_count == 0) return 1.0;
  if (p_count == 0 || q_count == 0) return 0.0;

  std::vector<TextPair> pairs;
  pairs.reserve(p_count * q_count);
  for (const auto& p : original) {
    for (const auto& q : sampled) pairs.push_back({p, q});
  }
  const auto verdicts = scorer.score_batch(pairs);
  if (verdicts.size() != pairs.size()) {
    throw Error(ErrorCode::kScorerFailure, "scorer returned a batch of the wrong size");
  }

  std::vector<int> row_max(p_count, 0);
  std::vector<int> col_max(q_count, 0);
  for (std::size_t p = 0; p < p_count; ++p) {
    for (std::size_t q = 0; q < q_count; ++q) {
      const auto& v = verdicts[p * q_count + q];
      const int f = v.label == EntailmentLabel::kEntailment && v.score >= threshold ? 1 : 0;
      row_max[p] = std::max(row_max[p], f);
      col_max[q] = std::max(col_max[q], f);
    }
  }
  const int matched = std::accumulate(row_max.begin(), row_max.end(), 0) +
                      std::accumulate(col_max.begin(), col_max.end(), 0);
  return static_cast<double>(matched) / static_cast<double>(p_count + q_count);
}

std::map<std::string, double> explanation_confidence(const AgentResponse& original,
                                                     std::span<const AgentResponse> samples,
                                                     const EntailmentScorer& scorer,
                                                     const ConfidenceConfig& config) {
  config.validate();
  if (static_cast<int>(samples.size()) != config.n_samples) {
    throw Error(ErrorCode::kPrecondition,
                fmt::format("expected {} samples, got {}", config.n_samples, samples.size()));
  }
  for (const auto& s : samples) {
    for (const auto& j : s.judgements) {
      if (!original.judgement(j.category)) {
        throw Error(ErrorCode::kCategoryMismatch,
                    fmt::format("sample judges unknown category '{}'", j.category));
      }
    }
  }
  std::map<std::string, double> out;
  for (const auto& j : original.judgements) {
    const auto base = segment_steps(j.reasoning);
    double total = 0.0;
    for (const auto& s : samples) {
      const auto* other = s.judgement(j.category);
      const auto steps = other ? segment_steps(other->reasoning) : StepList{};
      total += agreement_score(base, steps, scorer, config.entailment_threshold);
    }
    out[j.category] = total / static_cast<double>(samples.size());
  }
  return out;
}

std::map<std::string, double> answer_confidence(const LabelSet& original,
                                                std::span<const LabelSet> sampled, int n) {
  if (n < 1 || static_cast<int>(sampled.size()) != n) {
    throw Error(ErrorCode::kPrecondition,
                fmt::format("expected {} sampled answers, got {}", n, sampled.size()));
  }
  std::map<std::string, double> out;
  for (const auto& label : original.labels()) {
    int hits = 0;
    for (const auto& s : sampled) hits += s.contains(label) ? 1 : 0;
    out[label] = static_cast<double>(hits) / static_cast<double>(n);
  }
  return out;
}

double scale_unit_to_band(double x, const ConfidenceBand& band) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kOutOfDomain, fmt::format("{} is outside [0, 1]", x));
  }
  return band.low + x * (band.high - band.low);
}

ConfidenceVector sampling_confidence(const AgentResponse& original,
                                     std::span<const AgentResponse> samples,
                                     const EntailmentScorer& scorer,
                                     const ConfidenceConfig& config) {
  ConfidenceVector v;
  v.provenance = ConfidenceProvenance::kSampling;
  for (const auto& [category, agr] : explanation_confidence(original, samples, scorer, config)) {
    v.per_category[category] = scale_unit_to_band(agr, config.band);
  }
  std::vector<LabelSet> answers;
  answers.reserve(samples.size());
  for (const auto& s : samples) answers.push_back(s.answer);
  for (const auto& [label, frac] :
       answer_confidence(original.answer, answers, static_cast<int>(samples.size()))) {
    v.per_answer[label] = scale_unit_to_band(frac, config.band);
  }
  return v;
}

namespace {

double mean_of(const std::map<std::string, double>& m) {
  double total = 0.0;
  for (const auto& [_, v] : m) total += v;
  return total / static_cast<double>(m.size());
}

}  // namespace

double coarse_from_fine(const ConfidenceVector& v) {
  if (v.per_category.empty() || v.per_answer.empty()) {
    throw Error(ErrorCode::kEmptyComponent,
                "coarse confidence needs at least one category and one answer entry");
  }
  return (mean_of(v.per_category) + mean_of(v.per_answer)) / 2.0;
}

double coarse_confidence(const ConfidenceVector& v) {
  if (v.overall) return *v.overall;
  return coarse_from_fine(v);
}

ConfidenceVector extract_self_verbalised(const AgentResponse& response) {
  ConfidenceVector v;
  v.provenance = ConfidenceProvenance::kSelfVerbalised;
  for (const auto& j : response.judgements) {
    if (!j.reasoning_confidence) {
      throw Error(ErrorCode::kMissingConfidence,
                  fmt::format("no confidence for category '{}'", j.category));
    }
    v.per_category[j.category] = *j.reasoning_confidence;
  }
  for (const auto& label : response.answer.labels()) {
    auto it = response.answer_confidences.find(label);
    if (it == response.answer_confidences.end()) {
      throw Error(ErrorCode::kMissingConfidence,
                  fmt::format("no confidence for answer label '{}'", label));
    }
    v.per_answer[label] = it->second;
  }
  return v;
}

double mean_token_entropy(std::span<const TokenDistribution> tokens) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptySequence, "no tokens");
  double total = 0.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    double mass = 0.0;
    double h = 0.0;
    for (double p : tokens[t]) {
      if (!(p > 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("token {} has probability {} outside (0, 1]", t, p));
      }
      mass += p;
      h -= p * std::log(p);
    }
    if (mass > 1.0 + 1e-6) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("token {} probabilities sum to {} > 1", t, mass));
    }
    total += h;
  }
  return total / static_cast<double>(tokens.size());
}

std::vector<double> entropy_to_band(std::span<const double> entropies,
                                    const ConfidenceBand& band) {
  std::vector<double> out;
  if (entropies.empty()) return out;
  const auto [lo, hi] = std::minmax_element(entropies.begin(), entropies.end());
  const double min_e = *lo;
  const double max_e = *hi;
  out.reserve(entropies.size());
  for (double e : entropies) {
    if (max_e == min_e) {
      out.push_back((band.low + band.high) / 2.0);
    } else {
      out.push_back(band.high - (e - min_e) / (max_e - min_e) * (band.high - band.low));
    }
  }
  return out;
}

}  // namespace labeldebate
