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

#pragma once

#include "labeldebate/catcot.hpp"
#include "labeldebate/domain.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace labeldebate {

enum class EntailmentLabel { kEntailment, kNeutral, kContradiction };

const char* to_string(EntailmentLabel label) noexcept;
std::optional<EntailmentLabel> parse_entailment_label(std::string_view s) noexcept;

struct EntailmentVerdict {
  EntailmentLabel label = EntailmentLabel::kNeutral;
  double score = 0.0;  // probability of `label`, in [0, 1]
};

struct TextPair {
  std::string premise;
  std::string hypothesis;
};

/// (premise, hypothesis) -> verdict. Implementations must be deterministic
/// and safe to call concurrently.
class EntailmentScorer {
 public:
  virtual ~EntailmentScorer() = default;

  virtual EntailmentVerdict score(std::string_view premise, std::string_view hypothesis) const = 0;

  // Order-preserving; the default loops over score().
  virtual std::vector<EntailmentVerdict> score_batch(std::span<const TextPair> pairs) const;
};

/// Jaccard overlap of lowercased word sets; entailment iff overlap >= 0.5.
EntailmentVerdict lexical_entailment(std::string_view premise, std::string_view hypothesis);

class LexicalEntailmentScorer final : public EntailmentScorer {
 public:
  EntailmentVerdict score(std::string_view premise, std::string_view hypothesis) const override {
    return lexical_entailment(premise, hypothesis);
  }
};

struct ConfidenceBand {
  double low = 1.0;
  double high = 10.0;
};

struct ConfidenceConfig {
  int n_samples = 5;
  double entailment_threshold = 0.5;
  ConfidenceBand band;

  void validate() const;
};

enum class ConfidenceProvenance { kSelfVerbalised, kSampling, kEntropy };

const char* to_string(ConfidenceProvenance p) noexcept;
std::optional<ConfidenceProvenance> parse_provenance(std::string_view s) noexcept;

/// Per-category and per-answer confidences on the 1-10 band. Entropy-based
/// vectors carry a single response-level value in `overall` instead.
struct ConfidenceVector {
  std::map<std::string, double> per_category;
  std::map<std::string, double> per_answer;
  std::optional<double> overall;
  ConfidenceProvenance provenance = ConfidenceProvenance::kSampling;

  friend bool operator==(const ConfidenceVector&, const ConfidenceVector&) = default;
};

// f(p, q): 1 iff the scorer says `original_step` entails `sampled_step` with
// score >= threshold. The original step is always the premise.
int semantic_equiv(std::string_view original_step, std::string_view sampled_step,
                   const EntailmentScorer& scorer, double threshold);

/// Bidirectional best-match agreement between two step lists, in [0, 1].
/// Both empty -> 1; exactly one empty -> 0.
double agreement_score(const StepList& original, const StepList& sampled,
                       const EntailmentScorer& scorer, double threshold);

/// Mean agreement per category between the original response and each
/// sample. A category missing from a sample counts as an empty step list.
std::map<std::string, double> explanation_confidence(const AgentResponse& original,
                                                     std::span<const AgentResponse> samples,
                                                     const EntailmentScorer& scorer,
                                                     const ConfidenceConfig& config);

/// Fraction of samples whose answer contains each label of `original`.
std::map<std::string, double> answer_confidence(const LabelSet& original,
                                                std::span<const LabelSet> sampled, int n);

double scale_unit_to_band(double x, const ConfidenceBand& band = {});

/// Sampling-based fine-grained confidence: explanation agreement and answer membership,
/// both scaled to the band.
ConfidenceVector sampling_confidence(const AgentResponse& original,
                                     std::span<const AgentResponse> samples,
                                     const EntailmentScorer& scorer,
                                     const ConfidenceConfig& config);

/// (mean per-category + mean per-answer) / 2.
double coarse_from_fine(const ConfidenceVector& v);

// Response-level score: `overall` when set, otherwise coarse_from_fine.
double coarse_confidence(const ConfidenceVector& v);

ConfidenceVector extract_self_verbalised(const AgentResponse& response);

using TokenDistribution = std::vector<double>;

/// Mean over tokens of -sum p ln p over the provided entries.
double mean_token_entropy(std::span<const TokenDistribution> tokens);

/// Min-max inversion over a batch: max entropy -> 1, min -> 10, constant
/// batch -> 5.5.
std::vector<double> entropy_to_band(std::span<const double> entropies,
                                    const ConfidenceBand& band = {});

}  // namespace labeldebate
