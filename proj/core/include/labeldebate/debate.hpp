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

#include "labeldebate/agents.hpp"
#include "labeldebate/debate_prompts.hpp"
#include "labeldebate/rng.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace labeldebate {

enum class Method { kSingle, kSelfConsistency, kEnsemble, kDebate };
enum class DecisionProtocol { kRandom, kJudge };

const char* to_string(Method m) noexcept;
const char* to_string(DecisionProtocol d) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;
std::optional<DecisionProtocol> parse_decision(std::string_view s) noexcept;

struct DebateConfig {
  Method method = Method::kDebate;
  int rounds = 1;
  DebateConfidenceMode confidence_mode = DebateConfidenceMode::kNone;
  DecisionProtocol decision = DecisionProtocol::kRandom;
  std::uint64_t seed = 0;
  int parallelism = 1;
  int parse_retries = 2;
  int self_consistency_k = 5;
  ConfidenceConfig confidence;

  void validate() const;
  // Everything that influences results; parallelism is left out.
  nlohmann::json snapshot() const;
};

enum class DecisionKind { kSingle, kConsensus, kRandomTiebreak, kJudge, kMajorityVote };

const char* to_string(DecisionKind k) noexcept;

struct DecisionRecord {
  DecisionKind kind = DecisionKind::kConsensus;
  std::optional<std::string> chosen_agent;
  std::optional<AgentResponse> judge_response;
  std::optional<bool> order_swapped;
  std::optional<double> rng_draw;
  // Judge output was unusable and the random tie-break decided instead.
  bool judge_fallback = false;
};

struct DebateTranscript {
  static constexpr int kSchemaVersion = 1;

  std::string post_id;
  nlohmann::json config;
  std::vector<RoundRecord> rounds;
  DecisionRecord decision;
  LabelSet final;
  // Self-consistency traces.
  std::vector<AgentResponse> samples;
  std::vector<std::string> warnings;
};

/// Everything a debate needs besides the post.
struct DebateSetup {
  const TaskSpec* task = nullptr;
  std::vector<Agent> agents;
  std::optional<Agent> judge;
  // Required for sampling confidence modes.
  const EntailmentScorer* scorer = nullptr;
  DebateConfig config;

  void validate() const;
};

/// Generates and parses one Cat-CoT response, regenerating up to
/// parse_retries times with a format reminder. nullopt when every attempt
/// failed; reasons are appended to `warnings`.
std::optional<AgentResponse> generate_parsed(const Agent& agent, PromptBundle prompt,
                                             GenerationRequest request,
                                             const CategorySet& categories, ConfidenceMode mode,
                                             int parse_retries,
                                             std::vector<std::string>& warnings,
                                             bool want_logprobs = false,
                                             std::optional<std::vector<TokenDistribution>>*
                                                 distributions = nullptr);

/// Round 0: every agent annotates independently. Confidence vectors are
/// attached per the configured mode; entropy mode records raw entropies only
/// (see apply_entropy_bands). Throws annotation-failed when an agent has no
/// parseable response.
RoundRecord initial_round(const DebateSetup& setup, const Post& post,
                          std::vector<std::string>& warnings);

/// Maps raw entropies of all records to overall confidences on the band,
/// batch-wide.
void apply_entropy_bands(std::vector<RoundRecord*> records, const ConfidenceBand& band = {});

bool consensus(const RoundRecord& record);

/// One structured debate round over `history` (round 0 first). Answers come
/// from the last round, confidences from round 0.
RoundRecord debate_round(const std::vector<RoundRecord>& history, const DebateSetup& setup,
                         const Post& post, std::vector<std::string>& warnings);

/// Final label set for a transcript in progress.
std::pair<LabelSet, DecisionRecord> decide(const std::vector<RoundRecord>& rounds,
                                           const DebateSetup& setup, const Post& post,
                                           RandomStream& stream,
                                           std::vector<std::string>& warnings);

/// Random tie-break among the distinct final-round answer sets.
std::pair<LabelSet, DecisionRecord> random_tiebreak(const RoundRecord& final_round,
                                                    RandomStream& stream);

/// Labels present in strictly more than k/2 of `answers`; empty result maps
/// to the none label when defined.
LabelSet majority_vote(const std::vector<LabelSet>& answers, int k,
                       const CategorySet& categories);

std::pair<LabelSet, std::vector<AgentResponse>> self_consistency_annotate(
    const Agent& agent, const TaskSpec& task, const Post& post, int k, const DebateConfig& config,
    std::vector<std::string>& warnings);

std::pair<LabelSet, DecisionRecord> ensemble_annotate(const DebateSetup& setup, const Post& post,
                                                      RandomStream& stream,
                                                      std::vector<std::string>& warnings);

/// Full per-post run: initial round, consensus short-circuit or debate
/// rounds, decision. Entropy mode maps bands over this post only; use
/// run_pipeline for corpus-wide bands.
DebateTranscript annotate_post(const DebateSetup& setup, const Post& post);

struct PostFailure {
  std::string post_id;
  std::string message;
};

struct PipelineOptions {
  // Set to stop picking up new posts; finished posts are kept.
  const std::atomic<bool>* cancel = nullptr;
};

struct PipelineResult {
  // Sorted by post id.
  std::vector<DebateTranscript> transcripts;
  std::map<std::string, LabelSet> annotations;
  std::vector<PostFailure> failures;
  bool cancelled = false;
};

PipelineResult run_pipeline(const Corpus& corpus, const DebateSetup& setup,
                            const PipelineOptions& options = {});

// Runs fn(i) for i in [0, n) on up to `parallelism` threads.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn,
                  const std::atomic<bool>* cancel = nullptr);

// Persistence.
nlohmann::json response_to_json(const AgentResponse& r, const CategorySet& categories);
AgentResponse response_from_json(const nlohmann::json& doc, const CategorySet& categories);
nlohmann::json confidence_to_json(const ConfidenceVector& v);
ConfidenceVector confidence_from_json(const nlohmann::json& doc);
nlohmann::json transcript_to_json(const DebateTranscript& t, const CategorySet& categories);
DebateTranscript transcript_from_json(const nlohmann::json& doc, const CategorySet& categories);

void write_transcripts(std::ostream& out, const std::vector<DebateTranscript>& transcripts,
                       const CategorySet& categories);
std::vector<DebateTranscript> read_transcripts(std::istream& in, const CategorySet& categories);
void save_transcripts(const std::filesystem::path& path,
                      const std::vector<DebateTranscript>& transcripts,
                      const CategorySet& categories);
std::vector<DebateTranscript> load_transcripts(const std::filesystem::path& path,
                                               const CategorySet& categories);

// Annotation records: {"id", "labels"} per line.
void save_annotations(const std::filesystem::path& path,
                      const std::map<std::string, LabelSet>& annotations,
                      const CategorySet& categories);
std::map<std::string, LabelSet> load_annotations(const std::filesystem::path& path,
                                                 const CategorySet& categories);

}  // namespace labeldebate
