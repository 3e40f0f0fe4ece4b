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

#include "labeldebate/debate.hpp"
#include "labeldebate/metrics.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace labeldebate {

enum class StrategyKind {
  kBaseline,
  kGoldLabels,
  kScLabels,
  kScReasoning,
  kCfdLabelsRandom,
  kCfdTranscriptsRandom,
  kCfdLabelsJudge,
  kCfdTranscriptsJudge,
};

const char* to_string(StrategyKind k) noexcept;
std::optional<StrategyKind> parse_strategy(std::string_view s) noexcept;
bool uses_labels(StrategyKind k) noexcept;
bool uses_responses(StrategyKind k) noexcept;
const std::vector<StrategyKind>& all_strategies();

struct EnrichmentPayload {
  std::optional<LabelSet> labels;
  std::optional<std::vector<std::string>> responses;
  // e.g. "life event(s)"
  std::string indicator_name;
};

enum class DownstreamKind { kWellbeing, kSharentingRisk };

const char* to_string(DownstreamKind k) noexcept;
std::optional<DownstreamKind> parse_downstream_kind(std::string_view s) noexcept;

struct DownstreamTask {
  DownstreamKind kind = DownstreamKind::kWellbeing;
  // Well-being: the scale lines. Sharenting: the definition paragraphs and
  // risk levels.
  std::string definition_text;
  // Optional overrides of the fixed template parts.
  std::string instructions;
  std::string classification_logic;

  static DownstreamTask wellbeing(std::string scale_text);
  static DownstreamTask sharenting();
};

DownstreamTask parse_downstream_task(const nlohmann::json& doc);
DownstreamTask load_downstream_task(const std::filesystem::path& path);

extern const char* const kSharentingDefinition;
extern const char* const kSharentingLogic;
extern const char* const kAuxiliaryHeader;

/// Downstream prompt; every non-baseline strategy appends an auxiliary block
/// after the complete baseline prompt. Throws payload-mismatch when the
/// payload does not have the shape the strategy needs.
PromptBundle build_downstream_prompt(const DownstreamTask& task, const Post& post,
                                     StrategyKind strategy, const EnrichmentPayload& payload);

int parse_wellbeing(std::string_view text);
RiskLevel parse_risk(std::string_view text);

/// Payload for `strategy` built from an annotation transcript. Transcript
/// strategies list every round response as "Agent k (Round r):" blocks, then
/// the judge response when there is one.
EnrichmentPayload payload_from_transcript(StrategyKind strategy, const DebateTranscript& t,
                                          std::string indicator_name);

using DownstreamOutcome = std::variant<int, RiskLevel>;

/// MSE for well-being; 4-class macro-F1 over A-D for sharenting. Excluded
/// posts are dropped first; every remaining prediction needs a gold value.
MetricReport evaluate_downstream(const std::map<std::string, DownstreamOutcome>& preds,
                                 const std::map<std::string, DownstreamOutcome>& golds,
                                 DownstreamKind kind, const std::set<std::string>& exclusions = {});

struct DownstreamRecord {
  std::string id;
  StrategyKind strategy = StrategyKind::kBaseline;
  std::uint64_t run_seed = 0;
  std::string raw_text;
  std::optional<DownstreamOutcome> parsed;
};

nlohmann::json downstream_record_to_json(const DownstreamRecord& r);

struct DownstreamRun {
  std::vector<DownstreamRecord> records;  // sorted by id
  std::vector<PostFailure> failures;
};

/// One downstream pass over `posts`. Unparseable output is retried once with
/// a format reminder; posts that still fail are listed in the failures.
/// `run_index` distinguishes repeated runs in generation requests.
DownstreamRun run_downstream(const std::vector<Post>& posts, const DownstreamTask& task,
                             StrategyKind strategy,
                             const std::map<std::string, EnrichmentPayload>& payloads,
                             const Agent& agent, std::uint64_t run_seed, int run_index,
                             int parallelism);

}  // namespace labeldebate
