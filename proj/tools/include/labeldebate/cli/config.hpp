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

#include <labeldebate/agents.hpp>
#include <labeldebate/debate.hpp>
#include <labeldebate/enrichment.hpp>
#include <labeldebate/nli_client.hpp>
#include <labeldebate/remote_backend.hpp>
#include <labeldebate/simulator.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace labeldebate::cli {

struct BackendSpec {
  BackendKind kind = BackendKind::kScripted;
  std::filesystem::path fixture;        // scripted
  SimulatorProfile profile;             // simulator
  RemoteBackendOptions remote;          // remote
};

struct AgentSpec {
  std::string id;
  std::string display_name;
  BackendSpec backend;
  SamplingParams params;
};

struct ScorerSpec {
  bool remote = false;
  RemoteScorerOptions options;
};

struct DownstreamSpec {
  std::filesystem::path task;
  std::filesystem::path corpus;
  StrategyKind strategy = StrategyKind::kBaseline;
  // Annotation transcripts the payloads come from.
  std::filesystem::path transcripts;
  std::string indicator_name;
  int runs = 1;
  std::set<std::string> exclusions;
  std::optional<AgentSpec> agent;
};

struct SimulateSpec {
  std::size_t posts = 500;
  std::vector<std::uint64_t> seeds = {1};
  double label_prior = 0.3;
  std::vector<std::pair<std::string, SimulatorProfile>> calibration_profiles;
  std::vector<std::pair<std::string, SimulatorProfile>> debate_agents;
  std::optional<SimulatorProfile> judge;
};

/// One reproducible run. Relative paths are resolved against the config
/// file's directory.
struct RunConfig {
  std::filesystem::path task;
  std::filesystem::path corpus;
  std::filesystem::path output_dir = "out";
  std::vector<AgentSpec> agents;
  std::optional<AgentSpec> judge;
  DebateConfig debate;
  ScorerSpec scorer;
  // Inputs of evaluate / calibrate; default to the enrich outputs.
  std::filesystem::path annotations;
  std::filesystem::path transcripts;
  std::optional<DownstreamSpec> downstream;
  std::optional<SimulateSpec> simulate;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// Replaces every ${NAME} with the variable's value; "$$" is a literal "$".
/// Unset variables are config errors.
std::string interpolate_env(std::string_view s, const EnvLookup& env);
nlohmann::json interpolate_env(const nlohmann::json& doc, const EnvLookup& env);

RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                           const EnvLookup& env);
RunConfig load_run_config(const std::filesystem::path& path, const EnvLookup& env,
                          std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace labeldebate::cli
