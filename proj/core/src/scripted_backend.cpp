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

#include "labeldebate/scripted_backend.hpp"

#include "labeldebate/error.hpp"

#include <fmt/format.h>

#include <fstream>

namespace labeldebate {

using nlohmann::json;

namespace {

std::optional<std::vector<TokenDistribution>> read_distributions(const json& entry) {
  if (!entry.is_object() || !entry.contains("token_distributions")) return std::nullopt;
  return entry.at("token_distributions").get<std::vector<TokenDistribution>>();
}

}  // namespace

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const json& fixture) {
  auto backend = std::make_shared<ScriptedBackend>();
  if (!fixture.is_object()) throw Error(ErrorCode::kConfig, "fixture must be a JSON object");
  try {
    if (fixture.contains("responses")) {
      for (const auto& e : fixture.at("responses")) {
        backend->push(e.at("agent_id").get<std::string>(), e.at("stage_key").get<std::string>(),
                      e.at("text").get<std::string>(), read_distributions(e));
      }
      return backend;
    }
    for (const auto& [agent_id, stages] : fixture.items()) {
      for (const auto& [key, value] : stages.items()) {
        if (value.is_string()) {
          backend->push(agent_id, key, value.get<std::string>());
          continue;
        }
        for (const auto& item : value) {
          if (item.is_string()) {
            backend->push(agent_id, key, item.get<std::string>());
          } else {
            backend->push(agent_id, key, item.at("text").get<std::string>(),
                          read_distributions(item));
          }
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("malformed fixture: {}", e.what()));
  }
  return backend;
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open fixture {}", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, fmt::format("fixture {}: {}", path.string(), e.what()));
  }
  return from_json(doc);
}

void ScriptedBackend::push(const std::string& agent_id, const std::string& stage_key,
                           std::string text,
                           std::optional<std::vector<TokenDistribution>> distributions) {
  std::lock_guard lock(mutex_);
  if (distributions) has_distributions_ = true;
  queues_[{agent_id, stage_key}].push_back({std::move(text), std::move(distributions)});
}

ScriptedBackend::Entry ScriptedBackend::next_entry(const std::string& agent_id,
                                                   const std::string& stage_key) {
  std::lock_guard lock(mutex_);
  auto it = queues_.find({agent_id, stage_key});
  if (it == queues_.end() || it->second.empty()) {
    throw Error(ErrorCode::kFixtureExhausted,
                fmt::format("no scripted response left for agent '{}' at '{}'", agent_id,
                            stage_key));
  }
  Entry e = std::move(it->second.front());
  it->second.pop_front();
  return e;
}

std::string ScriptedBackend::scripted_next(const std::string& agent_id,
                                           const std::string& stage_key) {
  return next_entry(agent_id, stage_key).text;
}

std::size_t ScriptedBackend::remaining(const std::string& agent_id,
                                       const std::string& stage_key) const {
  std::lock_guard lock(mutex_);
  auto it = queues_.find({agent_id, stage_key});
  return it == queues_.end() ? 0 : it->second.size();
}

GenerationResult ScriptedBackend::generate(const AgentHandle& agent, const PromptBundle&,
                                           const SamplingParams& params,
                                           const GenerationRequest& request) {
  auto entry = next_entry(agent.agent_id, request.stage_key());
  GenerationResult out;
  out.text = std::move(entry.text);
  if (params.want_logprobs) out.token_distributions = std::move(entry.distributions);
  return out;
}

bool ScriptedBackend::supports_logprobs() const {
  std::lock_guard lock(mutex_);
  return has_distributions_;
}

}  // namespace labeldebate
