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

#include "labeldebate/cli/config.hpp"

#include <atomic>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace labeldebate::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitTotalFailure = 3,
};

/// Live objects built from a RunConfig.
struct Runtime {
  TaskSpec task;
  Corpus corpus;
  std::vector<Agent> agents;
  std::optional<Agent> judge;
  std::unique_ptr<EntailmentScorer> scorer;
};

/// Builds backends and loads the task and corpus. Simulator agents share one
/// backend fed with the corpus gold values.
Runtime build_runtime(const RunConfig& cfg);

Agent make_agent(const AgentSpec& spec, const CategorySet& categories, const Corpus& corpus);

int cmd_enrich(const RunConfig& cfg, std::ostream& log, const std::atomic<bool>* cancel);
int cmd_evaluate(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log, const std::atomic<bool>* cancel);
int cmd_calibrate(const RunConfig& cfg, std::ostream& log);
int cmd_downstream(const RunConfig& cfg, std::ostream& log);

/// Dispatches a subcommand; maps config errors to exit code 2.
int run(std::string_view subcommand, const RunConfig& cfg, std::ostream& log,
        const std::atomic<bool>* cancel = nullptr);

/// Entry point shared by the executable and the tests.
int main_entry(int argc, char** argv, std::ostream& log,
               const std::atomic<bool>* cancel = nullptr);

}  // namespace labeldebate::cli
