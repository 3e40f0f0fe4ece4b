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

#include <doctest.h>

#include "fixtures.hpp"

#include <labeldebate/cli/app.hpp>
#include <labeldebate/cli/config.hpp>
#include <labeldebate/error.hpp>
#include <labeldebate/simulator.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace labeldebate;
using namespace labeldebate::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

std::string config_error(const json& doc, const fs::path& base) {
  try {
    parse_run_config(doc, base, fake_env({}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

// Scratch directory with a small synthetic corpus for the life-events task.
struct Workspace {
  fs::path dir;
  fs::path task;
  fs::path corpus;

  explicit Workspace(const std::string& name) {
    dir = fs::temp_directory_path() / ("labeldebate_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    task = testing_support::data_dir() / "tasks" / "life_events.json";
    const auto spec = testing_support::load_task("life_events");
    auto c = synthetic_corpus(spec.category_set, 12, 0.3, 3);
    corpus = dir / "corpus.jsonl";
    save_corpus(corpus, c, spec.category_set);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const json& doc) const {
    const auto p = dir / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  json enrich_doc() const {
    return {{"task", task.string()},
            {"corpus", corpus.string()},
            {"output_dir", (dir / "out").string()},
            {"method", "debate"},
            {"decision", "random"},
            {"confidence_mode", "fine_self"},
            {"seed", 5},
            {"agents",
             {{{"id", "a"}, {"backend", {{"kind", "simulator"}, {"profile", {{"flip_prob", 0.1}}}}}},
              {{"id", "b"},
               {"backend", {{"kind", "simulator"}, {"profile", {{"flip_prob", 0.3}, {"seed", 2}}}}}}}}};
  }
};

int invoke(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::vector<std::string> storage = {"labeldebate"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  std::ostringstream log;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), log);
  if (out) *out = log.str();
  return code;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_CASE("environment interpolation") {
  const auto env = fake_env({{"KEY", "secret"}, {"HOST", "h"}});
  const auto interp = [&](std::string_view s) { return interpolate_env(s, env); };
  CHECK(interp("Bearer ${KEY}") == "Bearer secret");
  CHECK(interp("http://${HOST}:80/${KEY}") == "http://h:80/secret");
  CHECK(interp("cost $$5") == "cost $5");
  CHECK(interp("plain") == "plain");
  try {
    interp("${MISSING}");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("MISSING") != std::string::npos);
  }
  const json doc = {{"a", "${KEY}"}, {"b", {1, "${HOST}"}}, {"c", 3}};
  const auto out = interpolate_env(doc, env);
  CHECK(out["a"] == "secret");
  CHECK(out["b"][1] == "h");
  CHECK(out["c"] == 3);
}

TEST_CASE("config errors name the field") {
  Workspace ws("fields");
  auto doc = ws.enrich_doc();

  auto bad = doc;
  bad["method"] = "vote";
  CHECK(config_error(bad, ws.dir).find("'method'") != std::string::npos);

  bad = doc;
  bad["agents"][1]["backend"]["kind"] = "teleport";
  CHECK(config_error(bad, ws.dir).find("agents[1].backend.kind") != std::string::npos);

  bad = doc;
  bad["agents"][1]["id"] = "a";
  CHECK(config_error(bad, ws.dir).find("duplicate agent id") != std::string::npos);

  bad = doc;
  bad["rounds"] = "two";
  CHECK(config_error(bad, ws.dir).find("'rounds'") != std::string::npos);

  bad = doc;
  bad["task"] = (ws.dir / "nope.json").string();
  CHECK(config_error(bad, ws.dir).find("'task'") != std::string::npos);

  bad = doc;
  bad.erase("task");
  CHECK(config_error(bad, ws.dir).find("'task': is required") != std::string::npos);

  const auto cfg = parse_run_config(doc, ws.dir, fake_env({}));
  CHECK(cfg.agents.size() == 2);
  CHECK(cfg.debate.seed == 5);
  CHECK(cfg.agents[1].backend.profile.default_flip_prob == doc["agents"][1]["backend"]["profile"]["flip_prob"]);
}

TEST_CASE("relative paths resolve against the config directory") {
  Workspace ws("relative");
  auto doc = ws.enrich_doc();
  fs::copy_file(ws.task, ws.dir / "task.json");
  doc["task"] = "task.json";
  doc["corpus"] = "corpus.jsonl";
  doc["output_dir"] = "results";
  const auto path = ws.write("run.json", doc);
  const auto cfg = load_run_config(path, fake_env({}), 99);
  CHECK(cfg.task == ws.dir / "task.json");
  CHECK(cfg.output_dir == ws.dir / "results");
  CHECK(cfg.debate.seed == 99);
}

TEST_CASE("enrich then evaluate") {
  Workspace ws("enrich");
  const auto path = ws.write("run.json", ws.enrich_doc());
  std::string log;
  REQUIRE(invoke({"enrich", "-c", path.string()}, &log) == kExitOk);
  CHECK(log.find("12/12 posts annotated") != std::string::npos);
  CHECK(fs::exists(ws.dir / "out" / "transcripts.jsonl"));
  CHECK(fs::exists(ws.dir / "out" / "annotations.jsonl"));
  const auto report = read_json(ws.dir / "out" / "enrich_report.json");
  CHECK(report["annotated"] == 12);
  CHECK(report["failed"] == 0);

  REQUIRE(invoke({"evaluate", "-c", path.string()}, &log) == kExitOk);
  const auto eval = read_json(ws.dir / "out" / "evaluate_report.json");
  CHECK(eval["macro_f1"].get<double>() >= 0.0);
  CHECK(eval["macro_f1"].get<double>() <= 1.0);
  CHECK(eval.contains("fsr"));
  CHECK(eval["counts"]["evaluated"] == 12);

  REQUIRE(invoke({"calibrate", "-c", path.string()}, &log) == kExitOk);
  CHECK(fs::exists(ws.dir / "out" / "calibrate_report.json"));
}

TEST_CASE("same seed gives the same annotations") {
  Workspace ws("repeat");
  auto doc = ws.enrich_doc();
  doc["output_dir"] = (ws.dir / "one").string();
  const auto one = ws.write("one.json", doc);
  doc["output_dir"] = (ws.dir / "two").string();
  doc["parallelism"] = 4;
  const auto two = ws.write("two.json", doc);
  REQUIRE(invoke({"enrich", "-c", one.string()}) == kExitOk);
  REQUIRE(invoke({"enrich", "-c", two.string()}) == kExitOk);
  CHECK(testing_support::read_file(ws.dir / "one" / "annotations.jsonl") ==
        testing_support::read_file(ws.dir / "two" / "annotations.jsonl"));
}

TEST_CASE("simulate writes a report") {
  Workspace ws("simulate");
  json doc = {{"task", ws.task.string()},
              {"output_dir", (ws.dir / "out").string()},
              {"method", "debate"},
              {"decision", "judge"},
              {"confidence_mode", "coarse_self"},
              {"simulate",
               {{"posts", 40},
                {"seeds", {1}},
                {"label_prior", 0.2},
                {"calibration_profiles",
                 {{{"name", "calibrated"}, {"profile", {{"flip_prob", 0.2}}}}}},
                {"debate_agents",
                 {{{"name", "strong"}, {"profile", {{"flip_prob", 0.2}}}},
                  {{"name", "weak"}, {"profile", {{"flip_prob", 0.4}}}}}}}}};
  const auto path = ws.write("sim.json", doc);
  std::string log;
  REQUIRE(invoke({"simulate", "-c", path.string()}, &log) == kExitOk);
  const auto report = read_json(ws.dir / "out" / "simulate_report.json");
  CHECK(report["posts"] == 40);
  CHECK(report["summary"].contains("debate_macro_f1"));
  CHECK(log.find("calibrated whole-set ece") != std::string::npos);
}

TEST_CASE("exit codes") {
  Workspace ws("exit");
  CHECK(invoke({}) == kExitConfig);
  CHECK(invoke({"enrich"}) == kExitConfig);
  CHECK(invoke({"enrich", "-c", (ws.dir / "missing.json").string()}) == kExitConfig);

  std::ofstream(ws.dir / "broken.json") << "{ not json";
  CHECK(invoke({"enrich", "-c", (ws.dir / "broken.json").string()}) == kExitConfig);

  auto doc = ws.enrich_doc();
  doc["agents"][0]["backend"] = {{"kind", "remote"}, {"endpoint", "http://x"}, {"model", "m"},
                                 {"api_key", "${LABELDEBATE_TEST_UNSET_VARIABLE}"}};
  CHECK(invoke({"enrich", "-c", ws.write("env.json", doc).string()}) == kExitConfig);

  // A judge decision without a judge agent is a configuration problem.
  doc = ws.enrich_doc();
  doc["decision"] = "judge";
  std::string log;
  CHECK(invoke({"enrich", "-c", ws.write("nojudge.json", doc).string()}, &log) == kExitConfig);
  CHECK(log.find("config error") != std::string::npos);

  // Every post failing is a total failure.
  doc = ws.enrich_doc();
  std::ofstream(ws.dir / "empty_fixture.json") << "{}";
  for (auto& a : doc["agents"]) a["backend"] = {{"kind", "scripted"}, {"fixture", "empty_fixture.json"}};
  CHECK(invoke({"enrich", "-c", ws.write("scripted.json", doc).string()}) == kExitTotalFailure);
}

TEST_CASE("bundled configs parse") {
  const fs::path dir = LABELDEBATE_CONFIG_DIR;
  const auto env = fake_env({{"LABELDEBATE_API_KEY", "k"}, {"LABELDEBATE_ENDPOINT", "http://localhost:1"},
                             {"LABELDEBATE_NLI_URL", "http://localhost:2"}});
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_run_config(entry.path(), env));
    ++n;
  }
  CHECK(n >= 3);
}
