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

#include "labeldebate/cli/app.hpp"

#include <labeldebate/error.hpp>
#include <labeldebate/metrics.hpp>
#include <labeldebate/rng.hpp>
#include <labeldebate/scripted_backend.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>

namespace labeldebate::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << doc.dump(2) << '\n';
}

json failures_json(const std::vector<PostFailure>& failures) {
  json out = json::array();
  for (const auto& f : failures) out.push_back({{"id", f.post_id}, {"message", f.message}});
  return out;
}

std::map<std::string, LabelSet> gold_labels(const Corpus& corpus) {
  std::map<std::string, LabelSet> out;
  for (const auto& p : corpus.posts) {
    if (p.gold_labels) out[p.id] = *p.gold_labels;
  }
  return out;
}

std::map<std::string, DownstreamGold> downstream_gold(const Corpus& corpus) {
  std::map<std::string, DownstreamGold> out;
  for (const auto& p : corpus.posts) {
    if (p.wellbeing || p.risk) out[p.id] = {p.wellbeing, p.risk};
  }
  return out;
}

double ece_of(const std::vector<CalibrationPoint>& points) {
  std::vector<double> conf;
  std::vector<bool> correct;
  for (const auto& p : points) {
    conf.push_back(p.confidence);
    correct.push_back(p.correct);
  }
  return ece(conf, correct);
}

json calibration_json(const std::map<ConfidenceProvenance, std::vector<CalibrationPoint>>& groups) {
  json out = json::object();
  for (const auto& [prov, points] : groups) {
    if (points.empty()) continue;
    double acc = 0.0;
    double mean = 0.0;
    for (const auto& p : points) {
      acc += p.correct ? 1.0 : 0.0;
      mean += p.confidence;
    }
    out[to_string(prov)] = {{"ece", ece_of(points)},
                            {"points", points.size()},
                            {"accuracy", acc / static_cast<double>(points.size())},
                            {"mean_confidence", mean / static_cast<double>(points.size())}};
  }
  return out;
}

// Per-category verdict correctness against its own confidence, over every
// round-0 judgement.
double category_ece(const std::vector<DebateTranscript>& transcripts,
                    const std::map<std::string, LabelSet>& golds) {
  std::vector<CalibrationPoint> points;
  const ConfidenceBand band;
  for (const auto& t : transcripts) {
    if (t.rounds.empty()) continue;
    const auto& gold = golds.at(t.post_id);
    for (const auto& [agent, conf] : t.rounds.front().confidences) {
      const auto& response = t.rounds.front().responses.at(agent);
      for (const auto& j : response.judgements) {
        auto it = conf.per_category.find(j.category);
        if (it == conf.per_category.end()) continue;
        points.push_back({(it->second - band.low) / (band.high - band.low),
                          j.verdict == gold.contains(j.category)});
      }
    }
  }
  return points.empty() ? 0.0 : ece_of(points);
}

Corpus load_annotation_corpus(const RunConfig& cfg, const TaskSpec& task, const char* command) {
  if (cfg.corpus.empty()) {
    throw Error(ErrorCode::kConfig, fmt::format("field 'corpus': is required for {}", command));
  }
  return load_corpus(cfg.corpus, task.category_set, task.task_id);
}

DebateSetup make_setup(const Runtime& rt, const DebateConfig& config) {
  DebateSetup setup;
  setup.task = &rt.task;
  setup.agents = rt.agents;
  setup.judge = rt.judge;
  setup.scorer = rt.scorer.get();
  setup.config = config;
  return setup;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

Agent make_agent(const AgentSpec& spec, const CategorySet& categories, const Corpus& corpus) {
  Agent agent;
  agent.handle.agent_id = spec.id;
  agent.handle.display_name = spec.display_name;
  agent.handle.backend = spec.backend.kind;
  agent.handle.params = spec.params;
  switch (spec.backend.kind) {
    case BackendKind::kScripted:
      agent.backend = ScriptedBackend::from_file(spec.backend.fixture);
      break;
    case BackendKind::kSimulator:
      agent.backend = std::make_shared<SimulatorBackend>(
          categories, std::map<std::string, SimulatorProfile>{{spec.id, spec.backend.profile}},
          gold_labels(corpus), downstream_gold(corpus));
      break;
    case BackendKind::kRemote:
      agent.backend = std::make_shared<RemoteChatBackend>(spec.backend.remote);
      break;
  }
  return agent;
}

Runtime build_runtime(const RunConfig& cfg) {
  Runtime rt;
  rt.task = load_task_spec(cfg.task);
  if (!cfg.corpus.empty()) rt.corpus = load_corpus(cfg.corpus, rt.task.category_set, rt.task.task_id);
  for (const auto& a : cfg.agents) rt.agents.push_back(make_agent(a, rt.task.category_set, rt.corpus));
  if (cfg.judge) rt.judge = make_agent(*cfg.judge, rt.task.category_set, rt.corpus);
  if (cfg.scorer.remote) {
    rt.scorer = std::make_unique<RemoteEntailmentScorer>(cfg.scorer.options);
  } else {
    rt.scorer = std::make_unique<LexicalEntailmentScorer>();
  }
  return rt;
}

int cmd_enrich(const RunConfig& cfg, std::ostream& log, const std::atomic<bool>* cancel) {
  if (cfg.corpus.empty()) throw Error(ErrorCode::kConfig, "field 'corpus': is required for enrich");
  auto rt = build_runtime(cfg);
  auto setup = make_setup(rt, cfg.debate);
  try {
    setup.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  const auto result = run_pipeline(rt.corpus, setup, {cancel});

  fs::create_directories(cfg.output_dir);
  save_transcripts(cfg.output_dir / "transcripts.jsonl", result.transcripts, rt.task.category_set);
  save_annotations(cfg.output_dir / "annotations.jsonl", result.annotations, rt.task.category_set);
  write_json(cfg.output_dir / "failures.json", failures_json(result.failures));
  std::size_t warnings = 0;
  for (const auto& t : result.transcripts) warnings += t.warnings.size();
  write_json(cfg.output_dir / "enrich_report.json",
             {{"task_id", rt.task.task_id},
              {"config", cfg.debate.snapshot()},
              {"posts", rt.corpus.posts.size()},
              {"annotated", result.transcripts.size()},
              {"failed", result.failures.size()},
              {"warnings", warnings},
              {"cancelled", result.cancelled}});
  log << fmt::format("enrich: {}/{} posts annotated, {} failed{}\n", result.transcripts.size(),
                     rt.corpus.posts.size(), result.failures.size(),
                     result.cancelled ? " (cancelled)" : "");
  for (const auto& f : result.failures) log << fmt::format("  {}: {}\n", f.post_id, f.message);
  if (!rt.corpus.posts.empty() && result.transcripts.empty()) return kExitTotalFailure;
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  const auto task = load_task_spec(cfg.task);
  const auto corpus = load_annotation_corpus(cfg, task, "evaluate");
  const auto annotations = load_annotations(cfg.annotations, task.category_set);
  const auto all_gold = gold_labels(corpus);

  std::map<std::string, LabelSet> preds;
  std::map<std::string, LabelSet> golds;
  for (const auto& [id, labels] : annotations) {
    auto it = all_gold.find(id);
    if (it == all_gold.end()) continue;
    preds[id] = labels;
    golds[id] = it->second;
  }
  if (preds.empty()) {
    log << "evaluate: no annotated post has a gold label set\n";
    return kExitTotalFailure;
  }
  auto report = macro_f1_multilabel(preds, golds, task.category_set);
  report.counts["evaluated"] = static_cast<long long>(preds.size());
  report.counts["without_gold"] = static_cast<long long>(annotations.size() - preds.size());
  report.counts["unannotated"] = static_cast<long long>(all_gold.size() - golds.size());
  json doc = report.to_json();
  if (fs::exists(cfg.transcripts)) {
    const auto transcripts = load_transcripts(cfg.transcripts, task.category_set);
    const auto stats = fsr_iur(transcripts);
    if (stats.fsr) doc["fsr"] = *stats.fsr;
    if (stats.iur) doc["iur"] = *stats.iur;
    doc["counts"]["changes"] = stats.change_count;
    doc["calibration"] = calibration_json(calibration_points(transcripts, golds));
  }
  fs::create_directories(cfg.output_dir);
  write_json(cfg.output_dir / "evaluate_report.json", doc);
  log << fmt::format("evaluate: macro_f1 {:.4f} over {} posts\n", report.macro_f1, preds.size());
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& log) {
  const auto task = load_task_spec(cfg.task);
  const auto corpus = load_annotation_corpus(cfg, task, "calibrate");
  const auto transcripts = load_transcripts(cfg.transcripts, task.category_set);
  const auto groups = calibration_points(transcripts, gold_labels(corpus));
  const auto doc = calibration_json(groups);
  if (doc.empty()) {
    log << "calibrate: no transcript carries a round-0 confidence with a gold label set\n";
    return kExitTotalFailure;
  }
  fs::create_directories(cfg.output_dir);
  write_json(cfg.output_dir / "calibrate_report.json", doc);
  for (const auto& [name, v] : doc.items()) {
    log << fmt::format("calibrate: {} ece {:.4f} over {} points\n", name, v["ece"].get<double>(),
                       v["points"].get<std::size_t>());
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log, const std::atomic<bool>* cancel) {
  if (!cfg.simulate) throw Error(ErrorCode::kConfig, "field 'simulate': is required for simulate");
  const auto& spec = *cfg.simulate;
  Runtime rt;
  rt.task = load_task_spec(cfg.task);
  rt.scorer = std::make_unique<LexicalEntailmentScorer>();
  const auto& cats = rt.task.category_set;

  json per_seed = json::array();
  std::map<std::string, std::vector<double>> calib_ece;
  std::map<std::string, std::vector<double>> calib_cat_ece;
  std::vector<double> debate_f1;
  std::map<std::string, std::vector<double>> single_f1;
  for (const auto seed : spec.seeds) {
    rt.corpus = synthetic_corpus(cats, spec.posts, spec.label_prior, seed);
    const auto golds = gold_labels(rt.corpus);
    json entry{{"seed", seed}, {"calibration", json::object()}};

    for (const auto& [name, base] : spec.calibration_profiles) {
      auto profile = base;
      profile.seed = seed;
      AgentSpec a{fmt::format("sim-{}", name), name, {BackendKind::kSimulator, {}, profile, {}}, {}};
      rt.agents = {make_agent(a, cats, rt.corpus)};
      rt.judge.reset();
      DebateConfig config = cfg.debate;
      config.method = Method::kSingle;
      config.confidence_mode = DebateConfidenceMode::kFineSelf;
      config.seed = seed;
      const auto result = run_pipeline(rt.corpus, make_setup(rt, config), {cancel});
      const auto groups = calibration_points(result.transcripts, golds);
      auto it = groups.find(ConfidenceProvenance::kSelfVerbalised);
      if (it == groups.end() || it->second.empty()) continue;
      const double e = ece_of(it->second);
      calib_ece[name].push_back(e);
      entry["calibration"][name] = calibration_json(groups).begin().value();
      const double ce = category_ece(result.transcripts, golds);
      calib_cat_ece[name].push_back(ce);
      entry["calibration"][name]["category_ece"] = ce;
    }

    if (!spec.debate_agents.empty()) {
      rt.agents.clear();
      std::map<std::string, SimulatorProfile> profiles;
      for (const auto& [name, base] : spec.debate_agents) {
        profiles[name] = base;
        profiles[name].seed = derive_seed(seed, {name});
      }
      SimulatorProfile judge_profile = spec.judge.value_or(SimulatorProfile{});
      profiles["judge"] = judge_profile;
      auto backend = std::make_shared<SimulatorBackend>(cats, profiles, golds);
      for (const auto& [name, _] : spec.debate_agents) {
        rt.agents.push_back({{name, name, BackendKind::kSimulator, {}}, backend});
      }
      rt.judge = Agent{{"judge", "judge", BackendKind::kSimulator, {}}, backend};
      DebateConfig config = cfg.debate;
      config.method = Method::kDebate;
      config.seed = seed;
      if (config.confidence_mode == DebateConfidenceMode::kCoarseEntropy) {
        for (auto& a : rt.agents) a.handle.params.want_logprobs = true;
      }
      const auto result = run_pipeline(rt.corpus, make_setup(rt, config), {cancel});
      const auto debate = macro_f1_multilabel(result.annotations, golds, cats).macro_f1;
      debate_f1.push_back(debate);
      json singles = json::object();
      for (const auto& [name, _] : spec.debate_agents) {
        std::map<std::string, LabelSet> preds;
        for (const auto& t : result.transcripts) preds[t.post_id] = t.rounds.front().responses.at(name).answer;
        std::map<std::string, LabelSet> sub;
        for (const auto& [id, _l] : preds) sub[id] = golds.at(id);
        const double f1 = macro_f1_multilabel(preds, sub, cats).macro_f1;
        single_f1[name].push_back(f1);
        singles[name] = f1;
      }
      const auto stats = fsr_iur(result.transcripts);
      entry["debate"] = {{"macro_f1", debate},
                         {"single_macro_f1", singles},
                         {"failures", result.failures.size()},
                         {"fsr", stats.fsr ? json(*stats.fsr) : json(nullptr)},
                         {"iur", stats.iur ? json(*stats.iur) : json(nullptr)},
                         {"changes", stats.change_count}};
    }
    per_seed.push_back(std::move(entry));
  }

  json summary = json::object();
  for (const auto& [name, v] : calib_ece) {
    summary["calibration_ece"][name] = {{"mean", mean_of(v)}, {"sd", sd_of(v)}};
    summary["calibration_category_ece"][name] = {{"mean", mean_of(calib_cat_ece[name])},
                                                 {"sd", sd_of(calib_cat_ece[name])}};
  }
  if (!debate_f1.empty()) {
    summary["debate_macro_f1"] = {{"mean", mean_of(debate_f1)}, {"sd", sd_of(debate_f1)}};
    for (const auto& [name, v] : single_f1) {
      summary["single_macro_f1"][name] = {{"mean", mean_of(v)}, {"sd", sd_of(v)}};
    }
  }
  fs::create_directories(cfg.output_dir);
  write_json(cfg.output_dir / "simulate_report.json",
             {{"task_id", rt.task.task_id},
              {"posts", spec.posts},
              {"seeds", spec.seeds},
              {"config", cfg.debate.snapshot()},
              {"runs", per_seed},
              {"summary", summary}});
  for (const auto& [name, v] : calib_ece) {
    log << fmt::format("simulate: {} whole-set ece {:.4f}, per-category ece {:.4f}\n", name,
                       mean_of(v), mean_of(calib_cat_ece[name]));
  }
  if (!debate_f1.empty()) {
    log << fmt::format("simulate: debate macro_f1 {:.4f}\n", mean_of(debate_f1));
    for (const auto& [name, v] : single_f1) {
      log << fmt::format("simulate: {} single macro_f1 {:.4f}\n", name, mean_of(v));
    }
  }
  return kExitOk;
}

int cmd_downstream(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.downstream) {
    throw Error(ErrorCode::kConfig, "field 'downstream': is required for downstream");
  }
  const auto& spec = *cfg.downstream;
  const auto task = load_task_spec(cfg.task);
  const auto dtask = load_downstream_task(spec.task);
  const auto corpus = load_corpus(spec.corpus, task.category_set, task.task_id);

  std::vector<Post> posts;
  std::map<std::string, DownstreamOutcome> golds;
  for (const auto& p : corpus.posts) {
    if (spec.exclusions.count(p.id)) continue;
    if (dtask.kind == DownstreamKind::kWellbeing && p.wellbeing) {
      golds[p.id] = *p.wellbeing;
    } else if (dtask.kind == DownstreamKind::kSharentingRisk && p.risk) {
      golds[p.id] = *p.risk;
    } else {
      continue;
    }
    posts.push_back(p);
  }
  if (posts.empty()) {
    log << "downstream: no post carries a gold value for this task\n";
    return kExitTotalFailure;
  }

  std::map<std::string, EnrichmentPayload> payloads;
  if (spec.strategy == StrategyKind::kGoldLabels) {
    for (const auto& p : posts) {
      if (p.gold_labels) payloads[p.id] = {*p.gold_labels, std::nullopt, spec.indicator_name};
    }
  } else if (spec.strategy != StrategyKind::kBaseline) {
    for (const auto& t : load_transcripts(spec.transcripts, task.category_set)) {
      payloads[t.post_id] = payload_from_transcript(spec.strategy, t, spec.indicator_name);
    }
  }

  const auto agent = make_agent(spec.agent ? *spec.agent : cfg.agents.front(), task.category_set,
                                corpus);
  fs::create_directories(cfg.output_dir);
  std::ofstream records(cfg.output_dir / "downstream_records.jsonl");
  json runs = json::array();
  json failures = json::array();
  std::vector<double> scores;
  for (int r = 0; r < spec.runs; ++r) {
    const auto run_seed =
        derive_seed(cfg.debate.seed, {"downstream", to_string(spec.strategy), std::to_string(r)});
    auto run = run_downstream(posts, dtask, spec.strategy, payloads, agent, run_seed, r,
                              cfg.debate.parallelism);
    std::map<std::string, DownstreamOutcome> preds;
    for (const auto& rec : run.records) {
      records << downstream_record_to_json(rec).dump() << '\n';
      if (rec.parsed) preds[rec.id] = *rec.parsed;
    }
    for (const auto& f : run.failures) {
      failures.push_back({{"run", r}, {"id", f.post_id}, {"message", f.message}});
    }
    json entry{{"run", r}, {"seed", run_seed}, {"parsed", preds.size()},
               {"failed", run.failures.size()}};
    if (!preds.empty()) {
      const auto report = evaluate_downstream(preds, golds, dtask.kind);
      const double score = dtask.kind == DownstreamKind::kWellbeing ? *report.mse : report.macro_f1;
      entry["score"] = score;
      scores.push_back(score);
    }
    runs.push_back(std::move(entry));
  }
  const char* metric = dtask.kind == DownstreamKind::kWellbeing ? "mse" : "macro_f1";
  write_json(cfg.output_dir / "downstream_failures.json", failures);
  write_json(cfg.output_dir / "downstream_report.json",
             {{"task", to_string(dtask.kind)},
              {"strategy", to_string(spec.strategy)},
              {"metric", metric},
              {"posts", posts.size()},
              {"runs", runs},
              {"mean", mean_of(scores)},
              {"sd", sd_of(scores)}});
  if (scores.empty()) {
    log << "downstream: no run produced a parseable answer\n";
    return kExitTotalFailure;
  }
  log << fmt::format("downstream: {} {} {:.4f} (sd {:.4f}) over {} runs\n",
                     to_string(spec.strategy), metric, mean_of(scores), sd_of(scores),
                     scores.size());
  return kExitOk;
}

int run(std::string_view subcommand, const RunConfig& cfg, std::ostream& log,
        const std::atomic<bool>* cancel) {
  try {
    if (subcommand == "enrich") return cmd_enrich(cfg, log, cancel);
    if (subcommand == "evaluate") return cmd_evaluate(cfg, log);
    if (subcommand == "simulate") return cmd_simulate(cfg, log, cancel);
    if (subcommand == "calibrate") return cmd_calibrate(cfg, log);
    if (subcommand == "downstream") return cmd_downstream(cfg, log);
    log << fmt::format("unknown subcommand '{}'\n", subcommand);
    return kExitConfig;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kIo) {
      log << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    log << "error: " << e.what() << '\n';
    return kExitTotalFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitTotalFailure;
  }
}

int main_entry(int argc, char** argv, std::ostream& log, const std::atomic<bool>* cancel) {
  CLI::App app{"Multi-agent label enrichment with confidence-aware debate", "labeldebate"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  const char* const kCommands[][2] = {
      {"enrich", "Annotate a corpus and write transcripts and annotations"},
      {"evaluate", "Score annotations against gold labels"},
      {"simulate", "Run the offline simulator experiment suite"},
      {"calibrate", "Expected calibration error over stored transcripts"},
      {"downstream", "Run and score one enrichment integration strategy"},
  };
  for (const auto& [name, help] : kCommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the configured seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, log);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = load_run_config(config_path, process_env(), seed);
  } catch (const Error& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed && cfg.simulate) cfg.simulate->seeds = {*seed};
  return run(subcommand, cfg, log, cancel);
}

}  // namespace labeldebate::cli
