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

#include "labeldebate/cli/config.hpp"

#include <labeldebate/error.hpp>

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>

namespace labeldebate::cli {

namespace fs = std::filesystem;
using nlohmann::json;

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

std::string interpolate_env(std::string_view s, const EnvLookup& env) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '$' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    if (s[i + 1] == '$') {
      out += '$';
      ++i;
      continue;
    }
    if (s[i + 1] != '{') {
      out += s[i];
      continue;
    }
    const auto close = s.find('}', i + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, fmt::format("unterminated '${{' in '{}'", s));
    }
    const std::string name(s.substr(i + 2, close - i - 2));
    if (name.empty()) throw Error(ErrorCode::kConfig, "empty variable name in '${}'");
    auto value = env(name);
    if (!value) {
      throw Error(ErrorCode::kConfig, fmt::format("environment variable {} is not set", name));
    }
    out += *value;
    i = close;
  }
  return out;
}

json interpolate_env(const json& doc, const EnvLookup& env) {
  if (doc.is_string()) return interpolate_env(std::string_view(doc.get_ref<const std::string&>()), env);
  if (doc.is_array()) {
    json out = json::array();
    for (const auto& v : doc) out.push_back(interpolate_env(json(v), env));
    return out;
  }
  if (doc.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : doc.items()) out[k] = interpolate_env(v, env);
    return out;
  }
  return doc;
}

namespace {

// Typed access to one JSON object that names the offending field on error.
class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) fail("", "expected an object");
  }

  bool has(const char* key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

  std::string field(const char* key) const {
    return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
  }

  [[noreturn]] void fail(const char* key, const std::string& what) const {
    const auto name = key[0] ? field(key) : (path_.empty() ? std::string("<root>") : path_);
    throw Error(ErrorCode::kConfig, fmt::format("field '{}': {}", name, what));
  }

  template <typename T>
  T get(const char* key) const {
    if (!has(key)) fail(key, "is required");
    return as<T>(key);
  }

  template <typename T>
  T get(const char* key, T fallback) const {
    return has(key) ? as<T>(key) : fallback;
  }

  Reader child(const char* key) const {
    if (!has(key)) fail(key, "is required");
    return Reader(doc_.at(key), field(key));
  }

  const json& raw(const char* key) const { return doc_.at(key); }

 private:
  template <typename T>
  T as(const char* key) const {
    try {
      return doc_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, fmt::format("has the wrong type ({})", doc_.at(key).type_name()));
    }
  }

  const json& doc_;
  std::string path_;
};

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

fs::path existing_path(const Reader& r, const char* key, const fs::path& base) {
  auto p = resolve(base, r.get<std::string>(key));
  if (!fs::exists(p)) r.fail(key, fmt::format("path '{}' does not exist", p.string()));
  return p;
}

SamplingParams parse_params(const Reader& r) {
  SamplingParams p;
  p.temperature = r.get<double>("temperature", p.temperature);
  p.top_k = r.get<int>("top_k", p.top_k);
  p.top_p = r.get<double>("top_p", p.top_p);
  p.max_tokens = r.get<int>("max_tokens", p.max_tokens);
  p.want_logprobs = r.get<bool>("want_logprobs", p.want_logprobs);
  try {
    p.validate();
  } catch (const Error& e) {
    r.fail("", e.what());
  }
  return p;
}

SimulatorProfile parse_profile(const Reader& r, const json& doc) {
  try {
    return simulator_profile_from_json(doc);
  } catch (const Error& e) {
    r.fail("", e.what());
  }
}

BackendSpec parse_backend(const Reader& r, const json& doc, const fs::path& base) {
  BackendSpec b;
  const auto kind = r.get<std::string>("kind");
  if (kind == "scripted") {
    b.kind = BackendKind::kScripted;
    b.fixture = existing_path(r, "fixture", base);
  } else if (kind == "simulator") {
    b.kind = BackendKind::kSimulator;
    b.profile = r.has("profile") ? parse_profile(r.child("profile"), doc.at("profile"))
                                 : SimulatorProfile{};
  } else if (kind == "remote") {
    b.kind = BackendKind::kRemote;
    auto& o = b.remote;
    o.endpoint = r.get<std::string>("endpoint");
    if (o.endpoint.empty()) r.fail("endpoint", "must not be empty");
    o.model = r.get<std::string>("model");
    o.api_key = r.get<std::string>("api_key", "");
    o.timeout = std::chrono::milliseconds(r.get<long long>("timeout_ms", o.timeout.count()));
    o.retry.attempts = r.get<int>("retry_attempts", o.retry.attempts);
    o.retry.initial_delay =
        std::chrono::milliseconds(r.get<long long>("retry_delay_ms", o.retry.initial_delay.count()));
    o.logprobs_supported = r.get<bool>("logprobs", o.logprobs_supported);
    o.top_logprobs = r.get<int>("top_logprobs", o.top_logprobs);
    const auto top_k = r.get<std::string>("top_k_mode", "auto");
    if (top_k == "auto") {
      o.top_k_mode = TopKMode::kAuto;
    } else if (top_k == "send") {
      o.top_k_mode = TopKMode::kSend;
    } else if (top_k == "omit") {
      o.top_k_mode = TopKMode::kOmit;
    } else {
      r.fail("top_k_mode", "must be auto, send or omit");
    }
  } else {
    r.fail("kind", fmt::format("unknown backend kind '{}'", kind));
  }
  return b;
}

AgentSpec parse_agent(const Reader& r, const json& doc, const fs::path& base) {
  AgentSpec a;
  a.id = r.get<std::string>("id");
  if (a.id.empty()) r.fail("id", "must not be empty");
  a.display_name = r.get<std::string>("display_name", a.id);
  a.backend = parse_backend(r.child("backend"), doc.at("backend"), base);
  if (r.has("params")) a.params = parse_params(r.child("params"));
  return a;
}

std::vector<std::pair<std::string, SimulatorProfile>> parse_profiles(const Reader& r,
                                                                     const char* key) {
  std::vector<std::pair<std::string, SimulatorProfile>> out;
  if (!r.has(key)) return out;
  const auto& doc = r.raw(key);
  if (!doc.is_array()) r.fail(key, "expected an array of {name, profile}");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    Reader item(doc[i], fmt::format("{}[{}]", r.field(key), i));
    auto name = item.get<std::string>("name");
    out.emplace_back(name, parse_profile(item.child("profile"), doc[i].at("profile")));
  }
  return out;
}

DebateConfig parse_debate(const Reader& r) {
  DebateConfig c;
  if (r.has("method")) {
    auto m = parse_method(r.get<std::string>("method"));
    if (!m) r.fail("method", "must be single, self_consistency, ensemble or debate");
    c.method = *m;
  }
  if (r.has("confidence_mode")) {
    auto m = parse_debate_confidence_mode(r.get<std::string>("confidence_mode"));
    if (!m) {
      r.fail("confidence_mode",
             "must be none, coarse_self, coarse_sampling, coarse_entropy, fine_self or "
             "fine_sampling");
    }
    c.confidence_mode = *m;
  }
  if (r.has("decision")) {
    auto d = parse_decision(r.get<std::string>("decision"));
    if (!d) r.fail("decision", "must be random or judge");
    c.decision = *d;
  }
  c.rounds = r.get<int>("rounds", c.rounds);
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  c.parallelism = r.get<int>("parallelism", c.parallelism);
  c.parse_retries = r.get<int>("parse_retries", c.parse_retries);
  c.self_consistency_k = r.get<int>("self_consistency_k", c.self_consistency_k);
  if (r.has("confidence")) {
    auto cr = r.child("confidence");
    c.confidence.n_samples = cr.get<int>("n_samples", c.confidence.n_samples);
    c.confidence.entailment_threshold =
        cr.get<double>("entailment_threshold", c.confidence.entailment_threshold);
  }
  try {
    c.validate();
  } catch (const Error& e) {
    r.fail("", e.what());
  }
  return c;
}

}  // namespace

RunConfig parse_run_config(const json& raw, const fs::path& base_dir, const EnvLookup& env) {
  const json doc = interpolate_env(raw, env);
  Reader r(doc, "");
  RunConfig cfg;
  cfg.task = existing_path(r, "task", base_dir);
  if (r.has("corpus")) cfg.corpus = existing_path(r, "corpus", base_dir);
  cfg.output_dir = resolve(base_dir, r.get<std::string>("output_dir", "out"));
  cfg.debate = parse_debate(r);

  if (r.has("agents")) {
    const auto& agents = doc.at("agents");
    if (!agents.is_array()) r.fail("agents", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      Reader item(agents[i], fmt::format("agents[{}]", i));
      auto a = parse_agent(item, agents[i], base_dir);
      if (!seen.insert(a.id).second) item.fail("id", fmt::format("duplicate agent id '{}'", a.id));
      cfg.agents.push_back(std::move(a));
    }
  }
  if (r.has("judge")) {
    cfg.judge = parse_agent(r.child("judge"), doc.at("judge"), base_dir);
    for (const auto& a : cfg.agents) {
      if (a.id == cfg.judge->id) r.fail("judge.id", "must differ from every agent id");
    }
  }
  if (r.has("scorer")) {
    auto s = r.child("scorer");
    const auto kind = s.get<std::string>("kind", "lexical");
    if (kind == "remote") {
      cfg.scorer.remote = true;
      cfg.scorer.options.base_url = s.get<std::string>("url");
      cfg.scorer.options.max_batch = s.get<std::size_t>("max_batch", cfg.scorer.options.max_batch);
    } else if (kind != "lexical") {
      s.fail("kind", "must be lexical or remote");
    }
  }
  cfg.annotations = r.has("annotations") ? resolve(base_dir, r.get<std::string>("annotations"))
                                         : cfg.output_dir / "annotations.jsonl";
  cfg.transcripts = r.has("transcripts") ? resolve(base_dir, r.get<std::string>("transcripts"))
                                         : cfg.output_dir / "transcripts.jsonl";

  if (r.has("downstream")) {
    auto d = r.child("downstream");
    const auto& ddoc = doc.at("downstream");
    DownstreamSpec spec;
    spec.task = existing_path(d, "task", base_dir);
    spec.corpus = existing_path(d, "corpus", base_dir);
    auto strategy = parse_strategy(d.get<std::string>("strategy", "baseline"));
    if (!strategy) d.fail("strategy", "unknown enrichment strategy");
    spec.strategy = *strategy;
    if (uses_responses(spec.strategy) ||
        (uses_labels(spec.strategy) && spec.strategy != StrategyKind::kGoldLabels)) {
      spec.transcripts = existing_path(d, "transcripts", base_dir);
    }
    spec.indicator_name = d.get<std::string>("indicator_name", "");
    if (spec.strategy != StrategyKind::kBaseline && spec.indicator_name.empty()) {
      d.fail("indicator_name", "is required for enriched strategies");
    }
    spec.runs = d.get<int>("runs", 1);
    if (spec.runs < 1) d.fail("runs", "must be at least 1");
    spec.exclusions = d.get<std::set<std::string>>("exclusions", {});
    if (d.has("agent")) spec.agent = parse_agent(d.child("agent"), ddoc.at("agent"), base_dir);
    if (!spec.agent && cfg.agents.empty()) d.fail("agent", "is required when no agents are set");
    cfg.downstream = std::move(spec);
  }

  if (r.has("simulate")) {
    auto s = r.child("simulate");
    SimulateSpec spec;
    spec.posts = s.get<std::size_t>("posts", spec.posts);
    spec.seeds = s.get<std::vector<std::uint64_t>>("seeds", spec.seeds);
    if (spec.seeds.empty()) s.fail("seeds", "must not be empty");
    spec.label_prior = s.get<double>("label_prior", spec.label_prior);
    if (!(spec.label_prior >= 0.0 && spec.label_prior <= 1.0)) {
      s.fail("label_prior", "must lie in [0, 1]");
    }
    spec.calibration_profiles = parse_profiles(s, "calibration_profiles");
    spec.debate_agents = parse_profiles(s, "debate_agents");
    if (spec.debate_agents.size() == 1) s.fail("debate_agents", "needs at least two agents");
    if (s.has("judge")) spec.judge = parse_profile(s.child("judge"), doc.at("simulate").at("judge"));
    cfg.simulate = std::move(spec);
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path, const EnvLookup& env,
                          std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, fmt::format("cannot read config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, fmt::format("config '{}': {}", path.string(), e.what()));
  }
  auto cfg = parse_run_config(doc, path.parent_path(), env);
  if (seed_override) cfg.debate.seed = *seed_override;
  return cfg;
}

}  // namespace labeldebate::cli
