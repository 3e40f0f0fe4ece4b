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

#include "labeldebate/nli_client.hpp"

#include "http_util.hpp"
#include "labeldebate/error.hpp"

#include <fmt/format.h>

#include <thread>

namespace labeldebate {

using nlohmann::json;

namespace detail {

SplitUrl split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  std::size_t host_from = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  auto slash = url.find('/', host_from);
  SplitUrl out;
  if (slash == std::string_view::npos) {
    out.origin = std::string(url);
  } else {
    out.origin = std::string(url.substr(0, slash));
    out.path = std::string(url.substr(slash));
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  }
  if (scheme_end == std::string_view::npos) out.origin = "http://" + out.origin;
  return out;
}

std::unique_ptr<httplib::Client> make_client(const std::string& origin,
                                             std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(origin);
  const auto secs = static_cast<time_t>(timeout.count() / 1000);
  const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
  client->set_connection_timeout(secs, usecs);
  client->set_read_timeout(secs, usecs);
  client->set_write_timeout(secs, usecs);
  return client;
}

std::string describe(httplib::Error error) { return httplib::to_string(error); }

}  // namespace detail

json entail_request_json(std::string_view premise, std::string_view hypothesis) {
  return json{{"premise", premise}, {"hypothesis", hypothesis}};
}

EntailmentVerdict entail_response_from_json(const json& body) {
  if (!body.is_object() || !body.contains("label") || !body.contains("score")) {
    throw Error(ErrorCode::kScorerFailure, "entailment response lacks label/score");
  }
  auto label = parse_entailment_label(body.at("label").get<std::string>());
  if (!label) {
    throw Error(ErrorCode::kScorerFailure,
                fmt::format("unknown entailment label '{}'", body.at("label").dump()));
  }
  const double score = body.at("score").get<double>();
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::kScorerFailure, fmt::format("entailment score {} outside [0, 1]", score));
  }
  return {*label, score};
}

struct RemoteEntailmentScorer::Impl {
  detail::SplitUrl url;
};

RemoteEntailmentScorer::RemoteEntailmentScorer(RemoteScorerOptions options)
    : options_(std::move(options)), impl_(std::make_unique<Impl>()) {
  if (options_.base_url.empty()) throw Error(ErrorCode::kConfig, "NLI service URL is empty");
  if (options_.max_batch == 0) throw Error(ErrorCode::kConfig, "max_batch must be positive");
  impl_->url = detail::split_url(options_.base_url);
}

RemoteEntailmentScorer::~RemoteEntailmentScorer() = default;

json RemoteEntailmentScorer::post_json(const std::string& path, const json& body) const {
  const auto payload = body.dump();
  auto delay = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, options_.attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto client = detail::make_client(impl_->url.origin, options_.timeout);
    auto res = client->Post(impl_->url.path + path, payload, "application/json");
    if (!res) {
      last_error = detail::describe(res.error());
      continue;
    }
    if (res->status == 503 || res->status >= 500) {
      last_error = fmt::format("HTTP {}", res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kScorerFailure,
                  fmt::format("NLI service returned HTTP {}: {}", res->status, res->body));
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kScorerFailure, fmt::format("unparseable NLI response: {}", e.what()));
    }
  }
  throw Error(ErrorCode::kScorerFailure,
              fmt::format("NLI service unreachable after {} attempts: {}", options_.attempts,
                          last_error));
}

EntailmentVerdict RemoteEntailmentScorer::score(std::string_view premise,
                                                std::string_view hypothesis) const {
  return entail_response_from_json(post_json("/entail", entail_request_json(premise, hypothesis)));
}

std::vector<EntailmentVerdict> RemoteEntailmentScorer::score_batch(
    std::span<const TextPair> pairs) const {
  std::vector<EntailmentVerdict> out;
  out.reserve(pairs.size());
  for (std::size_t from = 0; from < pairs.size(); from += options_.max_batch) {
    const auto count = std::min(options_.max_batch, pairs.size() - from);
    json body{{"requests", json::array()}};
    for (std::size_t i = from; i < from + count; ++i) {
      body["requests"].push_back(entail_request_json(pairs[i].premise, pairs[i].hypothesis));
    }
    const auto reply = post_json("/entail_batch", body);
    if (!reply.contains("responses") || !reply["responses"].is_array() ||
        reply["responses"].size() != count) {
      throw Error(ErrorCode::kScorerFailure, "batch response size does not match request");
    }
    for (const auto& r : reply["responses"]) {
      if (r.contains("error")) {
        throw Error(ErrorCode::kScorerFailure,
                    fmt::format("NLI service element error: {}", r["error"].dump()));
      }
      out.push_back(entail_response_from_json(r));
    }
  }
  return out;
}

NliServiceHealth RemoteEntailmentScorer::health() const {
  auto client = detail::make_client(impl_->url.origin, options_.timeout);
  auto res = client->Get(impl_->url.path + "/health");
  if (!res) {
    throw Error(ErrorCode::kScorerFailure,
                fmt::format("NLI health check failed: {}", detail::describe(res.error())));
  }
  NliServiceHealth h;
  try {
    auto body = json::parse(res->body);
    h.status = body.value("status", "");
    h.model_id = body.value("model_id", "");
    h.warmed = body.value("warmed", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kScorerFailure, fmt::format("unparseable health body: {}", e.what()));
  }
  return h;
}

}  // namespace labeldebate
