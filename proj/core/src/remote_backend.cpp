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

#include "labeldebate/remote_backend.hpp"

#include "http_util.hpp"
#include "labeldebate/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <thread>

namespace labeldebate {

using nlohmann::json;

RemoteChatBackend::RemoteChatBackend(RemoteBackendOptions options)
    : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw Error(ErrorCode::kConfig, "remote endpoint is empty");
  if (options_.model.empty()) throw Error(ErrorCode::kConfig, "remote model name is empty");
  if (options_.retry.attempts < 1) throw Error(ErrorCode::kConfig, "retry attempts must be >= 1");
  if (options_.top_k_mode == TopKMode::kSend) top_k_supported_ = true;
  if (options_.top_k_mode == TopKMode::kOmit) top_k_supported_ = false;
}

json RemoteChatBackend::build_request(const PromptBundle& prompt, const SamplingParams& params,
                                      bool include_top_k) const {
  json messages = json::array();
  for (const auto& m : prompt.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json body{{"model", options_.model},
            {"messages", std::move(messages)},
            {"temperature", params.temperature},
            {"top_p", params.top_p},
            {"max_tokens", params.max_tokens},
            {"n", 1}};
  if (include_top_k && params.top_k > 0) body["top_k"] = params.top_k;
  if (params.want_logprobs && options_.logprobs_supported) {
    body["logprobs"] = true;
    body["top_logprobs"] = options_.top_logprobs;
  }
  return body;
}

GenerationResult RemoteChatBackend::parse_reply(const json& body, bool want_logprobs) {
  GenerationResult out;
  try {
    const auto& choice = body.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::kBackendRefusal, "completion has no text");
    out.text = content.get<std::string>();
    const auto reason = choice.value("finish_reason", std::string("stop"));
    out.finish_reason = reason == "stop"     ? FinishReason::kStop
                        : reason == "length" ? FinishReason::kLength
                                             : FinishReason::kOther;
    if (out.finish_reason == FinishReason::kLength) {
      out.warnings.emplace_back("completion truncated at max_tokens");
    }
    if (want_logprobs && choice.contains("logprobs") && choice["logprobs"].is_object() &&
        choice["logprobs"].contains("content")) {
      std::vector<TokenDistribution> tokens;
      for (const auto& tok : choice["logprobs"]["content"]) {
        TokenDistribution dist;
        if (tok.contains("top_logprobs") && !tok["top_logprobs"].empty()) {
          for (const auto& alt : tok["top_logprobs"]) {
            dist.push_back(std::exp(alt.at("logprob").get<double>()));
          }
        } else {
          dist.push_back(std::exp(tok.at("logprob").get<double>()));
        }
        tokens.push_back(std::move(dist));
      }
      out.token_distributions = std::move(tokens);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendRefusal, fmt::format("malformed completion: {}", e.what()));
  }
  return out;
}

namespace {

struct Reply {
  int status = 0;
  std::string body;
};

// One POST with bounded exponential backoff on transport failures, 429 and
// 5xx. Other statuses are returned to the caller.
Reply post_with_retry(const detail::SplitUrl& url, const std::string& api_key,
                      const std::string& payload, const RetryPolicy& retry,
                      std::chrono::milliseconds timeout) {
  auto delay = retry.initial_delay;
  std::string last;
  bool timed_out = false;
  for (int attempt = 0; attempt < retry.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(delay.count()) * retry.backoff_factor));
    }
    auto client = detail::make_client(url.origin, timeout);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto res = client->Post(url.path.empty() ? "/" : url.path, headers, payload,
                            "application/json");
    if (!res) {
      timed_out = res.error() == httplib::Error::Read || res.error() == httplib::Error::Write;
      last = detail::describe(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      timed_out = false;
      last = fmt::format("HTTP {}", res->status);
      continue;
    }
    return {res->status, res->body};
  }
  throw Error(timed_out ? ErrorCode::kTimeout : ErrorCode::kTransport,
              fmt::format("no reply after {} attempts: {}", retry.attempts, last));
}

}  // namespace

bool RemoteChatBackend::probe_top_k(int top_k) {
  PromptBundle probe;
  probe.messages.push_back({Role::kUser, "ping"});
  SamplingParams params;
  params.top_k = top_k > 0 ? top_k : 20;
  params.max_tokens = 1;
  const auto url = detail::split_url(options_.endpoint);
  bool ok = false;
  try {
    auto reply = post_with_retry(url, options_.api_key, build_request(probe, params, true).dump(),
                                 options_.retry, options_.timeout);
    ok = reply.status == 200;
  } catch (const Error&) {
    ok = false;
  }
  std::lock_guard lock(probe_mutex_);
  top_k_supported_ = ok;
  return ok;
}

std::optional<bool> RemoteChatBackend::top_k_supported() const {
  std::lock_guard lock(probe_mutex_);
  return top_k_supported_;
}

bool RemoteChatBackend::include_top_k(const SamplingParams& params) {
  if (params.top_k == 0) return false;
  if (auto known = top_k_supported()) return *known;
  return probe_top_k(params.top_k);
}

GenerationResult RemoteChatBackend::generate(const AgentHandle&, const PromptBundle& prompt,
                                             const SamplingParams& params,
                                             const GenerationRequest&) {
  const auto payload = build_request(prompt, params, include_top_k(params)).dump();
  const auto url = detail::split_url(options_.endpoint);
  auto reply = post_with_retry(url, options_.api_key, payload, options_.retry, options_.timeout);
  if (reply.status != 200) {
    throw Error(ErrorCode::kBackendRefusal,
                fmt::format("server returned HTTP {}: {}", reply.status, reply.body));
  }
  json body;
  try {
    body = json::parse(reply.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kBackendRefusal, fmt::format("unparseable completion: {}", e.what()));
  }
  return parse_reply(body, params.want_logprobs && options_.logprobs_supported);
}

}  // namespace labeldebate
