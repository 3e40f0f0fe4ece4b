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

#include "labeldebate/debate.hpp"
#include "labeldebate/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace labeldebate {

void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn,
                  const std::atomic<bool>* cancel) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallelism)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      if (cancel && cancel->load()) return;
      const auto i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

// Everything up to (and including) round 0.
DebateTranscript start_post(const DebateSetup& setup, const Post& post) {
  const auto& cfg = setup.config;
  DebateTranscript t;
  t.post_id = post.id;
  t.config = cfg.snapshot();
  switch (cfg.method) {
    case Method::kSingle: {
      DebateSetup one = setup;
      one.agents.resize(1);
      t.rounds.push_back(initial_round(one, post, t.warnings));
      break;
    }
    case Method::kSelfConsistency: {
      auto [labels, samples] = self_consistency_annotate(
          setup.agents.front(), *setup.task, post, cfg.self_consistency_k, cfg, t.warnings);
      t.final = std::move(labels);
      t.samples = std::move(samples);
      t.decision.kind = DecisionKind::kMajorityVote;
      t.decision.chosen_agent = setup.agents.front().id();
      break;
    }
    case Method::kEnsemble:
    case Method::kDebate:
      t.rounds.push_back(initial_round(setup, post, t.warnings));
      break;
  }
  return t;
}

void finish_post(const DebateSetup& setup, const Post& post, DebateTranscript& t) {
  const auto& cfg = setup.config;
  switch (cfg.method) {
    case Method::kSelfConsistency:
      return;
    case Method::kSingle: {
      const auto& r = t.rounds.front();
      t.final = r.responses.begin()->second.answer;
      t.decision.kind = DecisionKind::kSingle;
      t.decision.chosen_agent = r.agent_order.front();
      return;
    }
    case Method::kDebate:
      while (static_cast<int>(t.rounds.size()) <= cfg.rounds && !consensus(t.rounds.back())) {
        t.rounds.push_back(debate_round(t.rounds, setup, post, t.warnings));
      }
      break;
    case Method::kEnsemble:
      break;
  }
  RandomStream stream(derive_seed(cfg.seed, {post.id}));
  auto [final, decision] = decide(t.rounds, setup, post, stream, t.warnings);
  t.final = std::move(final);
  t.decision = std::move(decision);
}

bool is_config_error(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const Error& err) {
    return err.code() == ErrorCode::kConfig;
  } catch (...) {
    return false;
  }
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& err) {
    return err.what();
  } catch (...) {
    return "unknown failure";
  }
}

}  // namespace

DebateTranscript annotate_post(const DebateSetup& setup, const Post& post) {
  setup.validate();
  auto t = start_post(setup, post);
  if (setup.config.confidence_mode == DebateConfidenceMode::kCoarseEntropy && !t.rounds.empty()) {
    apply_entropy_bands({&t.rounds.front()}, setup.config.confidence.band);
  }
  finish_post(setup, post, t);
  return t;
}

PipelineResult run_pipeline(const Corpus& corpus, const DebateSetup& setup,
                            const PipelineOptions& options) {
  setup.validate();
  const auto n = corpus.posts.size();
  std::vector<std::optional<DebateTranscript>> partial(n);
  std::vector<std::exception_ptr> errors(n);
  const int par = setup.config.parallelism;

  auto guarded = [&](std::size_t i, auto&& body) {
    try {
      body();
    } catch (...) {
      errors[i] = std::current_exception();
      partial[i].reset();
    }
  };
  auto rethrow_config = [&] {
    for (const auto& e : errors) {
      if (e && is_config_error(e)) std::rethrow_exception(e);
    }
  };

  parallel_for(
      n, par,
      [&](std::size_t i) {
        guarded(i, [&] { partial[i] = start_post(setup, corpus.posts[i]); });
      },
      options.cancel);
  rethrow_config();

  if (setup.config.confidence_mode == DebateConfidenceMode::kCoarseEntropy) {
    std::vector<RoundRecord*> batch;
    for (auto& t : partial) {
      if (t && !t->rounds.empty()) batch.push_back(&t->rounds.front());
    }
    apply_entropy_bands(std::move(batch), setup.config.confidence.band);
  }

  std::vector<char> finished(n, 0);
  parallel_for(
      n, par,
      [&](std::size_t i) {
        if (!partial[i]) return;
        guarded(i, [&] {
          finish_post(setup, corpus.posts[i], *partial[i]);
          finished[i] = 1;
        });
      },
      options.cancel);
  rethrow_config();

  PipelineResult result;
  result.cancelled = options.cancel && options.cancel->load();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = corpus.posts[i].id;
    if (errors[i]) {
      result.failures.push_back({id, describe(errors[i])});
    } else if (partial[i] && finished[i]) {
      result.annotations[id] = partial[i]->final;
      result.transcripts.push_back(std::move(*partial[i]));
    } else {
      result.failures.push_back({id, "cancelled before completion"});
    }
  }
  std::sort(result.transcripts.begin(), result.transcripts.end(),
            [](const auto& a, const auto& b) { return a.post_id < b.post_id; });
  std::sort(result.failures.begin(), result.failures.end(),
            [](const auto& a, const auto& b) { return a.post_id < b.post_id; });
  return result;
}

}  // namespace labeldebate
