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

#include <benchmark/benchmark.h>

#include <labeldebate/catcot.hpp>
#include <labeldebate/confidence.hpp>
#include <labeldebate/rng.hpp>

#include <string>
#include <vector>

using namespace labeldebate;

namespace {

std::string sentence(RandomStream& rng) {
  static const std::vector<std::string> vocab = {"the", "author", "started", "a", "new",
                                                 "job", "after", "moving", "house", "recently"};
  std::string s = "The";
  for (int w = 0; w < 6; ++w) s += " " + vocab[rng.index(vocab.size())];
  return s + ".";
}

AgentResponse response(RandomStream& rng, int categories, int steps) {
  AgentResponse r;
  for (int c = 0; c < categories; ++c) {
    std::string reasoning;
    for (int s = 0; s < steps; ++s) reasoning += (s ? " " : "") + sentence(rng);
    r.judgements.push_back({"C" + std::to_string(c), reasoning, rng.bernoulli(0.3), std::nullopt});
  }
  return r;
}

void BM_AgreementScore(benchmark::State& state) {
  RandomStream rng(1);
  const auto steps = static_cast<int>(state.range(0));
  StepList p, q;
  for (int i = 0; i < steps; ++i) {
    p.push_back(sentence(rng));
    q.push_back(sentence(rng));
  }
  LexicalEntailmentScorer scorer;
  for (auto _ : state) benchmark::DoNotOptimize(agreement_score(p, q, scorer, 0.5));
}
BENCHMARK(BM_AgreementScore)->Arg(2)->Arg(4)->Arg(8);

void BM_SamplingConfidence(benchmark::State& state) {
  RandomStream rng(2);
  ConfidenceConfig cfg;
  cfg.n_samples = static_cast<int>(state.range(0));
  const auto original = response(rng, 7, 3);
  std::vector<AgentResponse> samples;
  for (int i = 0; i < cfg.n_samples; ++i) samples.push_back(response(rng, 7, 3));
  LexicalEntailmentScorer scorer;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampling_confidence(original, samples, scorer, cfg));
  }
}
BENCHMARK(BM_SamplingConfidence)->Arg(5)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
