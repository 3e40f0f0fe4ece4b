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
#include <labeldebate/domain.hpp>

#include <string>
#include <vector>

using namespace labeldebate;

namespace {

CategorySet categories() {
  return CategorySet::validate({{"Mental Health", "m"},
                                {"Physical Health", "p"},
                                {"Abuse & Addiction", "a"},
                                {"Relationship & Loss", "r"},
                                {"Career & Education", "c"},
                                {"Financial & Legal & Societal", "f"},
                                {"Lifestyle & Identity & Environment", "l"},
                                {"None", "n"}});
}

std::string rendered(const CategorySet& cs, ConfidenceMode mode) {
  AgentResponse r;
  for (const auto& c : cs.categories()) {
    const bool yes = c.name == "Career & Education";
    CategoryJudgement j{c.name, "The author talks about " + c.name + " in two sentences. It is clear.",
                        yes, std::nullopt};
    if (mode == ConfidenceMode::kSelfVerbalised) j.reasoning_confidence = 7.5;
    r.judgements.push_back(j);
  }
  r.answer = LabelSet{"Career & Education"};
  if (mode == ConfidenceMode::kSelfVerbalised) r.answer_confidences["Career & Education"] = 8.0;
  return render_response(r, cs, mode);
}

void BM_ParseCatCot(benchmark::State& state) {
  const auto cs = categories();
  const auto mode = state.range(0) ? ConfidenceMode::kSelfVerbalised : ConfidenceMode::kOff;
  const auto text = rendered(cs, mode);
  for (auto _ : state) benchmark::DoNotOptimize(parse_catcot_response(text, cs, mode));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseCatCot)->Arg(0)->Arg(1);

void BM_SegmentSteps(benchmark::State& state) {
  std::string reasoning;
  for (int i = 0; i < 6; ++i) reasoning += "The post mentions a move to a new city. ";
  reasoning += "So the answer is yes.";
  for (auto _ : state) benchmark::DoNotOptimize(segment_steps(reasoning));
}
BENCHMARK(BM_SegmentSteps);

}  // namespace

BENCHMARK_MAIN();
