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

#include <labeldebate/metrics.hpp>
#include <labeldebate/rng.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

using namespace labeldebate;

namespace {

void BM_MacroF1(benchmark::State& state) {
  const auto cs = CategorySet::validate(
      {{"A", "a"}, {"B", "b"}, {"C", "c"}, {"D", "d"}, {"E", "e"}, {"None", "n"}});
  RandomStream rng(3);
  std::map<std::string, LabelSet> preds, golds;
  for (int i = 0; i < state.range(0); ++i) {
    std::set<std::string> p, g;
    for (const auto* name : {"A", "B", "C", "D", "E"}) {
      if (rng.bernoulli(0.3)) p.insert(name);
      if (rng.bernoulli(0.3)) g.insert(name);
    }
    if (p.empty()) p.insert("None");
    if (g.empty()) g.insert("None");
    const auto id = "p" + std::to_string(i);
    preds[id] = LabelSet(p);
    golds[id] = LabelSet(g);
  }
  for (auto _ : state) benchmark::DoNotOptimize(macro_f1_multilabel(preds, golds, cs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MacroF1)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Ece(benchmark::State& state) {
  RandomStream rng(4);
  std::vector<double> conf;
  std::vector<bool> correct;
  for (int i = 0; i < state.range(0); ++i) {
    conf.push_back(rng.uniform());
    correct.push_back(rng.bernoulli(conf.back()));
  }
  for (auto _ : state) benchmark::DoNotOptimize(ece(conf, correct, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ece)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
