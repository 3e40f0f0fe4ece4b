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

// Brute-force reference implementations used only by the tests. They are
// written from the metric definitions, not from the library code.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Labels = std::set<std::string>;

// Per-class F1 from precision and recall; classes absent from both sides are
// skipped, a class with no true positive scores 0.
inline double macro_f1(const std::map<std::string, Labels>& preds,
                       const std::map<std::string, Labels>& golds,
                       const std::vector<std::string>& classes) {
  double sum = 0.0;
  int used = 0;
  for (const auto& c : classes) {
    int tp = 0, fp = 0, fn = 0;
    for (const auto& [id, p] : preds) {
      const bool in_p = p.count(c) > 0;
      const bool in_g = golds.at(id).count(c) > 0;
      tp += in_p && in_g;
      fp += in_p && !in_g;
      fn += !in_p && in_g;
    }
    if (tp + fp + fn == 0) continue;
    ++used;
    if (tp == 0) continue;
    const double precision = double(tp) / (tp + fp);
    const double recall = double(tp) / (tp + fn);
    sum += 2.0 * precision * recall / (precision + recall);
  }
  return used == 0 ? 0.0 : sum / used;
}

// Bin b covers (b/n, (b+1)/n]; bin 0 also takes 0.
inline double ece(const std::vector<double>& conf, const std::vector<bool>& correct, int n) {
  double total = 0.0;
  const double count = static_cast<double>(conf.size());
  for (int b = 0; b < n; ++b) {
    const double lo = double(b) / n;
    const double hi = double(b + 1) / n;
    double acc = 0.0, mean = 0.0, m = 0.0;
    for (std::size_t i = 0; i < conf.size(); ++i) {
      const bool inside = (conf[i] > lo || (b == 0 && conf[i] >= lo)) && conf[i] <= hi;
      if (!inside) continue;
      m += 1.0;
      acc += correct[i] ? 1.0 : 0.0;
      mean += conf[i];
    }
    if (m > 0) total += std::fabs(acc - mean) / count;
  }
  return total;
}

inline double mse(const std::map<std::string, double>& preds,
                  const std::map<std::string, double>& golds) {
  double s = 0.0;
  for (const auto& [id, p] : preds) s += std::pow(p - golds.at(id), 2);
  return s / static_cast<double>(preds.size());
}

// Agreement by enumerating ordered rater pairs per item.
inline double fleiss_kappa(const std::vector<std::vector<int>>& counts, int raters) {
  const std::size_t k = counts.front().size();
  double agree = 0.0;
  std::vector<double> total(k, 0.0);
  for (const auto& row : counts) {
    std::vector<std::size_t> assigned;
    for (std::size_t j = 0; j < k; ++j) {
      for (int r = 0; r < row[j]; ++r) assigned.push_back(j);
      total[j] += row[j];
    }
    int same = 0, pairs = 0;
    for (std::size_t a = 0; a < assigned.size(); ++a) {
      for (std::size_t b = 0; b < assigned.size(); ++b) {
        if (a == b) continue;
        ++pairs;
        same += assigned[a] == assigned[b];
      }
    }
    agree += double(same) / pairs;
  }
  const double items = static_cast<double>(counts.size());
  agree /= items;
  double chance = 0.0;
  for (double t : total) chance += (t / (items * raters)) * (t / (items * raters));
  if (chance == 1.0) return 1.0;
  return (agree - chance) / (1.0 - chance);
}

// One agent's answers before and after a debate round, plus the peers'
// answers before it.
struct UpdateCase {
  Labels before;
  Labels after;
  std::vector<Labels> peers_before;
};

// (full switches, independent updates) among changed answers.
inline std::pair<int, int> switch_counts(const std::vector<UpdateCase>& cases) {
  int full = 0, independent = 0;
  for (const auto& c : cases) {
    if (c.before == c.after) continue;
    bool adopted = false;
    for (const auto& p : c.peers_before) adopted = adopted || p == c.after;
    (adopted ? full : independent) += 1;
  }
  return {full, independent};
}

}  // namespace oracle
