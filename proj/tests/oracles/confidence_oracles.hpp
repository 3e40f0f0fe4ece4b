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

// Reference computations for step agreement and sampling confidence, built
// from an explicit f-matrix.

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Steps = std::vector<std::string>;
using FMatrix = std::vector<std::vector<int>>;

inline std::set<std::string> words(const std::string& s) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : s + " ") {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  return out;
}

// f(p, q) = 1 when the word-overlap ratio reaches one half and the given
// threshold.
inline int lexical_f(const std::string& p, const std::string& q, double threshold) {
  const auto a = words(p);
  const auto b = words(q);
  std::vector<std::string> shared;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
  const double uni = static_cast<double>(a.size() + b.size() - shared.size());
  if (uni == 0) return 0;
  const double ratio = static_cast<double>(shared.size()) / uni;
  return ratio >= 0.5 && ratio >= threshold ? 1 : 0;
}

inline FMatrix f_matrix(const Steps& p, const Steps& q, double threshold) {
  FMatrix f(p.size(), std::vector<int>(q.size(), 0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) f[i][j] = lexical_f(p[i], q[j], threshold);
  }
  return f;
}

// Bidirectional best-match ratio over a P x Q matrix.
inline double agr(const FMatrix& f, std::size_t P, std::size_t Q) {
  if (P == 0 && Q == 0) return 1.0;
  if (P == 0 || Q == 0) return 0.0;
  int rows = 0, cols = 0;
  for (std::size_t i = 0; i < P; ++i) {
    int best = 0;
    for (std::size_t j = 0; j < Q; ++j) best = std::max(best, f[i][j]);
    rows += best;
  }
  for (std::size_t j = 0; j < Q; ++j) {
    int best = 0;
    for (std::size_t i = 0; i < P; ++i) best = std::max(best, f[i][j]);
    cols += best;
  }
  return double(rows + cols) / double(P + Q);
}

// Mean agreement of `original` against each sample.
inline double explanation_conf(const Steps& original, const std::vector<Steps>& samples,
                               double threshold) {
  double s = 0.0;
  for (const auto& q : samples) {
    s += agr(f_matrix(original, q, threshold), original.size(), q.size());
  }
  return s / static_cast<double>(samples.size());
}

// Fraction of samples containing `label`.
inline double answer_conf(const std::string& label, const std::vector<std::set<std::string>>& samples) {
  int hits = 0;
  for (const auto& s : samples) hits += s.count(label) ? 1 : 0;
  return double(hits) / double(samples.size());
}

}  // namespace oracle
