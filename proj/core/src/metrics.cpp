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

#include "labeldebate/metrics.hpp"

#include "labeldebate/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace labeldebate {

using nlohmann::json;

json MetricReport::to_json() const {
  json out{{"macro_f1", macro_f1}, {"per_category_f1", per_category_f1}, {"counts", counts}};
  json conf = json::object();
  for (const auto& [c, k] : confusion) conf[c] = {{"tp", k.tp}, {"fp", k.fp}, {"fn", k.fn}};
  out["confusion"] = std::move(conf);
  auto put = [&](const char* key, const std::optional<double>& v) {
    out[key] = v ? json(*v) : json(nullptr);
  };
  put("ece", ece);
  put("fsr", fsr);
  put("iur", iur);
  put("mse", mse);
  put("kappa", kappa);
  return out;
}

namespace {

template <typename V>
void check_keys(const std::map<std::string, V>& a, const std::map<std::string, V>& b) {
  if (a.size() == b.size() &&
      std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
        return x.first == y.first;
      })) {
    return;
  }
  std::vector<std::string> only;
  for (const auto& [k, v] : a) {
    if (!b.count(k)) only.push_back(k);
  }
  for (const auto& [k, v] : b) {
    if (!a.count(k)) only.push_back(k);
  }
  std::string listed;
  for (std::size_t i = 0; i < only.size() && i < 5; ++i) {
    if (i) listed += ", ";
    listed += only[i];
  }
  throw Error(ErrorCode::kKeyMismatch,
              fmt::format("{} post ids present on one side only (e.g. {})", only.size(), listed));
}

}  // namespace

MetricReport macro_f1_over(const std::map<std::string, LabelSet>& preds,
                           const std::map<std::string, LabelSet>& golds,
                           const std::vector<std::string>& classes) {
  check_keys(preds, golds);
  MetricReport report;
  for (const auto& c : classes) {
    ConfusionCounts k;
    for (const auto& [id, pred] : preds) {
      const bool p = pred.contains(c);
      const bool g = golds.at(id).contains(c);
      if (p && g) ++k.tp;
      if (p && !g) ++k.fp;
      if (!p && g) ++k.fn;
    }
    report.confusion[c] = k;
    if (k.tp + k.fp + k.fn == 0) continue;
    report.per_category_f1[c] =
        static_cast<double>(2 * k.tp) / static_cast<double>(2 * k.tp + k.fp + k.fn);
  }
  double sum = 0.0;
  for (const auto& [c, f] : report.per_category_f1) sum += f;
  report.macro_f1 = report.per_category_f1.empty()
                        ? 0.0
                        : sum / static_cast<double>(report.per_category_f1.size());
  report.counts["posts"] = static_cast<long long>(preds.size());
  report.counts["categories_included"] = static_cast<long long>(report.per_category_f1.size());
  return report;
}

MetricReport macro_f1_multilabel(const std::map<std::string, LabelSet>& preds,
                                 const std::map<std::string, LabelSet>& golds,
                                 const CategorySet& categories) {
  auto check = [&](const std::map<std::string, LabelSet>& m) {
    for (const auto& [id, s] : m) {
      for (const auto& label : s.labels()) {
        if (!categories.contains(label)) {
          throw Error(ErrorCode::kUnknownLabel,
                      fmt::format("post '{}' has unknown label '{}'", id, label));
        }
      }
    }
  };
  check(preds);
  check(golds);
  return macro_f1_over(preds, golds, categories.names());
}

double ece(std::span<const double> confidences, const std::vector<bool>& correct, int n_bins) {
  if (confidences.size() != correct.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} confidences vs {} correctness flags", confidences.size(),
                            correct.size()));
  }
  if (confidences.empty()) throw Error(ErrorCode::kEmptyList, "ECE needs at least one point");
  if (n_bins < 1) throw Error(ErrorCode::kInvalidArgument, "n_bins must be >= 1");
  std::vector<double> conf_sum(n_bins, 0.0);
  std::vector<double> acc_sum(n_bins, 0.0);
  std::vector<long long> size(n_bins, 0);
  const double nb = n_bins;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::kOutOfDomain, fmt::format("confidence {} outside [0, 1]", c));
    }
    int b = static_cast<int>(std::ceil(c * nb)) - 1;
    b = std::clamp(b, 0, n_bins - 1);
    // Edges are b / n_bins exactly.
    while (b > 0 && c <= static_cast<double>(b) / nb) --b;
    while (b < n_bins - 1 && c > static_cast<double>(b + 1) / nb) ++b;
    conf_sum[b] += c;
    acc_sum[b] += correct[i] ? 1.0 : 0.0;
    ++size[b];
  }
  const double n = static_cast<double>(confidences.size());
  double total = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    if (size[b] == 0) continue;
    const double m = static_cast<double>(size[b]);
    total += (m / n) * std::abs(acc_sum[b] / m - conf_sum[b] / m);
  }
  return total;
}

double ece_band(std::span<const double> confidences, const std::vector<bool>& correct, int n_bins,
                const ConfidenceBand& band) {
  std::vector<double> unit;
  unit.reserve(confidences.size());
  for (double c : confidences) {
    if (!(c >= band.low && c <= band.high)) {
      throw Error(ErrorCode::kOutOfDomain, fmt::format("confidence {} outside the band", c));
    }
    unit.push_back((c - band.low) / (band.high - band.low));
  }
  return ece(unit, correct, n_bins);
}

bool whole_set_correctness(const LabelSet& pred, const LabelSet& gold) { return pred == gold; }

UpdateStats fsr_iur(std::span<const DebateTranscript> transcripts) {
  UpdateStats s;
  for (const auto& t : transcripts) {
    if (t.rounds.size() < 2) continue;
    const auto& r0 = t.rounds[0].responses;
    const auto& r1 = t.rounds[1].responses;
    for (const auto& [agent, before] : r0) {
      auto after = r1.find(agent);
      if (after == r1.end()) continue;
      ++s.agent_pairs;
      if (after->second.answer == before.answer) continue;
      ++s.change_count;
      bool full = false;
      for (const auto& [peer, peer_before] : r0) {
        if (peer != agent && peer_before.answer == after->second.answer) full = true;
      }
      if (full) {
        ++s.full_switches;
      } else {
        ++s.independent_updates;
      }
    }
  }
  if (s.change_count > 0) {
    s.fsr = static_cast<double>(s.full_switches) / static_cast<double>(s.change_count);
    s.iur = static_cast<double>(s.independent_updates) / static_cast<double>(s.change_count);
  }
  return s;
}

double mse(const std::map<std::string, double>& preds, const std::map<std::string, double>& golds) {
  check_keys(preds, golds);
  if (preds.empty()) throw Error(ErrorCode::kEmptyList, "MSE needs at least one post");
  double sum = 0.0;
  for (const auto& [id, p] : preds) {
    const double d = p - golds.at(id);
    sum += d * d;
  }
  return sum / static_cast<double>(preds.size());
}

double fleiss_kappa(const std::vector<std::vector<int>>& ratings, int n_raters) {
  if (ratings.empty()) throw Error(ErrorCode::kEmptyList, "no rated items");
  if (n_raters < 2) throw Error(ErrorCode::kInvalidArgument, "Fleiss' kappa needs >= 2 raters");
  const auto k = ratings.front().size();
  std::vector<double> column(k, 0.0);
  double p_bar = 0.0;
  const double n = n_raters;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const auto& row = ratings[i];
    if (row.size() != k) {
      throw Error(ErrorCode::kInconsistentRows, fmt::format("item {} has {} categories, expected {}",
                                                            i, row.size(), k));
    }
    long long sum = 0;
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (row[j] < 0) {
        throw Error(ErrorCode::kInconsistentRows, fmt::format("item {} has a negative count", i));
      }
      sum += row[j];
      sq += static_cast<double>(row[j]) * row[j];
      column[j] += row[j];
    }
    if (sum != n_raters) {
      throw Error(ErrorCode::kInconsistentRows,
                  fmt::format("item {} counts sum to {}, expected {}", i, sum, n_raters));
    }
    p_bar += (sq - n) / (n * (n - 1.0));
  }
  const double items = static_cast<double>(ratings.size());
  p_bar /= items;
  double p_e = 0.0;
  for (double c : column) {
    const double p = c / (items * n);
    p_e += p * p;
  }
  if (std::abs(1.0 - p_e) < 1e-12) {
    if (std::abs(1.0 - p_bar) < 1e-12) return 1.0;
    throw Error(ErrorCode::kDegenerate, "expected agreement is 1; kappa is undefined");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

std::map<ConfidenceProvenance, std::vector<CalibrationPoint>> calibration_points(
    std::span<const DebateTranscript> transcripts, const std::map<std::string, LabelSet>& golds,
    const ConfidenceBand& band) {
  std::map<ConfidenceProvenance, std::vector<CalibrationPoint>> out;
  for (const auto& t : transcripts) {
    auto gold = golds.find(t.post_id);
    if (gold == golds.end() || t.rounds.empty()) continue;
    const auto& r0 = t.rounds.front();
    for (const auto& id : r0.agent_order) {
      const auto* v = r0.confidence(id);
      if (!v) continue;
      double c = 0.0;
      try {
        c = coarse_confidence(*v);
      } catch (const Error&) {
        continue;
      }
      const auto& answer = r0.responses.at(id).answer;
      out[v->provenance].push_back({(c - band.low) / (band.high - band.low),
                                    whole_set_correctness(answer, gold->second)});
    }
  }
  return out;
}

}  // namespace labeldebate
