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

#include "labeldebate/debate.hpp"
#include "labeldebate/domain.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace labeldebate {

struct ConfusionCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricReport {
  // Only categories occurring in predictions or gold.
  std::map<std::string, double> per_category_f1;
  std::map<std::string, ConfusionCounts> confusion;
  double macro_f1 = 0.0;
  std::optional<double> ece;
  std::optional<double> fsr;
  std::optional<double> iur;
  std::optional<double> mse;
  std::optional<double> kappa;
  std::map<std::string, long long> counts;

  nlohmann::json to_json() const;
};

/// Per-category binary F1 over posts and their macro mean. Categories that
/// occur in neither predictions nor gold are left out of the mean.
MetricReport macro_f1_multilabel(const std::map<std::string, LabelSet>& preds,
                                 const std::map<std::string, LabelSet>& golds,
                                 const CategorySet& categories);

// Same, over an explicit class list (no taxonomy validation).
MetricReport macro_f1_over(const std::map<std::string, LabelSet>& preds,
                           const std::map<std::string, LabelSet>& golds,
                           const std::vector<std::string>& classes);

/// Expected calibration error with `n_bins` equal-width bins whose upper
/// edges are inclusive. Confidences must lie in [0, 1].
double ece(std::span<const double> confidences, const std::vector<bool>& correct, int n_bins = 10);

// ECE for confidences on the band; each is mapped to (c - low) / (high - low).
double ece_band(std::span<const double> confidences, const std::vector<bool>& correct,
                int n_bins = 10, const ConfidenceBand& band = {});

bool whole_set_correctness(const LabelSet& pred, const LabelSet& gold);

struct UpdateStats {
  std::optional<double> fsr;
  std::optional<double> iur;
  long long change_count = 0;
  long long full_switches = 0;
  long long independent_updates = 0;
  long long agent_pairs = 0;
};

/// Full-switch and independent-update rates between round 0 and round 1.
/// Transcripts with a single round are skipped.
UpdateStats fsr_iur(std::span<const DebateTranscript> transcripts);

double mse(const std::map<std::string, double>& preds, const std::map<std::string, double>& golds);

/// Fleiss' kappa for an items x categories count matrix.
double fleiss_kappa(const std::vector<std::vector<int>>& ratings, int n_raters);

struct CalibrationPoint {
  double confidence = 0.0;  // on [0, 1]
  bool correct = false;
};

/// One point per (transcript, agent) with a round-0 confidence: its coarse
/// confidence mapped to [0, 1] and whole-set correctness of that agent's
/// round-0 answer. Grouped by confidence provenance.
std::map<ConfidenceProvenance, std::vector<CalibrationPoint>> calibration_points(
    std::span<const DebateTranscript> transcripts, const std::map<std::string, LabelSet>& golds,
    const ConfidenceBand& band = {});

}  // namespace labeldebate
