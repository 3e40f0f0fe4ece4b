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

#include <nlohmann/json.hpp>

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace labeldebate {

struct Category {
  std::string name;
  std::string definition;

  friend bool operator==(const Category&, const Category&) = default;
};

/// Ordered label taxonomy a task annotates over.
///
/// Names are unique case-insensitively and at least two categories exist.
/// A member named "None" or "Other/None" is designated as the none label
/// unless an explicit one is given.
class CategorySet {
 public:
  CategorySet() = default;

  /// Builds a validated set; preserves input order.
  static CategorySet validate(
      const std::vector<std::pair<std::string, std::string>>& raw,
      std::optional<std::string> none_label = std::nullopt);

  const std::vector<Category>& categories() const noexcept { return categories_; }
  std::size_t size() const noexcept { return categories_.size(); }
  bool empty() const noexcept { return categories_.empty(); }
  const std::optional<std::string>& none_label() const noexcept { return none_label_; }
  std::vector<std::string> names() const;

  /// Canonical name for a raw string (trimmed, case-insensitive), if any.
  std::optional<std::string> resolve(std::string_view raw) const;
  std::optional<std::size_t> index_of(std::string_view canonical) const;
  bool contains(std::string_view canonical) const { return index_of(canonical).has_value(); }

  friend bool operator==(const CategorySet&, const CategorySet&) = default;

 private:
  std::vector<Category> categories_;
  std::optional<std::string> none_label_;
};

/// Unordered set of canonical category names.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::set<std::string> labels) : labels_(std::move(labels)) {}
  LabelSet(std::initializer_list<std::string> labels) : labels_(labels) {}

  const std::set<std::string>& labels() const noexcept { return labels_; }
  bool contains(std::string_view label) const;
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  /// Members in taxonomy order.
  std::vector<std::string> ordered(const CategorySet& categories) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
  friend auto operator<=>(const LabelSet& a, const LabelSet& b) {
    return a.labels_ <=> b.labels_;
  }

 private:
  std::set<std::string> labels_;
};

/// Canonicalizes parser output: trims, resolves case-insensitively,
/// de-duplicates, and drops the none label when other labels are present.
LabelSet normalize_label_set(const std::vector<std::string>& raw,
                             const CategorySet& categories);

enum class RiskLevel { kA, kB, kC, kD };

char to_char(RiskLevel level) noexcept;
std::optional<RiskLevel> parse_risk_letter(char c) noexcept;

struct Post {
  std::string id;
  std::string text;
  std::optional<LabelSet> gold_labels;
  std::optional<int> wellbeing;
  std::optional<RiskLevel> risk;
  // Fields of the source record this engine does not interpret.
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const Post&, const Post&) = default;
};

struct Corpus {
  std::string task_id;
  std::vector<Post> posts;

  const Post* find(std::string_view id) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Line-delimited JSON records: {id, text, gold_labels?, wellbeing?, risk?}.
Corpus parse_corpus(std::istream& in, const CategorySet& categories,
                    std::string task_id = {});
Corpus load_corpus(const std::filesystem::path& path, const CategorySet& categories,
                   std::string task_id = {});
void write_corpus(std::ostream& out, const Corpus& corpus, const CategorySet& categories);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus,
                 const CategorySet& categories);

nlohmann::json post_to_json(const Post& post, const CategorySet& categories);

}  // namespace labeldebate
