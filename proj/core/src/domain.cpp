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

#include "labeldebate/domain.hpp"

#include "labeldebate/error.hpp"
#include "labeldebate/text.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace labeldebate {

using nlohmann::json;

CategorySet CategorySet::validate(
    const std::vector<std::pair<std::string, std::string>>& raw,
    std::optional<std::string> none_label) {
  if (raw.empty()) {
    throw Error(ErrorCode::kEmptyList, "category list is empty");
  }
  CategorySet out;
  std::unordered_set<std::string> seen;
  for (const auto& [name, definition] : raw) {
    auto trimmed = std::string(text::trim(name));
    if (trimmed.empty()) {
      throw Error(ErrorCode::kEmptyName, "category name is empty");
    }
    if (trimmed.find_first_of("\r\n") != std::string::npos) {
      throw Error(ErrorCode::kEmptyName,
                  fmt::format("category name '{}' contains a newline", trimmed));
    }
    if (!seen.insert(text::to_lower(trimmed)).second) {
      throw Error(ErrorCode::kDuplicateName,
                  fmt::format("duplicate category name '{}'", trimmed));
    }
    out.categories_.push_back({std::move(trimmed), definition});
  }
  if (out.categories_.size() < 2) {
    throw Error(ErrorCode::kEmptyList, "a category set needs at least two categories");
  }

  if (none_label) {
    auto resolved = out.resolve(*none_label);
    if (!resolved) {
      throw Error(ErrorCode::kUnknownLabel,
                  fmt::format("none label '{}' is not a category", *none_label));
    }
    out.none_label_ = *resolved;
  } else {
    for (const auto& c : out.categories_) {
      if (text::iequals(c.name, "None") || text::iequals(c.name, "Other/None")) {
        out.none_label_ = c.name;
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> CategorySet::names() const {
  std::vector<std::string> out;
  out.reserve(categories_.size());
  for (const auto& c : categories_) out.push_back(c.name);
  return out;
}

std::optional<std::string> CategorySet::resolve(std::string_view raw) const {
  auto needle = text::trim(raw);
  for (const auto& c : categories_) {
    if (text::iequals(c.name, needle)) return c.name;
  }
  return std::nullopt;
}

std::optional<std::size_t> CategorySet::index_of(std::string_view canonical) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].name == canonical) return i;
  }
  return std::nullopt;
}

bool LabelSet::contains(std::string_view label) const {
  return labels_.find(std::string(label)) != labels_.end();
}

std::vector<std::string> LabelSet::ordered(const CategorySet& categories) const {
  std::vector<std::string> out;
  for (const auto& c : categories.categories()) {
    if (labels_.count(c.name)) out.push_back(c.name);
  }
  // Anything outside the taxonomy keeps lexicographic order at the end.
  for (const auto& l : labels_) {
    if (!categories.contains(l)) out.push_back(l);
  }
  return out;
}

LabelSet normalize_label_set(const std::vector<std::string>& raw,
                             const CategorySet& categories) {
  std::set<std::string> labels;
  std::vector<std::string> unresolved;
  for (const auto& r : raw) {
    if (auto name = categories.resolve(r)) {
      labels.insert(*name);
    } else {
      unresolved.emplace_back(text::trim(r));
    }
  }
  if (!unresolved.empty()) {
    std::string listed;
    for (const auto& u : unresolved) {
      if (!listed.empty()) listed += ", ";
      listed += fmt::format("'{}'", u);
    }
    throw Error(ErrorCode::kUnknownLabel, fmt::format("unknown labels: {}", listed));
  }
  const auto& none = categories.none_label();
  if (none && labels.size() > 1) labels.erase(*none);
  return LabelSet(std::move(labels));
}

char to_char(RiskLevel level) noexcept {
  switch (level) {
    case RiskLevel::kA: return 'A';
    case RiskLevel::kB: return 'B';
    case RiskLevel::kC: return 'C';
    case RiskLevel::kD: return 'D';
  }
  return '?';
}

std::optional<RiskLevel> parse_risk_letter(char c) noexcept {
  switch (c) {
    case 'A': case 'a': return RiskLevel::kA;
    case 'B': case 'b': return RiskLevel::kB;
    case 'C': case 'c': return RiskLevel::kC;
    case 'D': case 'd': return RiskLevel::kD;
    default: return std::nullopt;
  }
}

const Post* Corpus::find(std::string_view id) const {
  for (const auto& p : posts) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

namespace {

Post parse_record(const json& record, const CategorySet& categories, std::size_t line) {
  if (!record.is_object()) {
    throw RecordError(ErrorCode::kMalformedRecord, line, "record is not an object");
  }
  Post post;
  auto id = record.find("id");
  if (id == record.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw RecordError(ErrorCode::kMalformedRecord, line, "missing string field 'id'");
  }
  post.id = id->get<std::string>();
  auto body = record.find("text");
  if (body == record.end() || !body->is_string()) {
    throw RecordError(ErrorCode::kMalformedRecord, line, "missing string field 'text'");
  }
  post.text = body->get<std::string>();

  for (auto it = record.begin(); it != record.end(); ++it) {
    const auto& key = it.key();
    const auto& value = it.value();
    if (key == "id" || key == "text") continue;
    if (key == "gold_labels") {
      if (!value.is_array()) {
        throw RecordError(ErrorCode::kMalformedRecord, line, "'gold_labels' must be an array");
      }
      std::vector<std::string> raw;
      for (const auto& v : value) {
        if (!v.is_string()) {
          throw RecordError(ErrorCode::kMalformedRecord, line,
                            "'gold_labels' entries must be strings");
        }
        raw.push_back(v.get<std::string>());
      }
      try {
        post.gold_labels = normalize_label_set(raw, categories);
      } catch (const Error& e) {
        throw RecordError(ErrorCode::kUnknownLabel, line, e.what());
      }
    } else if (key == "wellbeing") {
      if (!value.is_number_integer()) {
        throw RecordError(ErrorCode::kMalformedRecord, line, "'wellbeing' must be an integer");
      }
      auto score = value.get<long long>();
      if (score < 1 || score > 10) {
        throw RecordError(ErrorCode::kMalformedRecord, line,
                          fmt::format("'wellbeing' {} outside 1-10", score));
      }
      post.wellbeing = static_cast<int>(score);
    } else if (key == "risk") {
      if (!value.is_string() || value.get<std::string>().size() != 1) {
        throw RecordError(ErrorCode::kMalformedRecord, line, "'risk' must be one of A-D");
      }
      auto level = parse_risk_letter(value.get<std::string>()[0]);
      if (!level || value.get<std::string>()[0] != to_char(*level)) {
        throw RecordError(ErrorCode::kMalformedRecord, line, "'risk' must be one of A-D");
      }
      post.risk = level;
    } else {
      post.extra[key] = value;
    }
  }
  return post;
}

}  // namespace

Corpus parse_corpus(std::istream& in, const CategorySet& categories, std::string task_id) {
  Corpus corpus;
  corpus.task_id = std::move(task_id);
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw RecordError(ErrorCode::kMalformedRecord, line_no, e.what());
    }
    auto post = parse_record(record, categories, line_no);
    if (!ids.insert(post.id).second) {
      throw RecordError(ErrorCode::kDuplicateId, line_no,
                        fmt::format("duplicate post id '{}'", post.id));
    }
    corpus.posts.push_back(std::move(post));
  }
  if (corpus.posts.empty()) {
    throw Error(ErrorCode::kEmptyList, "corpus contains no records");
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const CategorySet& categories,
                   std::string task_id) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot read corpus '{}'", path.string()));
  }
  return parse_corpus(in, categories, std::move(task_id));
}

json post_to_json(const Post& post, const CategorySet& categories) {
  json record = post.extra.is_object() ? post.extra : json::object();
  record["id"] = post.id;
  record["text"] = post.text;
  if (post.gold_labels) record["gold_labels"] = post.gold_labels->ordered(categories);
  if (post.wellbeing) record["wellbeing"] = *post.wellbeing;
  if (post.risk) record["risk"] = std::string(1, to_char(*post.risk));
  return record;
}

void write_corpus(std::ostream& out, const Corpus& corpus, const CategorySet& categories) {
  for (const auto& post : corpus.posts) {
    out << post_to_json(post, categories).dump() << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus,
                 const CategorySet& categories) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIo, fmt::format("cannot write corpus '{}'", path.string()));
  }
  write_corpus(out, corpus, categories);
}

}  // namespace labeldebate
