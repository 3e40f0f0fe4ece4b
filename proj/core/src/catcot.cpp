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

#include "labeldebate/catcot.hpp"

#include "labeldebate/error.hpp"
#include "labeldebate/text.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <set>

namespace labeldebate {

const char* to_string(Role role) noexcept {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

const char* to_string(PromptPurpose purpose) noexcept {
  switch (purpose) {
    case PromptPurpose::kInitial: return "initial";
    case PromptPurpose::kInitialConfidence: return "initial_confidence";
    case PromptPurpose::kDebate: return "debate";
    case PromptPurpose::kJudge: return "judge";
    case PromptPurpose::kDownstream: return "downstream";
  }
  return "initial";
}

const std::string& PromptBundle::last_user_text() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::kUser) return it->content;
  }
  throw Error(ErrorCode::kInvalidArgument, "prompt has no user message");
}

void PromptBundle::append_to_last_user(std::string_view extra) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::kUser) {
      it->content += extra;
      return;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "prompt has no user message");
}

const CategoryJudgement* AgentResponse::judgement(std::string_view category) const {
  for (const auto& j : judgements) {
    if (j.category == category) return &j;
  }
  return nullptr;
}

LabelSet AgentResponse::yes_verdicts() const {
  std::set<std::string> yes;
  for (const auto& j : judgements) {
    if (j.verdict) yes.insert(j.category);
  }
  return LabelSet(std::move(yes));
}

const char* const kFormatReminder =
    "\n\nYour previous response did not follow the required output format. "
    "Answer again and follow the output format exactly.";

namespace templates {

std::string few_shot_block(const TaskSpec& task) {
  std::string out;
  for (std::size_t i = 0; i < task.few_shot.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += fmt::format("Example {}:\nPost:\n\"{}\"\n\nOutput:\n{}", i + 1,
                       task.few_shot[i].post, text::trim(task.few_shot[i].output));
  }
  return out;
}

std::string explanation_format(const CategorySet& categories, std::string_view placeholder,
                               std::string_view suffix) {
  std::string out;
  for (const auto& c : categories.categories()) {
    if (!out.empty()) out += '\n';
    out += fmt::format("- {}: [{}]. So the answer is yes (or is no).{}", c.name, placeholder,
                       suffix);
  }
  return out;
}

std::string quoted_post(const Post& post) { return fmt::format("\"{}\"", post.text); }

}  // namespace templates

PromptBundle build_catcot_prompt(const TaskSpec& task, const Post& post, ConfidenceMode mode) {
  const auto& ind = task.indicator;
  const bool confident = mode == ConfidenceMode::kSelfVerbalised;
  std::string p;
  p += task.intro_line();
  p += "\n\n";
  p += task.task_definition();
  p += "\n\nInstructions:\n";
  p += fmt::format(
      "1. Read the post carefully and evaluate whether it matches each defined {} category.\n",
      ind);
  p += fmt::format(
      "2. For each {} category, explain your reasoning. If a category applies, support your "
      "answer with direct evidence from the post. If it does not apply, explain why there is "
      "insufficient or no evidence. Clearly state \"yes\" or \"no\" for each category.\n",
      ind);
  if (confident) {
    p += fmt::format(
        "3. List all broad {} categories that apply. If more than one applies, separate them "
        "with commas.\n",
        ind);
    p += "4. Include a confidence score (from 1 to 10, where higher means more confident) for "
         "each category in both the explanation and the final answer, based on how certain you "
         "are about your reasoning and conclusion.\n";
  } else {
    p += fmt::format(
        "3.Finally, list all broad {} categories that apply. If more than one applies, "
        "separate them with commas.\n",
        ind);
  }
  if (!task.few_shot.empty()) {
    p += "\nBelow are some examples:\n";
    p += templates::few_shot_block(task);
    p += '\n';
  }
  p += "\nPost to Analyze:\nPost:\n";
  p += templates::quoted_post(post);
  p += "\n\nPlease strictly follow the output format exactly as shown below. Do not use bold, "
       "markdown, or extra formatting.\n\nOutput Format:\nExplanation:\n";
  p += templates::explanation_format(task.category_set, "reason",
                                     confident ? " (Confidence: X)" : "");
  p += "\n\nAnswer:\n";
  p += task.answer_instructions();
  if (confident) {
    p += "\nFor each selected category, include a confidence score in the format: Category "
         "Name (Confidence: X).";
  }

  PromptBundle bundle;
  bundle.purpose = confident ? PromptPurpose::kInitialConfidence : PromptPurpose::kInitial;
  bundle.messages.push_back({Role::kUser, std::move(p)});
  return bundle;
}

namespace {

constexpr std::string_view kTerminator = "so the answer is";

struct ConfidenceMatch {
  std::size_t begin = std::string::npos;
  std::size_t end = std::string::npos;
  std::string value;
};

// Finds the last "(Confidence: X)" annotation in `s`.
std::optional<ConfidenceMatch> find_confidence(std::string_view s) {
  auto pos = std::string_view::npos;
  for (std::size_t from = 0;;) {
    auto open = s.find('(', from);
    if (open == std::string_view::npos) break;
    auto inner = text::trim(s.substr(open + 1));
    if (text::istarts_with(inner, "confidence")) pos = open;
    from = open + 1;
  }
  if (pos == std::string_view::npos) return std::nullopt;
  auto close = s.find(')', pos);
  if (close == std::string_view::npos) return std::nullopt;
  auto inner = text::trim(s.substr(pos + 1, close - pos - 1));
  inner.remove_prefix(std::string_view("confidence").size());
  inner = text::trim(inner);
  if (!inner.empty() && (inner.front() == ':' || inner.front() == '=')) inner.remove_prefix(1);
  return ConfidenceMatch{pos, close + 1, std::string(text::trim(inner))};
}

double parse_confidence_value(std::string_view raw, std::string_view where) {
  // Digits with an optional fractional part; nothing else.
  bool ok = !raw.empty() && std::isdigit(static_cast<unsigned char>(raw.front()));
  std::size_t dots = 0;
  for (char c : raw) {
    if (c == '.') {
      ++dots;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      ok = false;
    }
  }
  if (!ok || dots > 1 || raw.back() == '.') {
    throw Error(ErrorCode::kConfidenceParse,
                fmt::format("unreadable confidence '{}' for {}", raw, where));
  }
  double value = 0.0;
  auto res = std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (res.ec != std::errc() || value < 1.0 || value > 10.0) {
    throw Error(ErrorCode::kConfidenceParse,
                fmt::format("confidence '{}' for {} is outside [1, 10]", raw, where));
  }
  return value;
}

// Strips list markers such as "- ", "* ", "• ", "1. ".
std::string_view strip_bullet(std::string_view line) {
  line = text::trim(line);
  if (text::istarts_with(line, "\xE2\x80\xA2")) return text::trim(line.substr(3));
  if (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '+')) {
    return text::trim(line.substr(1));
  }
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')') && i + 1 < line.size() &&
      line[i + 1] == ' ') {
    return text::trim(line.substr(i + 1));
  }
  return line;
}

std::string_view strip_heading(std::string_view line) {
  line = text::trim(line);
  while (!line.empty() && line.front() == '#') line.remove_prefix(1);
  return text::trim(line);
}

// Returns the text after the header word when `line` is a block header such
// as "Answer:" / "Answer" / "Final Answer: X".
std::optional<std::string_view> match_header(std::string_view line, std::string_view word) {
  line = strip_heading(line);
  if (text::istarts_with(line, "final ")) line = text::trim(line.substr(6));
  if (!text::istarts_with(line, word)) return std::nullopt;
  auto rest = text::trim(line.substr(word.size()));
  if (rest.empty()) return rest;
  if (rest.front() == ':') return text::trim(rest.substr(1));
  return std::nullopt;
}

// Matches "<category name>:" at the start of an explanation line.
std::optional<std::pair<std::string, std::string_view>> match_category_line(
    std::string_view line, const CategorySet& categories) {
  auto body = strip_bullet(line);
  std::optional<std::pair<std::string, std::string_view>> best;
  std::size_t best_len = 0;
  for (const auto& c : categories.categories()) {
    if (!text::istarts_with(body, c.name)) continue;
    auto rest = text::trim(body.substr(c.name.size()));
    if (rest.empty() || rest.front() != ':') continue;
    if (c.name.size() > best_len) {
      best_len = c.name.size();
      best = std::make_pair(c.name, text::trim(rest.substr(1)));
    }
  }
  return best;
}

struct ParsedLine {
  std::string reasoning;
  bool verdict = false;
  std::optional<double> confidence;
};

ParsedLine parse_judgement_text(std::string body, const std::string& category) {
  ParsedLine out;
  if (auto conf = find_confidence(body)) {
    out.confidence = parse_confidence_value(conf->value, fmt::format("category '{}'", category));
    body.erase(conf->begin, conf->end - conf->begin);
  }
  std::string_view view = body;
  auto at = text::irfind(view, kTerminator);
  std::size_t verdict_from = 0;
  if (at != std::string_view::npos) {
    verdict_from = at + kTerminator.size();
  } else {
    at = text::irfind(view, "the answer is");
    if (at == std::string_view::npos) {
      throw Error(ErrorCode::kVerdictParse,
                  fmt::format("no 'the answer is yes/no' clause for '{}'", category));
    }
    verdict_from = at + std::string_view("the answer is").size();
  }
  auto tail = text::trim(view.substr(verdict_from));
  std::string word;
  for (char c : tail) {
    if (!std::isalpha(static_cast<unsigned char>(c))) break;
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (word == "yes") {
    out.verdict = true;
  } else if (word == "no") {
    out.verdict = false;
  } else {
    throw Error(ErrorCode::kVerdictParse,
                fmt::format("verdict for '{}' is neither yes nor no", category));
  }
  auto reasoning = text::trim(view.substr(0, at));
  while (!reasoning.empty() && (reasoning.back() == ',' || reasoning.back() == ';')) {
    reasoning.remove_suffix(1);
    reasoning = text::trim(reasoning);
  }
  out.reasoning = std::string(reasoning);
  return out;
}

std::string strip_trailing_period(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && s.back() == '.') s.remove_suffix(1);
  return std::string(text::trim(s));
}

struct AnswerItems {
  std::vector<std::string> labels;
  std::map<std::string, double> confidences;
};

AnswerItems parse_answer_block(const std::vector<std::string_view>& lines,
                               const CategorySet& categories) {
  AnswerItems out;
  std::vector<std::string> unresolved;
  for (auto raw_line : lines) {
    auto line = strip_bullet(raw_line);
    if (line.empty()) continue;
    auto pieces = text::split(line, ',');
    std::size_t i = 0;
    while (i < pieces.size()) {
      if (text::trim(pieces[i]).empty()) {
        ++i;
        continue;
      }
      bool matched = false;
      for (std::size_t j = pieces.size(); j-- > i;) {
        std::string candidate;
        for (std::size_t k = i; k <= j; ++k) {
          if (k > i) candidate += ',';
          candidate += pieces[k];
        }
        std::optional<double> confidence;
        std::string_view where = candidate;
        std::string name_part = candidate;
        auto conf = find_confidence(where);
        if (conf) name_part = candidate.substr(0, conf->begin);
        auto name = strip_trailing_period(name_part);
        if (name.empty() && !conf) continue;
        auto resolved = categories.resolve(name);
        if (!resolved) continue;
        if (conf) {
          confidence =
              parse_confidence_value(conf->value, fmt::format("answer label '{}'", *resolved));
        }
        out.labels.push_back(*resolved);
        if (confidence) out.confidences[*resolved] = *confidence;
        i = j + 1;
        matched = true;
        break;
      }
      if (!matched) {
        auto piece = strip_trailing_period(pieces[i]);
        if (auto conf = find_confidence(piece)) {
          piece = strip_trailing_period(std::string_view(piece).substr(0, conf->begin));
        }
        // A literal "None" means "no label" for taxonomies without a none class.
        if (!(text::iequals(piece, "none") && !categories.none_label())) {
          unresolved.push_back(piece);
        }
        ++i;
      }
    }
  }
  if (!unresolved.empty()) {
    std::string listed;
    for (const auto& u : unresolved) {
      if (!listed.empty()) listed += ", ";
      listed += fmt::format("'{}'", u);
    }
    throw Error(ErrorCode::kUnknownLabel, fmt::format("unknown answer labels: {}", listed));
  }
  return out;
}

}  // namespace

AgentResponse parse_catcot_response(std::string_view raw, const CategorySet& categories,
                                    ConfidenceMode mode) {
  const auto cleaned = text::strip_markdown_bold(raw);
  const auto lines = text::split_lines(cleaned);

  std::optional<std::size_t> explanation_at;
  std::optional<std::size_t> answer_at;
  std::string_view explanation_inline;
  std::string_view answer_inline;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!explanation_at) {
      if (auto rest = match_header(lines[i], "explanation")) {
        explanation_at = i;
        explanation_inline = *rest;
      }
      continue;
    }
    if (auto rest = match_header(lines[i], "answer")) {
      answer_at = i;
      answer_inline = *rest;
      break;
    }
  }
  if (!explanation_at) throw Error(ErrorCode::kMissingBlock, "no 'Explanation:' block");
  if (!answer_at) throw Error(ErrorCode::kMissingBlock, "no 'Answer:' block");

  AgentResponse response;
  response.raw_text = std::string(raw);

  // Group explanation lines into per-category items.
  std::vector<std::pair<std::string, std::string>> items;
  auto consume = [&](std::string_view line) {
    if (text::trim(line).empty()) return;
    if (auto m = match_category_line(line, categories)) {
      items.emplace_back(m->first, std::string(m->second));
    } else if (!items.empty()) {
      auto& body = items.back().second;
      if (!body.empty()) body += ' ';
      body += text::trim(line);
    }
  };
  consume(explanation_inline);
  for (std::size_t i = *explanation_at + 1; i < *answer_at; ++i) consume(lines[i]);

  std::map<std::string, ParsedLine> parsed;
  for (auto& [category, body] : items) {
    if (parsed.count(category)) {
      response.warnings.push_back(
          fmt::format("duplicate explanation for '{}'; keeping the first", category));
      continue;
    }
    auto line = parse_judgement_text(body, category);
    if (line.reasoning.empty()) continue;  // reported as missing below
    parsed.emplace(category, std::move(line));
  }

  std::vector<std::string> missing;
  for (const auto& c : categories.categories()) {
    auto it = parsed.find(c.name);
    if (it == parsed.end()) {
      missing.push_back(c.name);
      continue;
    }
    if (mode == ConfidenceMode::kSelfVerbalised && !it->second.confidence) {
      throw Error(ErrorCode::kConfidenceParse,
                  fmt::format("missing confidence for category '{}'", c.name));
    }
    response.judgements.push_back(
        {c.name, std::move(it->second.reasoning), it->second.verdict, it->second.confidence});
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingCategory,
                fmt::format("no judgement for: {}", text::join(missing, ", ")));
  }

  std::vector<std::string_view> answer_lines;
  answer_lines.push_back(answer_inline);
  for (std::size_t i = *answer_at + 1; i < lines.size(); ++i) answer_lines.push_back(lines[i]);
  auto items_out = parse_answer_block(answer_lines, categories);

  response.answer = normalize_label_set(items_out.labels, categories);
  if (response.answer.empty() && categories.none_label()) {
    response.answer = LabelSet{*categories.none_label()};
  }
  for (const auto& [label, value] : items_out.confidences) {
    if (response.answer.contains(label)) response.answer_confidences[label] = value;
  }
  if (mode == ConfidenceMode::kSelfVerbalised) {
    for (const auto& label : response.answer.labels()) {
      if (!response.answer_confidences.count(label)) {
        throw Error(ErrorCode::kConfidenceParse,
                    fmt::format("missing confidence for answer label '{}'", label));
      }
    }
  }

  const auto verdicts = response.yes_verdicts();
  auto yes = normalize_label_set(
      std::vector<std::string>(verdicts.labels().begin(), verdicts.labels().end()), categories);
  if (yes.empty() && categories.none_label()) yes = LabelSet{*categories.none_label()};
  if (!(yes == response.answer)) {
    response.warnings.emplace_back(
        "answer block disagrees with per-category verdicts; answer block wins");
  }
  return response;
}

StepList segment_steps(std::string_view reasoning) {
  auto cut = text::ifind(reasoning, kTerminator);
  if (cut != std::string_view::npos) reasoning = reasoning.substr(0, cut);
  StepList steps;
  std::size_t start = 0;
  for (std::size_t i = 0; i < reasoning.size(); ++i) {
    const char c = reasoning[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool boundary = i + 1 == reasoning.size() ||
                          std::isspace(static_cast<unsigned char>(reasoning[i + 1]));
    if (!boundary) continue;
    auto sentence = text::trim(reasoning.substr(start, i + 1 - start));
    if (!sentence.empty()) steps.emplace_back(sentence);
    start = i + 1;
  }
  auto rest = text::trim(reasoning.substr(start));
  if (!rest.empty()) steps.emplace_back(rest);
  return steps;
}

std::string render_response(const AgentResponse& response, const CategorySet& categories,
                            ConfidenceMode mode) {
  const bool confident = mode == ConfidenceMode::kSelfVerbalised;
  std::string out = "Explanation:\n";
  for (const auto& j : response.judgements) {
    out += fmt::format("- {}: {} So the answer is {}.", j.category, j.reasoning,
                       j.verdict ? "yes" : "no");
    if (confident) {
      if (!j.reasoning_confidence) {
        throw Error(ErrorCode::kMissingConfidence,
                    fmt::format("no confidence for category '{}'", j.category));
      }
      out += fmt::format(" (Confidence: {})", text::format_score(*j.reasoning_confidence));
    }
    out += '\n';
  }
  out += "\nAnswer:\n";
  std::vector<std::string> items;
  for (const auto& label : response.answer.ordered(categories)) {
    if (!confident) {
      items.push_back(label);
      continue;
    }
    auto it = response.answer_confidences.find(label);
    if (it == response.answer_confidences.end()) {
      throw Error(ErrorCode::kMissingConfidence,
                  fmt::format("no confidence for answer label '{}'", label));
    }
    items.push_back(fmt::format("{} (Confidence: {})", label, text::format_score(it->second)));
  }
  out += text::join(items, ", ");
  return out;
}

}  // namespace labeldebate
