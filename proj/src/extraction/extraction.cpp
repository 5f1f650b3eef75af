#include "chemreason/extraction.h"

#include <array>
#include <vector>

#include "json.hpp"

#include "chemreason/error.h"
#include "chemreason/smiles.h"

namespace chemreason {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kWhitespace);
  if (b == std::string_view::npos)
    return {};
  return s.substr(b, s.find_last_not_of(kWhitespace) - b + 1);
}

bool only_whitespace(std::string_view s) {
  return s.find_first_not_of(kWhitespace) == std::string_view::npos;
}

std::size_t count(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string_view::npos;
       p = text.find(needle, p + needle.size()))
    ++n;
  return n;
}

// First open tag and the first close tag after it.
std::optional<Span> locate(std::string_view text, std::string_view open,
                           std::string_view close) {
  const auto o = text.find(open);
  if (o == std::string_view::npos)
    return std::nullopt;
  const auto c = text.find(close, o + open.size());
  if (c == std::string_view::npos)
    return std::nullopt;
  return Span { o + open.size(), c };
}

bool parses_as_smiles(std::string_view s) {
  if (s.empty())
    return false;
  try {
    if (looks_like_reaction(s))
      return parse_reaction(s).well_formed();
    parse_smiles(s);
    return true;
  } catch (const Error &) {
    return false;
  }
}

std::string_view strip_decoration(std::string_view s) {
  constexpr std::string_view kQuotes = "\"'`";
  constexpr std::string_view kTrailing = ".,;:!?";
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    if (kQuotes.find(s.front()) != std::string_view::npos) {
      s.remove_prefix(1);
      changed = true;
    }
    if (!s.empty() && (kQuotes.find(s.back()) != std::string_view::npos
                       || kTrailing.find(s.back()) != std::string_view::npos)) {
      s.remove_suffix(1);
      changed = true;
    }
  }
  return s;
}

std::optional<std::string> last_tagged(std::string_view text,
                                       std::string_view open,
                                       std::string_view close) {
  std::optional<std::string> best;
  std::size_t from = 0;
  while (true) {
    const auto o = text.find(open, from);
    if (o == std::string_view::npos)
      break;
    const auto c = text.find(close, o + open.size());
    if (c == std::string_view::npos)
      break;
    std::string_view v = trim(text.substr(o + open.size(),
                                          c - o - open.size()));
    if (!v.empty())
      best = std::string(v);
    from = c + close.size();
  }
  return best;
}

std::optional<std::string> last_fenced_json(std::string_view text,
                                            AnswerKind expected) {
  static constexpr std::array<std::string_view, 4> kSmilesKeys = {
    "smiles", "SMILES", "product", "answer",
  };
  static constexpr std::array<std::string_view, 4> kIupacKeys = {
    "iupac", "IUPAC", "name", "answer",
  };
  const auto &keys = expected == AnswerKind::kIupac ? kIupacKeys : kSmilesKeys;

  std::optional<std::string> best;
  std::size_t from = 0;
  while (true) {
    const auto o = text.find("```", from);
    if (o == std::string_view::npos)
      break;
    const auto body_start = text.find('\n', o + 3);
    if (body_start == std::string_view::npos)
      break;
    const auto c = text.find("```", body_start);
    if (c == std::string_view::npos)
      break;
    from = c + 3;
    const std::string_view info = trim(text.substr(o + 3, body_start - o - 3));
    if (!info.empty() && info != "json" && info != "JSON")
      continue;
    const auto doc = nlohmann::json::parse(
        text.substr(body_start + 1, c - body_start - 1), nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
      continue;
    for (std::string_view key: keys) {
      auto it = doc.find(std::string(key));
      if (it != doc.end() && it->is_string()) {
        std::string_view v = trim(it->get_ref<const std::string &>());
        if (!v.empty()) {
          best = std::string(v);
          break;
        }
      }
    }
  }
  return best;
}

std::optional<std::string> last_bbox(std::string_view text) {
  std::optional<std::string> best;
  std::size_t from = 0;
  while (true) {
    const auto o = text.find("bbox{", from);
    if (o == std::string_view::npos)
      break;
    const auto c = text.find('}', o + 5);
    if (c == std::string_view::npos)
      break;
    std::string_view v = trim(text.substr(o + 5, c - o - 5));
    if (!v.empty())
      best = std::string(v);
    from = c + 1;
  }
  return best;
}

std::optional<std::string> last_bold(std::string_view text,
                                     AnswerKind expected) {
  std::optional<std::string> best;
  std::size_t from = 0;
  while (true) {
    const auto o = text.find("**", from);
    if (o == std::string_view::npos)
      break;
    const auto c = text.find("**", o + 2);
    if (c == std::string_view::npos)
      break;
    std::string_view v = trim(text.substr(o + 2, c - o - 2));
    if (expected == AnswerKind::kSmiles)
      v = strip_decoration(v);
    if (!v.empty()
        && (expected == AnswerKind::kIupac || parses_as_smiles(v)))
      best = std::string(v);
    from = c + 2;
  }
  return best;
}

std::optional<std::string> bare_fallback(std::string_view text,
                                         AnswerKind expected) {
  const std::string_view whole = trim(text);
  if (expected == AnswerKind::kIupac) {
    // Markup left over from other answer formats is not a name.
    if (whole.empty() || whole.find_first_of("\n<>{}*`") != std::string_view::npos)
      return std::nullopt;
    return std::string(whole);
  }
  std::vector<std::string_view> tokens;
  std::size_t p = 0;
  while (p < whole.size()) {
    const auto b = whole.find_first_not_of(kWhitespace, p);
    if (b == std::string_view::npos)
      break;
    auto e = whole.find_first_of(kWhitespace, b);
    if (e == std::string_view::npos)
      e = whole.size();
    tokens.push_back(whole.substr(b, e - b));
    p = e;
  }
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    std::string_view t = strip_decoration(*it);
    if (t.size() < 2 && tokens.size() > 1)
      continue;
    if (parses_as_smiles(t))
      return std::string(t);
  }
  return std::nullopt;
}

}  // namespace

TraceLayout validate_trace(std::string_view text) {
  TraceLayout layout;
  layout.think_span = locate(text, "<think>", "</think>");
  layout.answer_span = locate(text, "<answer>", "</answer>");
  if (!layout.think_span || !layout.answer_span)
    return layout;
  if (count(text, "<think>") != 1 || count(text, "</think>") != 1
      || count(text, "<answer>") != 1 || count(text, "</answer>") != 1)
    return layout;
  const Span &t = *layout.think_span;
  const Span &a = *layout.answer_span;
  const std::size_t think_open = t.begin - 7;
  const std::size_t think_close_end = t.end + 8;
  const std::size_t answer_open = a.begin - 8;
  const std::size_t answer_close_end = a.end + 9;
  layout.well_formed =
      only_whitespace(text.substr(0, think_open))
      && answer_open >= think_close_end
      && only_whitespace(
          text.substr(think_close_end, answer_open - think_close_end))
      && only_whitespace(text.substr(answer_close_end));
  return layout;
}

ExtractedAnswer extract_answer(std::string_view text, AnswerKind expected) {
  if (expected == AnswerKind::kNone)
    return {};
  auto make = [&](std::optional<std::string> v, AnswerSource src) {
    return ExtractedAnswer { expected, std::move(*v), src };
  };
  const bool iupac = expected == AnswerKind::kIupac;
  if (auto v = last_tagged(text, iupac ? "<IUPAC>" : "<SMILES>",
                           iupac ? "</IUPAC>" : "</SMILES>"))
    return make(std::move(v), AnswerSource::kTagged);
  if (auto v = last_fenced_json(text, expected))
    return make(std::move(v), AnswerSource::kFencedJson);
  if (auto v = last_bbox(text))
    return make(std::move(v), AnswerSource::kBbox);
  if (auto v = last_bold(text, expected))
    return make(std::move(v), AnswerSource::kBold);
  if (auto v = bare_fallback(text, expected))
    return make(std::move(v), AnswerSource::kBareFallback);
  return {};
}

std::string_view answer_source_name(AnswerSource source) {
  switch (source) {
  case AnswerSource::kNone: return "none";
  case AnswerSource::kTagged: return "tagged";
  case AnswerSource::kFencedJson: return "fenced_json";
  case AnswerSource::kBbox: return "bbox";
  case AnswerSource::kBold: return "bold";
  case AnswerSource::kBareFallback: return "bare_fallback";
  }
  return "none";
}

std::string_view answer_kind_name(AnswerKind kind) {
  switch (kind) {
  case AnswerKind::kNone: return "none";
  case AnswerKind::kSmiles: return "smiles";
  case AnswerKind::kIupac: return "iupac";
  }
  return "none";
}

}  // namespace chemreason
