#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "chemreason/error.h"
#include "chemreason/evalharness.h"

namespace chemreason {
namespace {

// Bytes >= 0x80 count as word characters so UTF-8 text stays in one piece.
bool word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

std::size_t utf8_length(unsigned char lead) {
  if (lead >= 0xF0)
    return 4;
  if (lead >= 0xE0)
    return 3;
  if (lead >= 0xC0)
    return 2;
  return 1;
}

}  // namespace

std::vector<std::string> WhitespacePunctTokenizer::tokenize(
    std::string_view text) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (word_byte(c)) {
      std::size_t j = i;
      while (j < text.size() && word_byte(static_cast<unsigned char>(text[j])))
        ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(1, text[i]);
      ++i;
    }
  }
  return out;
}

BpeTokenizer BpeTokenizer::parse(std::string_view merges) {
  BpeTokenizer t;
  std::istringstream in { std::string(merges) };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream fields(line);
    std::string left, right, extra;
    if (!(fields >> left >> right) || (fields >> extra)) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("merge table line {}: expected two symbols", lineno));
    }
    t.ranks_.emplace(std::make_pair(left, right),
                     static_cast<int>(t.ranks_.size()));
  }
  return t;
}

BpeTokenizer BpeTokenizer::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot open {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> BpeTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> out;
  for (const std::string &word: WhitespacePunctTokenizer().tokenize(text)) {
    std::vector<std::string> sym;
    for (std::size_t i = 0; i < word.size();) {
      const std::size_t n = std::min(
          utf8_length(static_cast<unsigned char>(word[i])), word.size() - i);
      sym.push_back(word.substr(i, n));
      i += n;
    }
    while (sym.size() > 1) {
      int best = -1;
      std::size_t at = 0;
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
        auto it = ranks_.find({ sym[i], sym[i + 1] });
        if (it != ranks_.end() && (best < 0 || it->second < best)) {
          best = it->second;
          at = i;
        }
      }
      if (best < 0)
        break;
      const std::string left = sym[at], right = sym[at + 1];
      std::vector<std::string> next;
      for (std::size_t i = 0; i < sym.size(); ++i) {
        if (i + 1 < sym.size() && sym[i] == left && sym[i + 1] == right) {
          next.push_back(left + right);
          ++i;
        } else {
          next.push_back(sym[i]);
        }
      }
      sym = std::move(next);
    }
    for (std::string &s: sym)
      out.push_back(std::move(s));
  }
  return out;
}

TokenStats token_stats(std::span<const std::string> texts,
                       const Tokenizer &tokenizer) {
  if (texts.empty())
    throw Error(ErrorCode::kEmptyInput, "no texts for token statistics");
  std::vector<double> counts;
  counts.reserve(texts.size());
  for (const std::string &t: texts)
    counts.push_back(static_cast<double>(tokenizer.tokenize(t).size()));
  TokenStats s;
  s.sample_count = static_cast<int>(counts.size());
  double sum = 0.0;
  for (double c: counts)
    sum += c;
  s.mean = sum / s.sample_count;
  double var = 0.0;
  for (double c: counts)
    var += (c - s.mean) * (c - s.mean);
  s.sd = std::sqrt(var / s.sample_count);
  return s;
}

std::string format_token_table(
    std::string_view first_column,
    const std::vector<std::pair<std::string, TokenStats>> &rows) {
  std::size_t w = first_column.size();
  for (const auto &[name, s]: rows)
    w = std::max(w, name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>10}  {:>10}\n", first_column,
                                w, "Samples", "Average", "SD");
  for (const auto &[name, s]: rows) {
    out += fmt::format("{:<{}}  {:>8}  {:>10.2f}  {:>10.2f}\n", name, w,
                       s.sample_count, s.mean, s.sd);
  }
  return out;
}

}  // namespace chemreason
