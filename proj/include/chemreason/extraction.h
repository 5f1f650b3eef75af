#ifndef CHEMREASON_EXTRACTION_H_
#define CHEMREASON_EXTRACTION_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace chemreason {

// Byte range [begin, end) of a tag's content, tags excluded.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::string_view of(std::string_view text) const {
    return text.substr(begin, end - begin);
  }
};

struct TraceLayout {
  std::optional<Span> think_span;
  std::optional<Span> answer_span;
  // Exactly one <think>...</think> followed by exactly one
  // <answer>...</answer>, with only whitespace around and between them.
  bool well_formed = false;
};

TraceLayout validate_trace(std::string_view text);

enum class AnswerKind { kNone, kSmiles, kIupac };

enum class AnswerSource { kNone, kTagged, kFencedJson, kBbox, kBold, kBareFallback };

struct ExtractedAnswer {
  AnswerKind kind = AnswerKind::kNone;
  std::string value;
  AnswerSource source = AnswerSource::kNone;

  bool found() const { return kind != AnswerKind::kNone; }
};

// Tries, in order: <SMILES>/<IUPAC> tags, fenced JSON blocks, bbox{...},
// **bold** text, and finally a bare token. Within each family the last
// occurrence wins. `expected` must be kSmiles or kIupac.
//
//   tagged        literal, case-sensitive tags; last non-empty content
//   fenced_json   last ``` block holding an object with a string value under
//                 smiles/SMILES/product/answer (IUPAC: iupac/IUPAC/name/answer)
//   bbox          content of the last bbox{...}
//   bold          last **...** segment; for SMILES it must also parse
//   bare          SMILES: last whitespace-separated token that parses, after
//                 stripping quotes, backticks and trailing punctuation (single
//                 characters count only when they are the whole output);
//                 IUPAC: the whole output when it is a single line free of
//                 markup characters (< > { } * `)
ExtractedAnswer extract_answer(std::string_view text, AnswerKind expected);

std::string_view answer_source_name(AnswerSource source);
std::string_view answer_kind_name(AnswerKind kind);

}  // namespace chemreason

#endif  // CHEMREASON_EXTRACTION_H_
