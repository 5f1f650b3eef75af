#ifndef CHEMREASON_EVALHARNESS_H_
#define CHEMREASON_EVALHARNESS_H_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chemreason/fingerprint.h"
#include "chemreason/task.h"

namespace chemreason {

struct EvalRecord {
  std::string id;
  TaskKind task = TaskKind::kMolRecognition;
  std::string raw_output;
  std::string ground_truth;
};

// One JSON object per line: {id, task, raw_output, ground_truth}.
// Throws Error(kInvalidRecord) with the line number on malformed input.
EvalRecord parse_eval_record(std::string_view json_line);
std::vector<EvalRecord> read_eval_records(const std::string &path);

struct RecordScore {
  double similarity = 0.0;
  bool exact = false;      // counted by Tani@1.0
  bool extracted = false;  // an answer of the expected kind was found
  bool parsed = false;     // ... and it parsed (names always count as parsed)
};

// Extract, parse, fingerprint, compare. Failures score 0. IUPAC records score
// 1 or 0 by normalized string equality. Throws Error(kInvalidRecord) for
// caption records and for SMILES ground truths that do not parse.
RecordScore score_record(const EvalRecord &rec,
                         const FingerprintParams &params = {});

struct MetricSummary {
  double avg_similarity = 0.0;  // percent
  double tani_at_1 = 0.0;       // percent
  int n_total = 0;
  int n_parsed = 0;
  int n_extracted = 0;
};

// Throws Error(kEmptyInput) for no records.
MetricSummary summarize(std::span<const RecordScore> scores);
MetricSummary evaluate(std::span<const EvalRecord> records,
                       const FingerprintParams &params = {});

// Plain-text table with "Avg Sim." and "Tani@1.0" columns, one decimal.
std::string format_metric_table(
    const std::vector<std::pair<std::string, MetricSummary>> &rows);
std::string metric_summary_json(const MetricSummary &summary);

class Tokenizer {
public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  virtual std::string_view name() const = 0;
};

// Runs of letters/digits form one token; every other non-space byte is a
// token of its own; whitespace separates.
class WhitespacePunctTokenizer: public Tokenizer {
public:
  std::vector<std::string> tokenize(std::string_view text) const override;
  std::string_view name() const override { return "whitespace"; }
};

// Byte-pair merges applied inside each pre-token of WhitespacePunctTokenizer.
// Merge file: one "left right" pair per line in priority order; blank lines
// and lines starting with '#' are skipped.
class BpeTokenizer: public Tokenizer {
public:
  // Throws Error(kConfigError) on malformed lines.
  static BpeTokenizer parse(std::string_view merges);
  static BpeTokenizer load(const std::string &path);

  std::vector<std::string> tokenize(std::string_view text) const override;
  std::string_view name() const override { return "bpe"; }
  std::size_t num_merges() const { return ranks_.size(); }

private:
  std::map<std::pair<std::string, std::string>, int> ranks_;
};

struct TokenStats {
  int sample_count = 0;
  double mean = 0.0;
  double sd = 0.0;  // population
};

// Throws Error(kEmptyInput) for no texts.
TokenStats token_stats(std::span<const std::string> texts,
                       const Tokenizer &tokenizer);

// Columns: <first_column> / Samples / Average / SD (two decimals).
std::string format_token_table(
    std::string_view first_column,
    const std::vector<std::pair<std::string, TokenStats>> &rows);

}  // namespace chemreason

#endif  // CHEMREASON_EVALHARNESS_H_
