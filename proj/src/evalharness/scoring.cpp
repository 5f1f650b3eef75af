#include <algorithm>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "chemreason/error.h"
#include "chemreason/evalharness.h"
#include "chemreason/extraction.h"
#include "chemreason/rlcore.h"
#include "chemreason/similarity.h"
#include "chemreason/smiles.h"
#include "json.hpp"

namespace chemreason {

EvalRecord parse_eval_record(std::string_view json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidRecord, fmt::format("bad JSON: {}", e.what()));
  }
  auto field = [&](const char *key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string())
      throw Error(ErrorCode::kInvalidRecord,
                  fmt::format("missing string field '{}'", key));
    return j[key].get<std::string>();
  };
  EvalRecord r;
  r.id = field("id");
  r.task = parse_task_kind(field("task"));
  r.raw_output = field("raw_output");
  r.ground_truth = field("ground_truth");
  return r;
}

std::vector<EvalRecord> read_eval_records(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kInvalidRecord, fmt::format("cannot open {}", path));
  std::vector<EvalRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      out.push_back(parse_eval_record(line));
    } catch (const Error &e) {
      throw Error(e.code(), fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return out;
}

RecordScore score_record(const EvalRecord &rec, const FingerprintParams &params) {
  const AnswerKind kind = answer_kind_for(rec.task);
  if (kind == AnswerKind::kNone) {
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("record {}: caption tasks have no scored answer", rec.id));
  }
  RecordScore s;
  ExtractedAnswer ans = extract_answer(rec.raw_output, kind);
  if (kind == AnswerKind::kIupac) {
    s.extracted = s.parsed = ans.found();
    s.exact = s.extracted
              && normalize_iupac(ans.value) == normalize_iupac(rec.ground_truth);
    s.similarity = s.exact ? 1.0 : 0.0;
    return s;
  }
  try {
    if (looks_like_reaction(rec.ground_truth))
      parse_reaction(rec.ground_truth);
    else
      parse_smiles(rec.ground_truth);
  } catch (const ParseError &e) {
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("record {}: ground truth does not parse: {}", rec.id,
                            e.what()));
  }
  s.extracted = ans.found();
  if (!s.extracted)
    return s;
  std::optional<StructureScore> cmp =
      compare_structures(ans.value, rec.ground_truth, params);
  if (!cmp)
    return s;
  s.parsed = true;
  s.similarity = cmp->similarity;
  s.exact = cmp->exact;
  return s;
}

MetricSummary summarize(std::span<const RecordScore> scores) {
  if (scores.empty())
    throw Error(ErrorCode::kEmptyInput, "no records to evaluate");
  MetricSummary m;
  double sum = 0.0;
  int hits = 0;
  for (const RecordScore &s: scores) {
    sum += s.similarity;
    hits += s.exact ? 1 : 0;
    m.n_parsed += s.parsed ? 1 : 0;
    m.n_extracted += s.extracted ? 1 : 0;
  }
  m.n_total = static_cast<int>(scores.size());
  m.avg_similarity = 100.0 * sum / m.n_total;
  m.tani_at_1 = 100.0 * hits / m.n_total;
  return m;
}

MetricSummary evaluate(std::span<const EvalRecord> records,
                       const FingerprintParams &params) {
  if (records.empty())
    throw Error(ErrorCode::kEmptyInput, "no records to evaluate");
  std::vector<RecordScore> scores;
  scores.reserve(records.size());
  for (const EvalRecord &r: records)
    scores.push_back(score_record(r, params));
  // Sum in a fixed order so the result does not depend on record order.
  std::sort(scores.begin(), scores.end(),
            [](const RecordScore &a, const RecordScore &b) {
              return a.similarity < b.similarity;
            });
  return summarize(scores);
}

std::string format_metric_table(
    const std::vector<std::pair<std::string, MetricSummary>> &rows) {
  std::size_t w = std::string_view("Benchmark").size();
  for (const auto &[name, m]: rows)
    w = std::max(w, name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>8}\n", "Benchmark", w,
                                "Avg Sim.", "Tani@1.0");
  for (const auto &[name, m]: rows) {
    out += fmt::format("{:<{}}  {:>8.1f}  {:>8.1f}\n", name, w, m.avg_similarity,
                       m.tani_at_1);
  }
  return out;
}

std::string metric_summary_json(const MetricSummary &m) {
  nlohmann::ordered_json j;
  j["avg_similarity"] = m.avg_similarity;
  j["tani_at_1"] = m.tani_at_1;
  j["n_total"] = m.n_total;
  j["n_parsed"] = m.n_parsed;
  j["n_extracted"] = m.n_extracted;
  return j.dump();
}

}  // namespace chemreason
