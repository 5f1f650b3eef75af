#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "chemreason/error.h"
#include "chemreason/evalharness.h"
#include "chemreason/smiles.h"
#include "json.hpp"
#include "oracles.h"
#include "random_mol.h"

namespace chemreason {
namespace {

EvalRecord rec(std::string out, std::string gt,
               TaskKind task = TaskKind::kMolRecognition) {
  return { "r", task, std::move(out), std::move(gt) };
}

ErrorCode code_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kEmptyInput;
}

TEST(Score, Examples) {
  EXPECT_EQ(score_record(rec("<SMILES>OCC</SMILES>", "CCO")).similarity, 1.0);
  RecordScore s = score_record(rec("no idea", "CCO"));
  EXPECT_EQ(s.similarity, 0.0);
  EXPECT_FALSE(s.extracted);
  s = score_record(rec("<SMILES>CCN</SMILES>", "CCO"));
  EXPECT_EQ(s.similarity, 3.0 / 15.0);
  EXPECT_FALSE(s.exact);
}

TEST(Score, UnparseableCountsAsExtractedNotParsed) {
  RecordScore s = score_record(rec("<SMILES>C1CC</SMILES>", "CCO"));
  EXPECT_TRUE(s.extracted);
  EXPECT_FALSE(s.parsed);
  EXPECT_EQ(s.similarity, 0.0);
}

TEST(Score, IupacAndCaption) {
  EvalRecord r = rec("<IUPAC>Ethanol</IUPAC>", "ethanol", TaskKind::kMolToIupac);
  EXPECT_TRUE(score_record(r).exact);
  r.raw_output = "<IUPAC>methanol</IUPAC>";
  EXPECT_EQ(score_record(r).similarity, 0.0);
  EXPECT_EQ(code_of([] { score_record(rec("x", "y", TaskKind::kCaption)); }),
            ErrorCode::kInvalidRecord);
  EXPECT_EQ(code_of([] { score_record(rec("<SMILES>C</SMILES>", "C1CC")); }),
            ErrorCode::kInvalidRecord);
}

TEST(Score, IdenticalPredictionAlwaysOne) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    std::string s = write_smiles(testing::random_molecule(rng));
    RecordScore r = score_record(rec("<SMILES>" + s + "</SMILES>", s));
    ASSERT_EQ(r.similarity, 1.0) << s;
    ASSERT_TRUE(r.exact);
  }
}

TEST(Evaluate, ArithmeticExamples) {
  std::vector<RecordScore> s(4);
  const double sims[] = { 1.0, 1.0, 0.5, 0.9 };
  for (int i = 0; i < 4; ++i) {
    s[i].similarity = sims[i];
    s[i].exact = sims[i] == 1.0;
  }
  MetricSummary m = summarize(s);
  EXPECT_DOUBLE_EQ(m.avg_similarity, 85.0);
  EXPECT_EQ(m.tani_at_1, 50.0);

  std::vector<EvalRecord> all_exact(3, rec("<SMILES>CCO</SMILES>", "OCC"));
  m = evaluate(all_exact);
  EXPECT_EQ(m.avg_similarity, 100.0);
  EXPECT_EQ(m.tani_at_1, 100.0);

  std::vector<EvalRecord> none(3, rec("pass", "OCC"));
  m = evaluate(none);
  EXPECT_EQ(m.avg_similarity, 0.0);
  EXPECT_EQ(m.tani_at_1, 0.0);
  EXPECT_EQ(m.n_extracted, 0);

  EXPECT_EQ(code_of([] { evaluate(std::vector<EvalRecord> {}); }),
            ErrorCode::kEmptyInput);
}

TEST(Evaluate, PairSimilaritiesMatchOracle) {
  nlohmann::json pairs = nlohmann::json::parse(testing::read_text_file(
      testing::test_data_path("fingerprint_fixture.json")))["pairs"];
  auto frac = [&](const char *key) {
    return pairs[key]["common"].get<double>() / pairs[key]["union"].get<double>();
  };
  EXPECT_EQ(score_record(rec("<SMILES>CCCCN</SMILES>", "CCCCCCCC")).similarity,
            frac("octane_butylamine"));
  EXPECT_EQ(frac("octane_butylamine"), 0.5);
  EXPECT_EQ(score_record(rec("<SMILES>COC(=O)CCCCc1ccccc1</SMILES>",
                             "COC(=O)CCCc1ccccc1"))
                .similarity,
            frac("phenylbutanoate_phenylpentanoate"));
  EXPECT_EQ(frac("phenylbutanoate_phenylpentanoate"), 0.9);
}

TEST(Evaluate, FourRecordFixture) {
  auto records = read_eval_records(testing::test_data_path("eval_fixture.jsonl"));
  ASSERT_EQ(records.size(), 4u);
  std::vector<double> sims;
  for (const EvalRecord &r: records)
    sims.push_back(score_record(r).similarity);
  EXPECT_EQ(sims, (std::vector<double> { 1.0, 1.0, 0.5, 0.9 }));
  MetricSummary m = evaluate(records);
  EXPECT_DOUBLE_EQ(m.avg_similarity, 85.0);
  EXPECT_EQ(m.tani_at_1, 50.0);
  EXPECT_EQ(m.n_total, 4);
  EXPECT_EQ(m.n_extracted, 4);
  EXPECT_EQ(m.n_parsed, 4);
  std::string table = format_metric_table({ { "fixture", m } });
  EXPECT_EQ(table,
            "Benchmark  Avg Sim.  Tani@1.0\n"
            "fixture        85.0      50.0\n");
}

TEST(Evaluate, PermutationInvariant) {
  auto records = read_eval_records(testing::test_data_path("eval_fixture.jsonl"));
  std::mt19937_64 rng(1);
  std::vector<EvalRecord> more;
  for (int i = 0; i < 5; ++i)
    more.insert(more.end(), records.begin(), records.end());
  more.push_back(rec("<SMILES>CCN</SMILES>", "CCO"));
  more.push_back(rec("<SMILES>CCCO</SMILES>", "CCO"));
  const MetricSummary base = evaluate(more);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(more.begin(), more.end(), rng);
    MetricSummary m = evaluate(more);
    EXPECT_EQ(m.avg_similarity, base.avg_similarity);
    EXPECT_EQ(m.tani_at_1, base.tani_at_1);
  }
}

TEST(Records, Malformed) {
  EXPECT_EQ(code_of([] { parse_eval_record("{"); }), ErrorCode::kInvalidRecord);
  EXPECT_EQ(code_of([] { parse_eval_record(R"({"id":"a","task":"x","raw_output":"","ground_truth":"C"})"); }),
            ErrorCode::kInvalidRecord);
  EXPECT_EQ(code_of([] { parse_eval_record(R"({"id":"a","task":"caption"})"); }),
            ErrorCode::kInvalidRecord);
  EvalRecord r = parse_eval_record(
      R"({"id":"a","task":"mol_to_iupac","raw_output":"o","ground_truth":"g"})");
  EXPECT_EQ(r.task, TaskKind::kMolToIupac);
}

TEST(Summary, Json) {
  MetricSummary m { 85.0, 50.0, 4, 4, 4 };
  nlohmann::json j = nlohmann::json::parse(metric_summary_json(m));
  EXPECT_EQ(j["avg_similarity"].get<double>(), 85.0);
  EXPECT_EQ(j["tani_at_1"].get<double>(), 50.0);
  EXPECT_EQ(j["n_total"].get<int>(), 4);
}

TEST(Tokens, WhitespaceExamples) {
  WhitespacePunctTokenizer tok;
  std::vector<std::string> texts = { "a b c", "a" };
  TokenStats s = token_stats(texts, tok);
  EXPECT_EQ(s.sample_count, 2);
  EXPECT_EQ(s.mean, 2.0);
  EXPECT_EQ(s.sd, 1.0);
  texts = { "only one text here" };
  EXPECT_EQ(token_stats(texts, tok).sd, 0.0);
  EXPECT_EQ(code_of([&] { token_stats(std::vector<std::string> {}, tok); }),
            ErrorCode::kEmptyInput);
}

TEST(Tokens, PunctuationSplits) {
  WhitespacePunctTokenizer tok;
  EXPECT_EQ(tok.tokenize("CC(=O)O, done."),
            (std::vector<std::string> { "CC", "(", "=", "O", ")", "O", ",", "done",
                                        "." }));
  EXPECT_TRUE(tok.tokenize("  \n\t").empty());
}

TEST(Tokens, HandComputedStats) {
  // Counts 3, 5, 7, 9: mean 6, population variance (9+1+1+9)/4 = 5.
  WhitespacePunctTokenizer tok;
  std::vector<std::string> texts = { "a b c", "a b c d e", "x(y)z+w", "1 2 3 4 5 6 7 8 9" };
  TokenStats s = token_stats(texts, tok);
  EXPECT_EQ(s.mean, 6.0);
  EXPECT_DOUBLE_EQ(s.sd * s.sd, 5.0);
}

TEST(Tokens, BpeMerges) {
  BpeTokenizer bpe = BpeTokenizer::parse("#version: test\na b\nab c\n\nc c\n");
  EXPECT_EQ(bpe.num_merges(), 3u);
  EXPECT_EQ(bpe.tokenize("abc abd"),
            (std::vector<std::string> { "abc", "ab", "d" }));
  EXPECT_EQ(bpe.tokenize("cccc"), (std::vector<std::string> { "cc", "cc" }));
  EXPECT_EQ(bpe.tokenize("ccc"), (std::vector<std::string> { "cc", "c" }));
  std::vector<std::string> texts = { "abc abd", "cccc" };
  TokenStats s = token_stats(texts, bpe);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_EQ(s.sd, 0.5);
  EXPECT_EQ(code_of([] { BpeTokenizer::parse("a b c\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { BpeTokenizer::parse("a\n"); }), ErrorCode::kConfigError);
}

TEST(Tokens, TableMirrorsColumns) {
  std::string t = format_token_table(
      "Reasoning Data", { { "Molecule", { 3, 409.925, 139.034 } } });
  EXPECT_EQ(t,
            "Reasoning Data   Samples     Average          SD\n"
            "Molecule               3      409.93      139.03\n");
}

}  // namespace
}  // namespace chemreason
