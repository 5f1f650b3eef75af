// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Each check draws on the independent oracles in
// tests/support and the fixtures in tests/data.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <unistd.h>

#include <fmt/format.h>

#include "chemreason/canonical.h"
#include "chemreason/evalharness.h"
#include "chemreason/extraction.h"
#include "chemreason/fingerprint.h"
#include "chemreason/funcgroups.h"
#include "chemreason/pipeline/pipeline.h"
#include "chemreason/rlcore.h"
#include "chemreason/smiles.h"
#include "json.hpp"
#include "oracles.h"
#include "random_mol.h"

namespace chemreason {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;
using testing::read_lines;
using testing::read_text_file;
using testing::test_data_path;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int heavy_atoms(const MolGraph &m) {
  int n = 0;
  for (int i = 0; i < m.num_atoms(); ++i)
    n += m.atom(i).element != 1;
  return n;
}

// Random molecules within the heavy-atom limit, from a fixed seed.
std::vector<MolGraph> random_corpus(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MolGraph> out;
  while (static_cast<int>(out.size()) < count) {
    MolGraph m = testing::random_molecule(rng);
    if (heavy_atoms(m) <= 30 && m.num_atoms() > 0)
      out.push_back(std::move(m));
  }
  return out;
}

Outcome canonical_invariance() {
  const auto t0 = Clock::now();
  const auto corpus = random_corpus(500, 1);
  long checked = 0, same = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string canon = write_smiles(corpus[i]);
    for (std::uint64_t k = 0; k < 20; ++k) {
      const std::string spelled = write_smiles(corpus[i], WriteMode::randomized(i * 1000 + k));
      ++checked;
      if (write_smiles(parse_smiles(spelled)) == canon)
        ++same;
      else if (first_bad.empty())
        first_bad = spelled;
    }
  }
  const double secs = seconds_since(t0);
  return { same == checked && secs < 30.0,
           fmt::format("{}/{} re-spellings identical, {:.2f} s (limit 30 s){}", same, checked,
                       secs, first_bad.empty() ? "" : "; first mismatch " + first_bad) };
}

Outcome round_trip() {
  long total = 0, ok = 0;
  std::string first_bad;
  auto check = [&](const MolGraph &m) {
    ++total;
    const std::string canon = write_smiles(m);
    const MolGraph back = parse_smiles(canon);
    if (molecules_equal(back, m) && write_smiles(back) == canon)
      ++ok;
    else if (first_bad.empty())
      first_bad = canon;
  };
  for (const MolGraph &m: random_corpus(500, 1))
    check(m);
  int fixtures = 0;
  for (const std::string &line: read_lines(test_data_path("case_smiles.txt"))) {
    if (looks_like_reaction(line)) {
      const ReactionGraph r = parse_reaction(line);
      for (const auto *role: { &r.reactants, &r.agents, &r.products })
        for (const MolGraph &m: *role)
          check(m), ++fixtures;
    } else {
      check(parse_smiles(line));
      ++fixtures;
    }
  }
  return { ok == total && fixtures > 0,
           fmt::format("{}/{} structures round-trip ({} from case-study fixtures){}", ok, total,
                       fixtures, first_bad.empty() ? "" : "; first failure " + first_bad) };
}

Outcome tanimoto_oracle() {
  std::mt19937_64 rng(3);
  int ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::bernoulli_distribution pa(std::uniform_real_distribution<>(0, 1)(rng));
    std::bernoulli_distribution pb(std::uniform_real_distribution<>(0, 1)(rng));
    std::vector<bool> va(2048), vb(2048);
    Fingerprint a(2048), b(2048);
    for (int i = 0; i < 2048; ++i) {
      va[i] = pa(rng);
      vb[i] = pb(rng);
      if (va[i])
        a.set(i);
      if (vb[i])
        b.set(i);
    }
    const auto [c, denom] = testing::naive_tanimoto_fraction(va, vb);
    const TanimotoCounts t = tanimoto_counts(a, b);
    const std::int64_t lib_denom = t.a + t.b - t.common;
    // Rational equality by cross-multiplication, then the double itself.
    const bool same_ratio = static_cast<std::int64_t>(t.common) * denom == c * lib_denom;
    const double expect = denom == 0 ? 1.0 : static_cast<double>(c) / denom;
    if (same_ratio && t.common == c && lib_denom == denom && tanimoto(a, b) == expect)
      ++ok;
  }
  return { ok == 1000, fmt::format("{}/1000 random 2048-bit pairs exactly equal c/(a+b-c)", ok) };
}

Outcome reward_variants() {
  std::mt19937_64 rng(4);
  int pairs = 0, sid = 0, exact_zero = 0, dense = 0;
  auto spec = [](AccuracyVariant v) {
    RewardSpec s;
    s.variant = v;
    return s;
  };
  while (pairs < 100) {
    const MolGraph m = testing::random_molecule(rng);
    const std::string gt = write_smiles(m);
    std::string pred;
    for (int k = 0; k < 50 && (pred.empty() || pred == gt); ++k)
      pred = write_smiles(m, WriteMode::randomized(rng()));
    if (pred == gt)
      continue;  // only one spelling exists
    ++pairs;
    const std::string text = "<think>t</think><answer><SMILES>" + pred + "</SMILES></answer>";
    sid += accuracy_reward_smiles(text, gt, spec(AccuracyVariant::kStructId)).score == 1.0;
    exact_zero +=
        accuracy_reward_smiles(text, gt, spec(AccuracyVariant::kExactString)).score == 0.0;
    dense += accuracy_reward_smiles(text, gt, spec(AccuracyVariant::kDenseTanimoto)).score == 1.0;
  }
  return { sid == 100 && exact_zero == 100 && dense == 100,
           fmt::format("of 100 re-spelled pairs: struct_id=1 in {}, exact_string=0 in {}, "
                       "dense_tanimoto=1.0 in {}",
                       sid, exact_zero, dense) };
}

Outcome dapo_math() {
  std::mt19937_64 rng(5);
  // Normalization on variance-positive groups.
  std::uniform_int_distribution<int> size(2, 16);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  int groups = 0, normalized = 0;
  double worst_mean = 0, worst_sd = 0;
  while (groups < 1000) {
    std::vector<double> r(size(rng));
    for (double &x: r)
      x = rng() % 4 == 0 ? std::round(val(rng)) : val(rng);
    if (std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; }))
      continue;
    const auto adv = group_advantages(r);
    ++groups;
    if (!adv)
      continue;
    const double n = static_cast<double>(adv->size());
    const double mean = std::accumulate(adv->begin(), adv->end(), 0.0) / n;
    double var = 0;
    for (double a: *adv)
      var += (a - mean) * (a - mean) / n;
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_sd = std::max(worst_sd, std::abs(std::sqrt(var) - 1.0));
    normalized += std::abs(mean) < 1e-9 && std::abs(std::sqrt(var) - 1.0) < 1e-9;
  }
  // Zero-variance groups are dropped.
  int filtered = 0, flat = 0;
  for (double v: { 0.0, 1.0, 0.1, -7.25, 0.9 }) {
    for (int g = 2; g <= 8; ++g, ++flat)
      filtered += !group_advantages(std::vector<double>(g, v)).has_value();
  }
  // Clip band.
  std::lognormal_distribution<double> ratio(0.0, 1.5);
  int in_band = 0;
  for (int i = 0; i < 10000; ++i) {
    const double c = clip_ratio(ratio(rng), kDefaultEpsLow, kDefaultEpsHigh);
    in_band += c >= 0.8 && c <= 1.28;
  }
  // Objective against the scalar re-implementation.
  std::uniform_int_distribution<int> gsize(2, 8), len(1, 40);
  std::lognormal_distribution<double> tok_ratio(0.0, 0.3);
  std::bernoulli_distribution hit(0.5);
  int compared = 0, agree = 0;
  double worst_obj = 0;
  while (compared < 100) {
    DapoGroup g;
    const int n = gsize(rng);
    for (int i = 0; i < n; ++i) {
      g.rewards.push_back(0.9 * hit(rng) + 0.1 * hit(rng));
      g.lengths.push_back(len(rng));
      std::vector<double> rs(g.lengths.back());
      for (double &x: rs)
        x = tok_ratio(rng);
      g.ratios.push_back(std::move(rs));
    }
    const auto v = dapo_objective(g);
    if (!v)
      continue;
    ++compared;
    const double d =
        std::abs(*v - testing::scalar_group_objective(g.rewards, g.ratios, g.eps_low, g.eps_high));
    worst_obj = std::max(worst_obj, d);
    agree += d <= 1e-12;
  }
  const bool pass = normalized == 1000 && filtered == flat && in_band == 10000 && agree == 100;
  return { pass, fmt::format("normalized {}/1000 (max |mean| {:.1e}, max |sd-1| {:.1e}); "
                             "flat groups filtered {}/{}; clipped in [0.8, 1.28] {}/10000; "
                             "objective within 1e-12 {}/100 (max diff {:.1e})",
                             normalized, worst_mean, worst_sd, filtered, flat, in_band, agree,
                             worst_obj) };
}

Outcome extraction_corpus() {
  int rows = 0, ok = 0;
  std::set<std::string> families;
  std::string first_bad;
  for (const std::string &line: read_lines(test_data_path("extraction_corpus.jsonl"))) {
    const json j = json::parse(line);
    const std::string text = j.contains("file")
                                 ? read_text_file(test_data_path(j["file"].get<std::string>()))
                                 : j["text"].get<std::string>();
    const AnswerKind kind = j["expect"] == "iupac" ? AnswerKind::kIupac : AnswerKind::kSmiles;
    const ExtractedAnswer a = extract_answer(text, kind);
    ++rows;
    const bool good = a.value == j["value"].get<std::string>()
                      && answer_source_name(a.source) == j["source"].get<std::string>();
    ok += good;
    families.insert(j["source"].get<std::string>());
    if (!good && first_bad.empty())
      first_bad = j["name"].get<std::string>();
  }
  bool all_families = true;
  for (const char *f: { "tagged", "fenced_json", "bbox", "bold", "bare_fallback" })
    all_families = all_families && families.count(f);
  return { rows >= 20 && ok == rows && all_families,
           fmt::format("{}/{} fixtures extracted correctly, {} families covered{}", ok, rows,
                       families.size(), first_bad.empty() ? "" : "; first failure " + first_bad) };
}

std::string id_of(const std::string &tag) {
  const auto a = tag.find('/');
  return tag.substr(a + 1, tag.find('/', a + 1) - a - 1);
}

Outcome pipeline_end_to_end() {
  const auto t0 = Clock::now();
  const auto inputs = read_samples(test_data_path("pipeline/samples.jsonl"));
  const auto expected =
      json::parse(read_text_file(test_data_path("pipeline/expected_counts.json")))["total"];
  const auto dir = std::filesystem::temp_directory_path()
                   / fmt::format("chemreason_acceptance_{}", getpid());
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  GenerationConfig config;
  config.retry.initial_backoff = std::chrono::milliseconds(0);
  config.checkpoint_path = (dir / "checkpoint.jsonl").string();

  struct Run {
    PipelineResult result;
    int calls = 0;
  };
  auto replay_run = [&] {
    ReplayChatClient replay = ReplayChatClient::load(test_data_path("pipeline/replay.jsonl"));
    PipelineServices svc;
    svc.generator = &replay;
    svc.verifier = &replay;
    svc.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
    Run r;
    r.result = run_pipeline(inputs, config, svc);
    r.calls = replay.calls();
    return r;
  };
  const Run first = replay_run();
  const Run second = replay_run();
  std::filesystem::remove_all(dir);

  const StageCounts t = first.result.report.total();
  const bool strict = t.generated > t.pass_structural && t.pass_structural > t.pass_consistency
                      && t.pass_consistency > t.pass_verifier && t.pass_verifier > 0;
  const bool matches_plan = t.generated == expected["generated"].get<long>()
                            && t.pass_structural == expected["pass_structural"].get<long>()
                            && t.pass_consistency == expected["pass_consistency"].get<long>()
                            && t.pass_verifier == expected["pass_verifier"].get<long>();
  const bool identical =
      format_retention_table(first.result.report) == format_retention_table(second.result.report)
      && retention_report_json(first.result.report)
             == retention_report_json(second.result.report);

  // Always-correct closures: the generator answers the ground truth and the
  // verifier recovers it.
  std::map<std::string, ReasoningSample> by_id;
  for (const auto &s: inputs)
    by_id[s.id] = s;
  const std::string filler =
      "Every atom and bond drawn is accounted for, ring closures are paired, heteroatoms "
      "are read from their labels and hydrogens are added from normal valences, so the "
      "written structure covers each line and letter in the drawing and nothing more. "
      "Charges and stereo marks are checked at the very end, and the count of rings, "
      "double bonds and branches is compared with the picture once more before answering.";
  MockChatClient gen([&](const ChatRequest &r) {
    const ReasoningSample &s = by_id.at(id_of(r.tag));
    if (s.task == TaskKind::kCaption)
      return "The image shows the structure in full. " + filler;
    const std::string tag = s.task == TaskKind::kMolToIupac ? "IUPAC" : "SMILES";
    return fmt::format("<think>In the image I see the structure. {}</think><answer><{}>{}</{}>"
                       "</answer>", filler, tag, s.ground_truth, tag);
  });
  MockChatClient ver([&](const ChatRequest &r) {
    const ReasoningSample &s = by_id.at(id_of(r.tag));
    const std::string tag = s.task == TaskKind::kMolToIupac ? "IUPAC" : "SMILES";
    return fmt::format("<answer><{}>{}</{}></answer>", tag, s.ground_truth, tag);
  });
  GenerationConfig plain;
  plain.retry.initial_backoff = std::chrono::milliseconds(0);
  PipelineServices svc;
  svc.generator = &gen;
  svc.verifier = &ver;
  const PipelineResult mocked = run_pipeline(inputs, plain, svc);
  const double mock_rate = mocked.report.total().retention_rate();

  const double secs = seconds_since(t0);
  const bool pass = strict && matches_plan && second.calls == 0 && identical
                    && mock_rate == 1.0 && secs < 10.0;
  return { pass, fmt::format("replay {}>{}>{}>{} (strict: {}, as planted: {}); rerun calls {}, "
                             "report identical: {}; always-correct retention {:.1f}%; {:.2f} s "
                             "(limit 10 s)",
                             t.generated, t.pass_structural, t.pass_consistency, t.pass_verifier,
                             strict ? "yes" : "no", matches_plan ? "yes" : "no", second.calls,
                             identical ? "yes" : "no", 100.0 * mock_rate, secs) };
}

Outcome difficulty_truth_table() {
  std::vector<RolloutPanel> panels;
  for (int mask = 0; mask < 16; ++mask) {
    RolloutPanel p;
    p.id = std::to_string(mask);
    for (int b = 0; b < 4; ++b)
      p.correct.push_back((mask >> b) & 1);
    panels.push_back(p);
  }
  const auto kept = difficulty_filter(panels);
  std::set<std::string> ids;
  for (const auto &p: kept)
    ids.insert(p.id);
  const bool pass = kept.size() == 14 && !ids.count("0") && !ids.count("15");
  return { pass, fmt::format("kept {} of 16 panels; all-false kept: {}, all-true kept: {}",
                             kept.size(), ids.count("0") ? "yes" : "no",
                             ids.count("15") ? "yes" : "no") };
}

// Queries cut from a fixed list plus the shipped catalog.
std::vector<Pattern> small_queries(std::mt19937_64 &rng) {
  static const char *extra[] = { "*~*", "C~*~O", "*1~*~*~*~*~*1", "[#6]=[#6]",
                                 "c:c", "[N,O]", "*(~*)(~*)~*", "[CX4H2]" };
  std::vector<Pattern> out(default_catalog().patterns());
  std::vector<int> pick(std::size(extra));
  std::iota(pick.begin(), pick.end(), 0);
  std::shuffle(pick.begin(), pick.end(), rng);
  for (int i = 0; i < 4; ++i)
    out.push_back(Pattern::parse("extra", extra[pick[i]]));
  return out;
}

Outcome eval_harness() {
  const auto records = read_eval_records(test_data_path("eval_fixture.jsonl"));
  const MetricSummary m = evaluate(records);
  const bool metrics = records.size() == 4 && m.avg_similarity == 85.0 && m.tani_at_1 == 50.0;

  std::mt19937_64 rng(9);
  testing::RandomMolOptions opts;
  opts.max_heavy_atoms = 12;
  int cases = 0, equal = 0;
  while (cases < 200) {
    const MolGraph mol = testing::random_molecule(rng, opts);
    if (mol.num_atoms() > 12)
      continue;
    ++cases;
    bool all = true;
    for (const Pattern &q: small_queries(rng)) {
      auto fast = match_substructure(mol, q);
      std::sort(fast.begin(), fast.end());
      all = all && fast == testing::brute_force_matches(mol, q);
    }
    equal += all;
  }
  return { metrics && equal == 200,
           fmt::format("fixture Avg Sim {:.1f} / Tani@1.0 {:.1f} (want 85.0 / 50.0); matcher equals "
                       "brute force on {}/200 graphs",
                       m.avg_similarity, m.tani_at_1, equal) };
}

Outcome token_statistics() {
  WhitespacePunctTokenizer ws;
  // Counts 3, 5, 7, 9: mean 6, population variance 5.
  const std::vector<std::string> a = { "a b c", "a b c d e", "x(y)z+w", "1 2 3 4 5 6 7 8 9" };
  const TokenStats sa = token_stats(a, ws);
  // Counts 3 and 1: mean 2, SD 1.
  const std::vector<std::string> b = { "a b c", "a" };
  const TokenStats sb = token_stats(b, ws);
  // Merges a+b, ab+c, c+c: "abc abd" is abc|ab|d, "cccc" is cc|cc.
  const BpeTokenizer bpe = BpeTokenizer::parse("a b\nab c\nc c\n");
  const std::vector<std::string> c = { "abc abd", "cccc" };
  const TokenStats sc = token_stats(c, bpe);
  const bool numbers = sa.sample_count == 4 && sa.mean == 6.0 && sa.sd == std::sqrt(5.0)
                       && sb.mean == 2.0 && sb.sd == 1.0 && sc.mean == 2.5 && sc.sd == 0.5;
  const std::string table =
      format_token_table("Reasoning Data", { { "Molecule", { 3, 409.925, 139.034 } } });
  const bool layout = table
                      == "Reasoning Data   Samples     Average          SD\n"
                         "Molecule               3      409.93      139.03\n";
  return { numbers && layout,
           fmt::format("hand fixtures mean/SD {}/{:.4f}, {}/{}, {}/{}; table columns "
                       "Samples/Average/SD {}",
                       sa.mean, sa.sd, sb.mean, sb.sd, sc.mean, sc.sd,
                       layout ? "match" : "differ") };
}

}  // namespace
}  // namespace chemreason

int main() {
  using namespace chemreason;
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
    { "canonicalization invariance", canonical_invariance },
    { "parse/write round trip", round_trip },
    { "tanimoto against popcount oracle", tanimoto_oracle },
    { "reward variant semantics", reward_variants },
    { "DAPO math", dapo_math },
    { "extraction corpus", extraction_corpus },
    { "offline pipeline end to end", pipeline_end_to_end },
    { "difficulty filter truth table", difficulty_truth_table },
    { "evaluation harness", eval_harness },
    { "token statistics", token_statistics },
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = { false, fmt::format("exception: {}", e.what()) };
    }
    failed += !o.pass;
    std::cout << fmt::format("{} {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1,
                             criteria[i].first, o.detail)
              << std::flush;
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
