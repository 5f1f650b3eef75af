#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "chemreason/error.h"
#include "chemreason/fingerprint.h"
#include "chemreason/rlcore.h"
#include "chemreason/smiles.h"
#include "oracles.h"
#include "random_mol.h"

namespace chemreason {
namespace {

RewardSpec with_variant(AccuracyVariant v) {
  RewardSpec s;
  s.variant = v;
  return s;
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

TEST(Accuracy, ReSpellingUnderEachVariant) {
  const char *pred = "<SMILES>OCC</SMILES>";
  AccuracyResult r =
      accuracy_reward_smiles(pred, "CCO", with_variant(AccuracyVariant::kStructId));
  EXPECT_EQ(r.score, 1.0);
  EXPECT_EQ(r.similarity, 1.0);
  r = accuracy_reward_smiles(pred, "CCO", with_variant(AccuracyVariant::kExactString));
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.similarity, 1.0);
  r = accuracy_reward_smiles(pred, "CCO",
                             with_variant(AccuracyVariant::kDenseTanimoto));
  EXPECT_EQ(r.score, 1.0);
}

TEST(Accuracy, DenseTanimotoMatchesPopcount) {
  AccuracyResult r = accuracy_reward_smiles(
      "<SMILES>CCN</SMILES>", "CCO", with_variant(AccuracyVariant::kDenseTanimoto));
  Fingerprint a = morgan_fingerprint(parse_smiles("CCN"));
  Fingerprint b = morgan_fingerprint(parse_smiles("CCO"));
  std::vector<bool> va(a.width()), vb(b.width());
  for (int i = 0; i < a.width(); ++i) {
    va[i] = a.test(i);
    vb[i] = b.test(i);
  }
  auto [c, denom] = testing::naive_tanimoto_fraction(va, vb);
  const double v = static_cast<double>(c) / denom;
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_EQ(r.score, v);
  EXPECT_EQ(r.similarity, v);
  // Frozen from the Python fingerprint reimplementation.
  EXPECT_EQ(v, 3.0 / 15.0);
}

TEST(Accuracy, MissingOrBrokenPredictionScoresZero) {
  for (AccuracyVariant v: { AccuracyVariant::kStructId,
                            AccuracyVariant::kDenseTanimoto,
                            AccuracyVariant::kExactString }) {
    AccuracyResult r = accuracy_reward_smiles("no idea", "CCO", with_variant(v));
    EXPECT_EQ(r.score, 0.0);
    EXPECT_EQ(r.similarity, 0.0);
    r = accuracy_reward_smiles("<SMILES>C1CC</SMILES>", "CCO", with_variant(v));
    EXPECT_EQ(r.score, 0.0);
    EXPECT_EQ(r.similarity, 0.0);
  }
}

TEST(Accuracy, CorruptGroundTruth) {
  EXPECT_EQ(code_of([] { accuracy_reward_smiles("<SMILES>CCO</SMILES>", "C1CC"); }),
            ErrorCode::kInvalidGroundTruth);
  EXPECT_EQ(code_of([] { accuracy_reward_smiles("nothing", "C>C"); }),
            ErrorCode::kInvalidGroundTruth);
}

TEST(Accuracy, StructIdIsBinary) {
  std::mt19937_64 rng(3);
  RewardSpec spec = with_variant(AccuracyVariant::kStructId);
  for (int i = 0; i < 100; ++i) {
    std::string a = write_smiles(testing::random_molecule(rng));
    std::string b = write_smiles(testing::random_molecule(rng));
    const double s = accuracy_reward_smiles("<SMILES>" + a + "</SMILES>", b, spec).score;
    EXPECT_TRUE(s == 0.0 || s == 1.0);
  }
}

TEST(Accuracy, HeavyAtomGuard) {
  // Same fingerprint bits, different sizes: two copies of a fragment.
  RewardSpec guarded = with_variant(AccuracyVariant::kStructId);
  RewardSpec plain = guarded;
  plain.heavy_atom_guard = false;
  const char *pred = "<SMILES>CCO.CCO</SMILES>";
  EXPECT_EQ(accuracy_reward_smiles(pred, "CCO", plain).score, 1.0);
  EXPECT_EQ(accuracy_reward_smiles(pred, "CCO", guarded).score, 0.0);
}

TEST(Accuracy, ReactionAnswers) {
  RewardSpec spec;
  EXPECT_EQ(accuracy_reward_smiles("<SMILES>OCC.CC(O)=O>>CCOC(C)=O</SMILES>",
                                   "CC(=O)O.CCO>>CCOC(C)=O", spec)
                .score,
            1.0);
  EXPECT_EQ(accuracy_reward_smiles("<SMILES>CCOC(C)=O</SMILES>",
                                   "CC(=O)O.CCO>>CCOC(C)=O", spec)
                .score,
            0.0);
}

// 100 predictions that re-spell the ground truth: the three reward variants
// must disagree exactly as designed.
TEST(Accuracy, VariantSemanticsOnReSpellings) {
  std::mt19937_64 rng(404);
  int checked = 0;
  while (checked < 100) {
    MolGraph m = testing::random_molecule(rng);
    const std::string gt = write_smiles(m);
    std::string pred;
    for (std::uint64_t seed = 1; seed < 50 && (pred.empty() || pred == gt); ++seed)
      pred = write_smiles(m, WriteMode::randomized(rng() + seed));
    if (pred == gt)
      continue;  // single-spelling molecules such as "C"
    ++checked;
    const std::string text = "<think>t</think><answer><SMILES>" + pred +
                             "</SMILES></answer>";
    EXPECT_EQ(accuracy_reward_smiles(text, gt,
                                     with_variant(AccuracyVariant::kStructId)).score,
              1.0) << pred << " vs " << gt;
    EXPECT_EQ(accuracy_reward_smiles(text, gt,
                                     with_variant(AccuracyVariant::kExactString)).score,
              0.0);
    EXPECT_EQ(accuracy_reward_smiles(text, gt,
                                     with_variant(AccuracyVariant::kDenseTanimoto)).score,
              1.0);
  }
}

TEST(Iupac, Normalization) {
  EXPECT_EQ(accuracy_reward_iupac("<IUPAC>ethanol</IUPAC>", "ethanol").score, 1.0);
  EXPECT_EQ(accuracy_reward_iupac("Ethanol ", "ethanol").score, 1.0);
  EXPECT_EQ(accuracy_reward_iupac("ethanal", "ethanol").score, 0.0);
  EXPECT_EQ(normalize_iupac("  Acetic \t\n ACID "), "acetic acid");
  EXPECT_EQ(normalize_iupac(""), "");
}

TEST(Format, Examples) {
  EXPECT_EQ(format_reward("<think>t</think>\n<answer><SMILES>CCO</SMILES></answer>"), 1);
  EXPECT_EQ(format_reward("answer: CCO"), 0);
  EXPECT_EQ(format_reward("<think>a</think><think>b</think><answer>x</answer>"), 0);
}

TEST(Composite, WeightArithmetic) {
  RewardSpec s;
  EXPECT_EQ(combine_reward(1, 1, s), 1.0);
  EXPECT_DOUBLE_EQ(combine_reward(0, 1, s), 0.1);
  s.w_accuracy = s.w_format = 0.5;
  EXPECT_EQ(combine_reward(1, 0, s), 0.5);
}

TEST(Composite, EndToEnd) {
  RewardOutcome o = composite_reward(
      "<think>t</think>\n<answer><SMILES>OCC</SMILES></answer>", "CCO");
  EXPECT_EQ(o.accuracy, 1.0);
  EXPECT_EQ(o.format, 1);
  EXPECT_EQ(o.composite, 1.0);
  EXPECT_EQ(o.source, AnswerSource::kTagged);

  o = composite_reward("<think>t</think><answer><SMILES>CCN</SMILES></answer>", "CCO");
  EXPECT_EQ(o.accuracy, 0.0);
  EXPECT_DOUBLE_EQ(o.composite, 0.1);

  o = composite_reward("**ethanol**", "Ethanol", {}, AnswerKind::kIupac);
  EXPECT_EQ(o.accuracy, 1.0);
  EXPECT_EQ(o.format, 0);
  EXPECT_DOUBLE_EQ(o.composite, 0.9);
}

TEST(Composite, SpecValidation) {
  RewardSpec s;
  s.w_accuracy = 0.7;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kInvalidSpec);
  s.w_accuracy = 1.1;
  s.w_format = -0.1;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kInvalidSpec);
  s = {};
  s.fingerprint.width = 100;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(parse_accuracy_variant("dense_tanimoto"), AccuracyVariant::kDenseTanimoto);
  EXPECT_EQ(code_of([] { parse_accuracy_variant("nope"); }), ErrorCode::kInvalidSpec);
}

TEST(Advantages, Examples) {
  std::vector<double> r = { 1, 0, 0, 1 };
  EXPECT_EQ(*group_advantages(r), (std::vector<double> { 1, -1, -1, 1 }));
  r = { 1, 1, 1, 1 };
  EXPECT_FALSE(group_advantages(r));
  r = { 1, 0 };
  EXPECT_EQ(*group_advantages(r), (std::vector<double> { 1, -1 }));
  r = { 1 };
  EXPECT_EQ(code_of([&] { group_advantages(r); }), ErrorCode::kGroupTooSmall);
}

TEST(Advantages, NormalizedOnRandomGroups) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(2, 16);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  int groups = 0;
  while (groups < 1000) {
    std::vector<double> r(size(rng));
    for (double &x: r)
      x = rng() % 4 == 0 ? std::round(val(rng)) : val(rng);
    auto adv = group_advantages(r);
    if (!adv)
      continue;
    ++groups;
    const double n = static_cast<double>(adv->size());
    const double mean = std::accumulate(adv->begin(), adv->end(), 0.0) / n;
    double var = 0.0;
    for (double a: *adv)
      var += (a - mean) * (a - mean) / n;
    ASSERT_LT(std::abs(mean), 1e-9);
    ASSERT_LT(std::abs(std::sqrt(var) - 1.0), 1e-9);
  }
}

TEST(Advantages, ZeroVarianceFiltered) {
  for (double v: { 0.0, 1.0, 0.1, -7.25 }) {
    for (int g = 2; g <= 8; ++g) {
      std::vector<double> r(g, v);
      EXPECT_FALSE(group_advantages(r));
    }
  }
}

TEST(Clip, Examples) {
  EXPECT_DOUBLE_EQ(clipped_term(1.5, 1, 0.2, 0.28), 1.28);
  // Negative advantage below the band: min picks the clipped -0.8.
  EXPECT_DOUBLE_EQ(clipped_term(0.5, -1, 0.2, 0.28), -0.8);
  // Inside the band both branches agree.
  EXPECT_DOUBLE_EQ(clipped_term(0.9, -1, 0.2, 0.28), -0.9);
  for (double a: { -2.0, -1.0, 0.0, 0.3, 5.0 })
    EXPECT_EQ(clipped_term(1.0, a, 0.2, 0.28), a);
}

TEST(Clip, BandUnderDefaultThresholds) {
  std::mt19937_64 rng(8);
  std::lognormal_distribution<double> ratio(0.0, 1.5);
  for (int i = 0; i < 10000; ++i) {
    const double c = clip_ratio(ratio(rng), kDefaultEpsLow, kDefaultEpsHigh);
    ASSERT_GE(c, 0.8);
    ASSERT_LE(c, 1.28);
  }
  EXPECT_EQ(clip_ratio(1e-300, kDefaultEpsLow, kDefaultEpsHigh), 0.8);
  EXPECT_EQ(clip_ratio(1e300, kDefaultEpsLow, kDefaultEpsHigh), 1.28);
}

TEST(Dapo, IdentityRatios) {
  DapoGroup g;
  g.rewards = { 1, 0 };
  g.ratios = { { 1, 1, 1 }, { 1 } };
  g.lengths = { 3, 1 };
  EXPECT_EQ(*dapo_objective(g), 0.5);
  g.rewards = { 1, 1 };
  EXPECT_FALSE(dapo_objective(g));
}

TEST(Dapo, MixedThreeRolloutFixture) {
  DapoGroup g;
  g.rewards = { 1.0, 0.0, 0.5 };
  g.ratios = { { 1.5, 0.9, 1.1 }, { 0.7, 1.3 }, { 1.0, 0.75, 1.2, 1.4 } };
  g.lengths = { 3, 2, 4 };
  // Advantages are +-sqrt(1.5) and 0; the clipped sums reduce to
  // sqrt(1.5) * (1.28 + 0.9 + 1.1 - 0.8 - 1.3) over 9 tokens.
  const double v = *dapo_objective(g);
  EXPECT_NEAR(v, 1.18 * std::sqrt(1.5) / 9.0, 1e-12);
  EXPECT_NEAR(v, 0.16057766091578618, 1e-12);
  EXPECT_NEAR(v, testing::scalar_group_objective(g.rewards, g.ratios, 0.2, 0.28),
              1e-12);
}

TEST(Dapo, MatchesScalarOracleOnRandomGroups) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> gsize(2, 8), len(1, 40);
  std::lognormal_distribution<double> ratio(0.0, 0.3);
  std::bernoulli_distribution hit(0.5);
  int groups = 0;
  while (groups < 100) {
    DapoGroup g;
    const int n = gsize(rng);
    for (int i = 0; i < n; ++i) {
      g.rewards.push_back(0.9 * hit(rng) + 0.1 * hit(rng));
      g.lengths.push_back(len(rng));
      std::vector<double> rs(g.lengths.back());
      for (double &r: rs)
        r = ratio(rng);
      g.ratios.push_back(rs);
    }
    auto v = dapo_objective(g);
    if (!v)
      continue;
    ++groups;
    ASSERT_NEAR(*v,
                testing::scalar_group_objective(g.rewards, g.ratios, g.eps_low,
                                                g.eps_high),
                1e-12);
    // Permuting rollouts leaves the objective unchanged.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    DapoGroup p = g;
    for (int i = 0; i < n; ++i) {
      p.rewards[i] = g.rewards[perm[i]];
      p.ratios[i] = g.ratios[perm[i]];
      p.lengths[i] = g.lengths[perm[i]];
    }
    ASSERT_NEAR(*dapo_objective(p), *v, 1e-12);
  }
}

TEST(Dapo, ShapeErrors) {
  DapoGroup g;
  g.rewards = { 1, 0 };
  g.ratios = { { 1, 1 }, { 1 } };
  g.lengths = { 3, 1 };
  EXPECT_EQ(code_of([&] { dapo_objective(g); }), ErrorCode::kShapeMismatch);
  g.lengths = { 2, 1 };
  g.ratios[1][0] = -1.0;
  EXPECT_EQ(code_of([&] { dapo_objective(g); }), ErrorCode::kShapeMismatch);
  g.ratios[1][0] = 1.0;
  g.ratios.pop_back();
  EXPECT_EQ(code_of([&] { dapo_objective(g); }), ErrorCode::kShapeMismatch);
  g = {};
  g.rewards = { 1 };
  g.ratios = { { 1 } };
  g.lengths = { 1 };
  EXPECT_EQ(code_of([&] { dapo_objective(g); }), ErrorCode::kGroupTooSmall);
}

TEST(Difficulty, Examples) {
  EXPECT_TRUE(difficulty_retain({ true, true, false, false }));
  EXPECT_FALSE(difficulty_retain({ true, true, true, true }));
  EXPECT_FALSE(difficulty_retain({ false, false, false, false }));
  EXPECT_EQ(code_of([] { difficulty_retain({}); }), ErrorCode::kGroupTooSmall);
}

TEST(Difficulty, FourRolloutTruthTable) {
  int kept = 0;
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<bool> panel(kDifficultyRollouts);
    for (int i = 0; i < kDifficultyRollouts; ++i)
      panel[i] = (mask >> i) & 1;
    const bool keep = difficulty_retain(panel);
    EXPECT_EQ(keep, mask != 0 && mask != 15) << mask;
    kept += keep;
  }
  EXPECT_EQ(kept, 14);
}

}  // namespace
}  // namespace chemreason
